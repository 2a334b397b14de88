#include "src/commands.hpp"

int main(int argc, char** argv) { return mirrorfix::app::run_cli(argc, argv); }
