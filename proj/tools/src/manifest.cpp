#include "manifest.hpp"

#include "mirrorfix/textio.hpp"
#include "mirrorfix/version.hpp"
#include "sha256.hpp"

namespace mirrorfix::app {

void write_manifest(const std::string& out_dir, const std::string& command,
                    const nlohmann::json& config, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
    nlohmann::json m;
    m["command"] = command;
    m["tool_version"] = mirrorfix::version;
    nlohmann::json in = nlohmann::json::object();
    for (const auto& path : inputs) in[path] = "sha256:" + sha256_hex(read_text_file(path));
    m["inputs"] = in;
    m["config"] = config;
    m["outputs"] = outputs;
    write_text_file(out_dir + "/manifest.json", m.dump(2) + "\n");
}

} // namespace mirrorfix::app
