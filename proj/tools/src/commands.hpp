#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace mirrorfix::app {

struct SimulateArgs {
    std::string scenario_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed_override; // MIRRORFIX_SEED wins over the file
};
int cmd_simulate(const SimulateArgs& args);

struct DetectArgs {
    std::string input;
    std::string out_dir;
    std::int64_t period_ms = 20000;
    double duty = 0.5;
    double threshold_db = 3.0;
    double score_min = 0.6;
};
int cmd_detect(const DetectArgs& args);

struct SolveAbsArgs {
    std::string input;
    std::string scenario_path;
    std::string out_dir;
    std::string ts_mode = "estimate"; // "estimate" or "known"
    double ts_known_s = 0.0;
    double tol_m = 1e-4;
    int max_iter = 50;
    double alpha = 0.2; // delay-estimator smoothing
};
int cmd_solve_abs(const SolveAbsArgs& args);

struct SolveDiffArgs {
    std::string input;
    std::string scenario_path;
    std::string out_dir;
    std::string floor_plan_path; // optional
    std::string mode = "phase";  // "phase" or "pseudorange"
    std::int64_t window_ms = 40000;
    double tol_m = 1e-4;
    int max_iter = 50;
};
int cmd_solve_diff(const SolveDiffArgs& args);

struct ConvertArgs {
    std::string input;
    std::string out_dir;
    std::string clock_model = "simple";
};
int cmd_convert(const ConvertArgs& args);

struct ReportArgs {
    std::string solutions_csv;
    std::string truth_csv;
    std::string out_dir;
};
int cmd_report(const ReportArgs& args);

// rf calculator subcommands; each returns the JSON text it prints.
std::string rf_gamma_json(double zl_re, double zl_im, double za_re, double za_im);
std::string rf_resonance_json(std::optional<double> l, std::optional<double> c,
                              std::optional<double> f_c);
std::string rf_q_json(double l, double c, double r);
std::string rf_ceq_json(double c_j, double c_p, double l_p, double r, double r_nr,
                        double f_c);
std::string rf_nf_json(double r, double r_nr, double f, double f_r0, double k_a);
std::string rf_bias_scan_json(const std::string& iv_csv, int degree, double bias_min,
                              double bias_max, double step, double f, double f_r0,
                              double k_a);

/// Full CLI entry: parses argv, dispatches, maps errors to exit codes
/// (0 success, 1 usage, 2 data).
int run_cli(int argc, const char* const* argv);

} // namespace mirrorfix::app
