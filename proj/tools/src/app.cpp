#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "commands.hpp"
#include "mirrorfix/errors.hpp"
#include "mirrorfix/textio.hpp"
#include "mirrorfix/version.hpp"

namespace mirrorfix::app {

namespace {

// --ts accepts "estimate" or "known:<seconds>".
void parse_ts_flag(const std::string& text, SolveAbsArgs& args) {
    if (text == "estimate") {
        args.ts_mode = "estimate";
        return;
    }
    if (text.rfind("known:", 0) == 0) {
        double value = 0.0;
        if (mirrorfix::parse_double(text.substr(6), value)) {
            args.ts_mode = "known";
            args.ts_known_s = value;
            return;
        }
    }
    throw CLI::ValidationError("--ts", "expected 'estimate' or 'known:<seconds>'");
}

std::optional<std::uint64_t> seed_from_env() {
    const char* env = std::getenv("MIRRORFIX_SEED");
    if (!env) return std::nullopt;
    std::int64_t value = 0;
    if (!mirrorfix::parse_int64(env, value) || value < 0)
        throw CLI::ValidationError("MIRRORFIX_SEED", "must be a nonnegative integer");
    return static_cast<std::uint64_t>(value);
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App cli{"mirrorfix: GNSS backscatter positioning toolkit"};
    cli.set_version_flag("--version", mirrorfix::version);
    cli.require_subcommand(1);
    int rc = 0;

    // simulate
    SimulateArgs sim;
    auto* simulate = cli.add_subcommand("simulate", "Generate measurements from a scenario");
    simulate->add_option("--scenario", sim.scenario_path, "Scenario JSON")->required();
    simulate->add_option("--out", sim.out_dir, "Output directory")->required();
    simulate->callback([&] {
        sim.seed_override = seed_from_env();
        rc = cmd_simulate(sim);
    });

    // detect
    DetectArgs det;
    auto* detect = cli.add_subcommand("detect", "Label scattered epochs from C/N0 keying");
    detect->add_option("--input", det.input, "Canonical measurement CSV")->required();
    detect->add_option("--out", det.out_dir, "Output directory")->required();
    detect->add_option("--period-ms", det.period_ms, "Switching period (ms)");
    detect->add_option("--duty", det.duty, "ON fraction of the cycle");
    detect->add_option("--threshold-db", det.threshold_db, "Detection gain threshold");
    detect->add_option("--score-min", det.score_min, "Minimum correlation score");
    detect->callback([&] { rc = cmd_detect(det); });

    // solve-abs
    SolveAbsArgs abs_args;
    std::string ts_flag = "estimate";
    auto* solve_abs = cli.add_subcommand("solve-abs", "Absolute WLS with virtual satellites");
    solve_abs->add_option("--input", abs_args.input, "Labeled measurement CSV")->required();
    solve_abs->add_option("--scenario", abs_args.scenario_path, "Scenario JSON")->required();
    solve_abs->add_option("--out", abs_args.out_dir, "Output directory")->required();
    solve_abs->add_option("--ts", ts_flag, "Scatter delay: estimate | known:<seconds>");
    solve_abs->add_option("--tol", abs_args.tol_m, "Convergence tolerance (m)");
    solve_abs->add_option("--max-iter", abs_args.max_iter, "Iteration cap");
    solve_abs->add_option("--alpha", abs_args.alpha, "Delay estimator smoothing");
    solve_abs->callback([&] {
        parse_ts_flag(ts_flag, abs_args);
        rc = cmd_solve_abs(abs_args);
    });

    // solve-diff
    SolveDiffArgs diff_args;
    auto* solve_diff =
        cli.add_subcommand("solve-diff", "Differential base-vector positioning");
    solve_diff->add_option("--input", diff_args.input, "Labeled measurement CSV")->required();
    solve_diff->add_option("--scenario", diff_args.scenario_path, "Scenario JSON")->required();
    solve_diff->add_option("--out", diff_args.out_dir, "Output directory")->required();
    solve_diff->add_option("--floor-plan", diff_args.floor_plan_path, "Floor-plan JSON");
    solve_diff->add_option("--mode", diff_args.mode, "phase | pseudorange")
        ->check(CLI::IsMember({"phase", "pseudorange"}));
    solve_diff->add_option("--window-ms", diff_args.window_ms, "Pairing window (ms)");
    solve_diff->add_option("--tol", diff_args.tol_m, "Convergence tolerance (m)");
    solve_diff->add_option("--max-iter", diff_args.max_iter, "Iteration cap");
    solve_diff->callback([&] { rc = cmd_solve_diff(diff_args); });

    // convert
    ConvertArgs conv;
    auto* convert = cli.add_subcommand("convert", "Convert a raw log to canonical CSV");
    convert->add_option("--input", conv.input, "Raw log CSV")->required();
    convert->add_option("--out", conv.out_dir, "Output directory")->required();
    convert->add_option("--clock-model", conv.clock_model, "Clock model")
        ->check(CLI::IsMember({"simple"}));
    convert->callback([&] { rc = cmd_convert(conv); });

    // report
    ReportArgs rep;
    auto* report = cli.add_subcommand("report", "Join solutions with truth, emit CDF data");
    report->add_option("--solutions", rep.solutions_csv, "Trajectory CSV")->required();
    report->add_option("--truth", rep.truth_csv, "Truth CSV")->required();
    report->add_option("--out", rep.out_dir, "Output directory")->required();
    report->callback([&] { rc = cmd_report(rep); });

    // rf calculator family
    auto* rf = cli.add_subcommand("rf", "Reflection-amplifier design calculator");
    rf->require_subcommand(1);

    std::pair<double, double> zl{0, 0}, za{50, 0};
    auto* gamma = rf->add_subcommand("gamma", "Reflection coefficient and gain");
    gamma->add_option("--zl", zl, "Load impedance re,im (ohm)")->required()->delimiter(',');
    gamma->add_option("--za", za, "Antenna impedance re,im (ohm)")->delimiter(',');
    gamma->callback(
        [&] { std::cout << rf_gamma_json(zl.first, zl.second, za.first, za.second); });

    std::optional<double> res_l, res_c, res_fc;
    auto* resonance = rf->add_subcommand("resonance", "Series LC resonance solve");
    resonance->add_option("--l", res_l, "Inductance (H)");
    resonance->add_option("--c", res_c, "Capacitance (F)");
    resonance->add_option("--fc", res_fc, "Center frequency (Hz)");
    resonance->callback([&] { std::cout << rf_resonance_json(res_l, res_c, res_fc); });

    double q_l = 0, q_c = 0, q_r = 0;
    auto* q = rf->add_subcommand("q", "Quality factor of a series resonator");
    q->add_option("--l", q_l, "Inductance (H)")->required();
    q->add_option("--c", q_c, "Capacitance (F)")->required();
    q->add_option("--r", q_r, "Parasitic resistance (ohm)")->required();
    q->callback([&] { std::cout << rf_q_json(q_l, q_c, q_r); });

    double ceq_cj = 0.1e-12, ceq_cp = 0.3e-12, ceq_lp = 1.2e-9, ceq_r = 6.0;
    double ceq_rnr = -650.0, ceq_fc = 1.57542e9;
    auto* ceq = rf->add_subcommand("ceq", "Equivalent parallel capacitance of the package");
    ceq->add_option("--cj", ceq_cj, "Junction capacitance (F)");
    ceq->add_option("--cp", ceq_cp, "Package capacitance (F)");
    ceq->add_option("--lp", ceq_lp, "Package inductance (H)");
    ceq->add_option("--r", ceq_r, "Series resistance (ohm)");
    ceq->add_option("--rnr", ceq_rnr, "Negative resistance (ohm)");
    ceq->add_option("--fc", ceq_fc, "Center frequency (Hz)");
    ceq->callback(
        [&] { std::cout << rf_ceq_json(ceq_cj, ceq_cp, ceq_lp, ceq_r, ceq_rnr, ceq_fc); });

    double nf_r = 6.0, nf_rnr = -650.0, nf_f = 1.57542e9, nf_fr0 = 0.0, nf_ka = 1.2;
    auto* nf = rf->add_subcommand("nf", "Noise figure of the reflection amplifier");
    nf->add_option("--r", nf_r, "Series resistance (ohm)");
    nf->add_option("--rnr", nf_rnr, "Negative resistance (ohm)")->required();
    nf->add_option("--f", nf_f, "Operating frequency (Hz)")->required();
    nf->add_option("--fr0", nf_fr0, "Cutoff frequency (Hz), required")->required();
    nf->add_option("--ka", nf_ka, "Noise factor");
    nf->callback([&] { std::cout << rf_nf_json(nf_r, nf_rnr, nf_f, nf_fr0, nf_ka); });

    std::string scan_iv;
    int scan_degree = 9;
    std::pair<double, double> scan_range{0.0, 0.0};
    double scan_step = 1e-3, scan_f = 1.57542e9, scan_fr0 = 0.0, scan_ka = 1.2;
    auto* scan = rf->add_subcommand("bias-scan", "Bias grid search minimizing NF");
    scan->add_option("--iv", scan_iv, "IV samples CSV (bias_v,current_a)")->required();
    scan->add_option("--degree", scan_degree, "Polynomial fit degree");
    scan->add_option("--bias", scan_range, "Bias range lo,hi (V)")->required()->delimiter(',');
    scan->add_option("--step", scan_step, "Grid step (V)");
    scan->add_option("--f", scan_f, "Operating frequency (Hz)");
    scan->add_option("--fr0", scan_fr0, "Cutoff frequency (Hz), required")->required();
    scan->add_option("--ka", scan_ka, "Noise factor");
    scan->callback([&] {
        std::cout << rf_bias_scan_json(scan_iv, scan_degree, scan_range.first,
                                       scan_range.second, scan_step, scan_f, scan_fr0,
                                       scan_ka);
    });

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : 1; // help/version exit 0, any usage error exits 1
    } catch (const mirrorfix::DomainError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const mirrorfix::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}

} // namespace mirrorfix::app
