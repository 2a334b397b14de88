#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <map>

#include "manifest.hpp"
#include "mirrorfix/measurements.hpp"
#include "mirrorfix/rfdesign.hpp"
#include "mirrorfix/simulator.hpp"
#include "mirrorfix/solver_abs.hpp"
#include "mirrorfix/solver_diff.hpp"
#include "mirrorfix/tagdetect.hpp"
#include "mirrorfix/textio.hpp"
#include "report.hpp"

namespace mirrorfix::app {

namespace {

using nlohmann::json;

void ensure_out_dir(const std::string& out_dir) {
    if (out_dir.empty()) throw DomainError("--out directory is required");
    std::filesystem::create_directories(out_dir);
}

json point_json(const EcefPoint& p) { return json::array({p.x, p.y, p.z}); }

std::map<int, EcefPoint> positions_at(const Constellation& sats, std::int64_t epoch_ms) {
    std::map<int, EcefPoint> out;
    for (const auto& [svid, model] : sats.satellites())
        out[svid] = sats.position(svid, static_cast<double>(epoch_ms) * 1e-3);
    return out;
}

} // namespace

int cmd_simulate(const SimulateArgs& args) {
    ensure_out_dir(args.out_dir);
    Scenario scenario = parse_scenario_json(args.scenario_path);
    if (args.seed_override) scenario.seed = *args.seed_override;
    const SimulationOutput out = generate(scenario);
    write_measurement_csv(out.measurements, args.out_dir + "/measurements.csv");
    write_truth_csv(out.truth, args.out_dir + "/truth.csv");

    json config;
    config["scenario"] = args.scenario_path;
    config["seed"] = scenario.seed;
    write_manifest(args.out_dir, "simulate", config, {args.scenario_path},
                   {"measurements.csv", "truth.csv"});
    return 0;
}

int cmd_detect(const DetectArgs& args) {
    ensure_out_dir(args.out_dir);
    MeasurementSet set = parse_measurement_csv(args.input);

    SwitchingPattern pattern{args.period_ms, args.duty, 0};
    DetectOptions options{args.threshold_db, args.score_min};

    json per_svid = json::object();
    std::map<int, std::vector<std::size_t>> rows_by_svid;
    for (std::size_t i = 0; i < set.rows.size(); ++i)
        rows_by_svid[set.rows[i].svid].push_back(i);

    for (const auto& [svid, indices] : rows_by_svid) {
        std::vector<std::pair<std::int64_t, double>> series;
        series.reserve(indices.size());
        for (const std::size_t i : indices) {
            if (!series.empty() && series.back().first == set.rows[i].epoch_ms)
                throw Error("detect: svid " + std::to_string(svid) +
                            " has multiple rows at epoch " +
                            format_int(set.rows[i].epoch_ms) +
                            "; detect expects one row per epoch per satellite");
            series.emplace_back(set.rows[i].epoch_ms, set.rows[i].cn0_dbhz);
        }
        json entry;
        try {
            const DetectionResult r = detect_pattern(series, pattern, options);
            entry["detected"] = r.detected;
            entry["score"] = r.score;
            entry["phase_ms"] = r.phase_ms;
            entry["epochs"] = series.size();
            if (r.detected) entry["gain_db"] = *r.gain_db;
            for (std::size_t k = 0; k < indices.size(); ++k)
                set.rows[indices[k]].scattered =
                    r.detected ? r.per_epoch_labels[k] : ScatterClass::direct;
        } catch (const InsufficientSpan& e) {
            entry["detected"] = false;
            entry["reason"] = e.what();
            for (const std::size_t i : indices)
                set.rows[i].scattered = ScatterClass::direct;
        }
        per_svid[std::to_string(svid)] = entry;
    }

    write_text_file(args.out_dir + "/detection.json",
                    json{{"svids", per_svid}}.dump(2) + "\n");
    write_measurement_csv(set, args.out_dir + "/labeled.csv");

    json config;
    config["input"] = args.input;
    config["period_ms"] = args.period_ms;
    config["duty"] = args.duty;
    config["threshold_db"] = args.threshold_db;
    config["score_min"] = args.score_min;
    write_manifest(args.out_dir, "detect", config, {args.input},
                   {"detection.json", "labeled.csv"});
    return 0;
}

int cmd_solve_abs(const SolveAbsArgs& args) {
    ensure_out_dir(args.out_dir);
    if (args.ts_mode != "estimate" && args.ts_mode != "known")
        throw DomainError("--ts must be 'estimate' or 'known:<seconds>'");
    const MeasurementSet set = parse_measurement_csv(args.input);
    const Scenario scenario = parse_scenario_json(args.scenario_path);
    const EcefPoint tag_position = scenario.tag.position;

    AbsOptions options;
    options.tol_m = args.tol_m;
    options.max_iter = args.max_iter;

    std::map<int, ScatterDelayEstimator> estimators;
    json solutions = json::array();
    std::vector<TrajectoryPoint> trajectory;

    for (const std::int64_t epoch : set.epochs()) {
        const auto slice = set.epoch_slice(epoch);
        std::vector<Measurement> direct, scattered;
        std::size_t unlabeled = 0;
        for (const auto& m : slice) {
            if (m.scattered == ScatterClass::direct) direct.push_back(m);
            else if (m.scattered == ScatterClass::scattered) scattered.push_back(m);
            else ++unlabeled;
        }

        json entry;
        entry["epoch_ms"] = epoch;
        if (unlabeled > 0) entry["unlabeled_rows"] = unlabeled;
        const auto satellites = positions_at(scenario.satellites, epoch);

        try {
            TagConfig tag{tag_position};
            std::map<int, double> ts_by_svid;
            std::vector<Measurement> rows = direct;

            if (args.ts_mode == "known") {
                tag.t_s = args.ts_known_s;
                tag.t_s_valid = true;
                rows.insert(rows.end(), scattered.begin(), scattered.end());
            } else {
                // Estimate mode: refresh the per-svid delay states from a
                // direct-only fix, then use them on the scattered rows.
                if (direct.size() >= 4) {
                    const PositionSolution fix =
                        solve_position(direct, satellites, tag, {}, {}, options);
                    for (const auto& [svid, t_b2] : extract_scattered_bias(
                             scattered, satellites, tag_position, fix.position)) {
                        auto [it, inserted] =
                            estimators.try_emplace(svid, ScatterDelayEstimator(args.alpha));
                        it->second.update({fix.clock_bias_direct, t_b2});
                    }
                }
                for (const auto& m : scattered) {
                    const auto it = estimators.find(m.svid);
                    if (it != estimators.end() && it->second.valid()) {
                        ts_by_svid[m.svid] = it->second.estimate();
                        rows.push_back(m);
                    }
                }
                entry["scattered_rows_used"] = rows.size() - direct.size();
            }

            const PositionSolution sol =
                solve_position(rows, satellites, tag, ts_by_svid, {}, options);
            entry["solved"] = true;
            entry["position_m"] = point_json(sol.position);
            entry["clock_bias_direct_s"] = sol.clock_bias_direct;
            entry["clock_bias_scattered_s"] = sol.clock_bias_scattered;
            entry["iterations"] = sol.iterations;
            entry["residual_rms_m"] = sol.residual_rms;
            entry["dop"] = sol.dop;
            entry["rows"] = rows.size();
            trajectory.push_back({epoch, sol.position.x, sol.position.y, sol.position.z});
        } catch (const Error& e) {
            entry["solved"] = false;
            entry["reason"] = e.what();
        }
        solutions.push_back(entry);
    }

    write_text_file(args.out_dir + "/solutions.json", solutions.dump(2) + "\n");
    write_text_file(args.out_dir + "/trajectory.csv", serialize_trajectory_csv(trajectory));

    json config;
    config["input"] = args.input;
    config["scenario"] = args.scenario_path;
    config["ts_mode"] = args.ts_mode;
    if (args.ts_mode == "known") config["ts_known_s"] = args.ts_known_s;
    config["tol_m"] = args.tol_m;
    config["max_iter"] = args.max_iter;
    config["alpha"] = args.alpha;
    write_manifest(args.out_dir, "solve-abs", config, {args.input, args.scenario_path},
                   {"solutions.json", "trajectory.csv"});
    return 0;
}

int cmd_solve_diff(const SolveDiffArgs& args) {
    ensure_out_dir(args.out_dir);
    if (args.mode != "phase" && args.mode != "pseudorange")
        throw DomainError("--mode must be 'phase' or 'pseudorange'");
    const MeasurementSet set = parse_measurement_csv(args.input);
    const Scenario scenario = parse_scenario_json(args.scenario_path);
    const EcefPoint tag = scenario.tag.position;
    const EnuFrame tag_frame(tag);

    std::optional<FloorPlanConstraint> plan;
    if (!args.floor_plan_path.empty()) plan = parse_floor_plan_json(args.floor_plan_path);

    const PairMode mode =
        args.mode == "phase" ? PairMode::carrier_phase : PairMode::pseudorange;
    const auto pairs = build_phase_pairs(set, scenario.satellites, tag, args.window_ms, mode);

    std::map<std::int64_t, std::vector<PhasePair>> by_epoch;
    for (const auto& p : pairs) by_epoch[p.t2_ms].push_back(p);

    DiffOptions options;
    options.tol_m = args.tol_m;
    options.max_iter = args.max_iter;

    json solutions = json::array();
    std::vector<TrajectoryPoint> trajectory;
    for (const auto& [epoch, epoch_pairs] : by_epoch) {
        json entry;
        entry["epoch_ms"] = epoch;
        entry["pairs"] = epoch_pairs.size();
        try {
            const BaseVectorSolution sol = solve_base_vector(epoch_pairs, {}, options);
            entry["solved"] = true;
            entry["b_m"] = json::array({sol.b.x(), sol.b.y(), sol.b.z()});
            entry["delta_t_s"] = sol.delta_t;
            entry["iterations"] = sol.iterations;
            entry["residual_rms_m"] = sol.residual_rms;
            bool accepted = true;
            if (plan) {
                const FloorPlanDecision decision = apply_floor_plan(sol, *plan, tag_frame);
                accepted = decision.accepted;
                entry["floor_plan"] =
                    decision.accepted ? std::string("accepted")
                                      : "rejected: " + decision.reason;
            }
            const EcefPoint position = recover_position(tag, sol);
            entry["position_m"] = point_json(position);
            if (accepted)
                trajectory.push_back({epoch, position.x, position.y, position.z});
        } catch (const Error& e) {
            entry["solved"] = false;
            entry["reason"] = e.what();
        }
        solutions.push_back(entry);
    }

    write_text_file(args.out_dir + "/solutions.json", solutions.dump(2) + "\n");
    write_text_file(args.out_dir + "/trajectory.csv", serialize_trajectory_csv(trajectory));

    json config;
    config["input"] = args.input;
    config["scenario"] = args.scenario_path;
    config["mode"] = args.mode;
    config["window_ms"] = args.window_ms;
    config["tol_m"] = args.tol_m;
    config["max_iter"] = args.max_iter;
    std::vector<std::string> inputs{args.input, args.scenario_path};
    if (!args.floor_plan_path.empty()) {
        config["floor_plan"] = args.floor_plan_path;
        inputs.push_back(args.floor_plan_path);
    }
    write_manifest(args.out_dir, "solve-diff", config, inputs,
                   {"solutions.json", "trajectory.csv"});
    return 0;
}

int cmd_convert(const ConvertArgs& args) {
    ensure_out_dir(args.out_dir);
    RawConvertReport report;
    const MeasurementSet set = convert_raw_log(args.input, args.clock_model, &report);
    write_measurement_csv(set, args.out_dir + "/measurements.csv");

    json rep;
    rep["converted"] = report.converted;
    json skipped = json::array();
    for (const auto& [line, reason] : report.skipped)
        skipped.push_back({{"line", line}, {"reason", reason}});
    rep["skipped"] = skipped;
    write_text_file(args.out_dir + "/convert_report.json", rep.dump(2) + "\n");

    json config;
    config["input"] = args.input;
    config["clock_model"] = args.clock_model;
    write_manifest(args.out_dir, "convert", config, {args.input},
                   {"measurements.csv", "convert_report.json"});
    return 0;
}

int cmd_report(const ReportArgs& args) {
    ensure_out_dir(args.out_dir);
    const Report report = make_report(args.solutions_csv, args.truth_csv);

    std::string errors = "epoch_ms,error_m\n";
    for (const auto& [epoch, err] : report.errors) {
        errors += format_int(epoch);
        errors += ',';
        errors += format_double(err);
        errors += '\n';
    }
    write_text_file(args.out_dir + "/errors.csv", errors);

    std::string cdf = "error_m,cdf\n";
    for (const auto& [err, q] : report.cdf) {
        cdf += format_double(err);
        cdf += ',';
        cdf += format_double(q);
        cdf += '\n';
    }
    write_text_file(args.out_dir + "/cdf.csv", cdf);

    json summary;
    summary["count"] = report.summary.count;
    summary["median_m"] = report.summary.median_m;
    summary["p95_m"] = report.summary.p95_m;
    summary["max_m"] = report.summary.max_m;
    write_text_file(args.out_dir + "/summary.json", summary.dump(2) + "\n");

    json config;
    config["solutions"] = args.solutions_csv;
    config["truth"] = args.truth_csv;
    write_manifest(args.out_dir, "report", config, {args.solutions_csv, args.truth_csv},
                   {"errors.csv", "cdf.csv", "summary.json"});
    return 0;
}

std::string rf_gamma_json(double zl_re, double zl_im, double za_re, double za_im) {
    const auto gamma = reflection_coefficient({zl_re, zl_im}, {za_re, za_im});
    json out;
    out["gamma_re"] = gamma.real();
    out["gamma_im"] = gamma.imag();
    out["gain"] = std::norm(gamma);
    out["gain_db"] = reflection_gain_db({zl_re, zl_im}, {za_re, za_im});
    return out.dump(2) + "\n";
}

std::string rf_resonance_json(std::optional<double> l, std::optional<double> c,
                              std::optional<double> f_c) {
    json out;
    if (l && c && !f_c) {
        out["f_c_hz"] = resonant_frequency(*l, *c);
    } else if (f_c && c && !l) {
        out["l_h"] = solve_inductance(*f_c, *c);
    } else if (f_c && l && !c) {
        // symmetric in l and c, so the same solve applies
        out["c_f"] = solve_inductance(*f_c, *l);
    } else {
        throw DomainError("rf resonance: give exactly two of --l, --c, --fc");
    }
    return out.dump(2) + "\n";
}

std::string rf_q_json(double l, double c, double r) {
    const ResonatorSpec spec = make_resonator(l, c, r);
    json out;
    out["f_c_hz"] = spec.f_center;
    out["q"] = quality_factor(spec);
    return out.dump(2) + "\n";
}

std::string rf_ceq_json(double c_j, double c_p, double l_p, double r, double r_nr,
                        double f_c) {
    DiodeModel diode;
    diode.c_j = c_j;
    diode.c_p = c_p;
    diode.l_p = l_p;
    diode.r = r;
    json out;
    out["c_eq_f"] = equivalent_parallel_capacitance(diode, r_nr, f_c);
    out["c_eq_pf"] = out["c_eq_f"].get<double>() * 1e12;
    return out.dump(2) + "\n";
}

std::string rf_nf_json(double r, double r_nr, double f, double f_r0, double k_a) {
    DiodeModel diode;
    diode.r = r;
    diode.k_a = k_a;
    diode.f_r0 = f_r0;
    const double nf = noise_figure(diode, r_nr, f);
    json out;
    out["nf"] = nf;
    out["nf_db"] = 10.0 * std::log10(nf);
    return out.dump(2) + "\n";
}

std::string rf_bias_scan_json(const std::string& iv_csv, int degree, double bias_min,
                              double bias_max, double step, double f, double f_r0,
                              double k_a) {
    DiodeModel diode;
    diode.iv_samples = parse_iv_csv(iv_csv);
    diode.fit_degree = degree;
    diode.k_a = k_a;
    diode.f_r0 = f_r0;
    const BiasScanResult result =
        minimize_noise_figure(diode, {bias_min, bias_max}, f, step);
    json out;
    out["bias_v"] = result.bias;
    out["nf"] = result.nf;
    out["nf_db"] = 10.0 * std::log10(result.nf);
    out["r_nr_ohm"] = result.r_nr;
    return out.dump(2) + "\n";
}

} // namespace mirrorfix::app
