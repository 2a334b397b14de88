#include "mirrorfix/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "mirrorfix/solver_abs.hpp"
#include "mirrorfix/textio.hpp"

namespace mirrorfix {

namespace {
constexpr double c_light = constants::speed_of_light;
constexpr double two_pow_neg53 = 1.0 / 9007199254740992.0;
} // namespace

double Prng::uniform() {
    return static_cast<double>(next_u64() >> 11) * two_pow_neg53;
}

double Prng::gaussian() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * constants::pi * u2);
}

long long Prng::uniform_int(long long lo, long long hi) {
    if (lo > hi) throw DomainError("uniform_int: empty range");
    const double span = static_cast<double>(hi - lo) + 1.0;
    const auto offset = static_cast<long long>(std::floor(uniform() * span));
    return lo + std::min(offset, hi - lo);
}

bool visible(const EcefPoint& sat, const EcefPoint& rx, double elevation_mask_rad) {
    const Eigen::Vector3d r = rx.vec();
    const Eigen::Vector3d d = sat.vec() - r;
    const double rn = r.norm();
    const double dn = d.norm();
    if (rn == 0.0 || dn == 0.0) return false;
    const double elevation = std::asin(std::clamp(r.dot(d) / (rn * dn), -1.0, 1.0));
    if (elevation < elevation_mask_rad) return false;
    // Reject paths whose interior dips inside the sphere (receivers above
    // the surface looking past the limb).
    const double t = -r.dot(d) / (dn * dn);
    if (t > 0.0 && t < 1.0) {
        const double closest = (r + t * d).norm();
        if (closest < constants::earth_radius) return false;
    }
    return true;
}

EcefPoint receiver_at(const Scenario& scenario, std::int64_t epoch_ms) {
    const EcefPoint* best = nullptr;
    for (const auto& [e, p] : scenario.receiver) {
        if (e <= epoch_ms) best = &p;
    }
    return best ? *best : scenario.receiver.front().second;
}

void validate(const Scenario& scenario) {
    if (scenario.schema != 1)
        throw InvalidScenario("scenario: unsupported schema version");
    if (scenario.epochs.step_ms <= 0) throw InvalidScenario("scenario: step_ms must be > 0");
    if (scenario.epochs.count < 0) throw InvalidScenario("scenario: count must be >= 0");
    if (scenario.satellites.satellites().empty())
        throw InvalidScenario("scenario: no satellites");
    if (scenario.receiver.empty())
        throw InvalidScenario("scenario: receiver trajectory is empty");
    for (std::size_t i = 1; i < scenario.receiver.size(); ++i)
        if (scenario.receiver[i].first <= scenario.receiver[i - 1].first)
            throw InvalidScenario("scenario: trajectory epochs must increase");
    if (!(scenario.tag.pattern.duty > 0.0 && scenario.tag.pattern.duty < 1.0))
        throw InvalidScenario("scenario: duty must be in (0, 1)");
    if (scenario.tag.pattern.period_ms <= 0)
        throw InvalidScenario("scenario: switching period must be > 0");
    if (scenario.noise.sigma_pseudorange_m < 0.0 || scenario.noise.sigma_phase_m < 0.0 ||
        scenario.noise.sigma_cn0_db < 0.0)
        throw InvalidScenario("scenario: noise sigmas must be >= 0");
    if (scenario.tag.processing_delay_s < 0.0)
        throw InvalidScenario("scenario: processing delay must be >= 0");
    for (const auto& [svid, model] : scenario.satellites.satellites())
        if (const auto* orbit = std::get_if<CircularOrbit>(&model)) validate(*orbit);
}

SimulationOutput generate(const Scenario& scenario) {
    validate(scenario);
    Prng rng(scenario.seed);

    // Ambiguities first, one per (svid, class) lock interval, svid order.
    std::map<int, long long> n_direct, n_scattered;
    for (const auto& [svid, model] : scenario.satellites.satellites()) {
        n_direct[svid] = rng.uniform_int(-1000000, 1000000);
        n_scattered[svid] = rng.uniform_int(-1000000, 1000000);
    }

    SimulationOutput out;
    out.measurements.wavelength = constants::gps_l1_wavelength;
    for (const auto& [svid, model] : scenario.satellites.satellites())
        out.truth.svids.push_back(svid);

    const double lambda = out.measurements.wavelength;
    const double t0 = static_cast<double>(scenario.epochs.start_ms) * 1e-3;
    for (int i = 0; i < scenario.epochs.count; ++i) {
        const std::int64_t epoch =
            scenario.epochs.start_ms + static_cast<std::int64_t>(i) * scenario.epochs.step_ms;
        const double t = static_cast<double>(epoch) * 1e-3;
        const EcefPoint rx = receiver_at(scenario, epoch);
        const double t_b = scenario.clock.bias_s + scenario.clock.drift_s_per_s * (t - t0);
        const bool tag_on = pattern_on(scenario.tag.pattern, epoch);
        const double tag_rx = range(scenario.tag.position, rx);

        TruthEpoch truth;
        truth.epoch_ms = epoch;
        truth.receiver = rx;
        truth.t_b = t_b;

        for (const auto& [svid, model] : scenario.satellites.satellites()) {
            const EcefPoint sat = scenario.satellites.position(svid, t);
            const double direct = range(sat, rx);
            const double tag_path = range(sat, scenario.tag.position) + tag_rx;
            const VirtualSatellite vs =
                make_virtual_satellite(sat, scenario.tag.position, svid);
            const double virtual_range = range(vs.position, rx);
            // t_s makes rho_s - c*t_s equal the virtual satellite's
            // pseudorange identically; >= processing delay by the triangle
            // inequality.
            const double t_s = (tag_path - virtual_range) / c_light +
                               scenario.tag.processing_delay_s;
            truth.direct_range_m[svid] = direct;
            truth.tag_path_m[svid] = tag_path;
            truth.t_s[svid] = t_s;

            const bool direct_visible =
                scenario.visibility.blocked_svids.count(svid) == 0 &&
                visible(sat, rx, scenario.visibility.elevation_mask_rad);
            if (direct_visible) {
                // Draw order per row: pseudorange, phase, cn0.
                const double rho =
                    direct + c_light * t_b + scenario.noise.sigma_pseudorange_m * rng.gaussian();
                const double phi = direct + c_light * t_b +
                                   lambda * static_cast<double>(n_direct[svid]) +
                                   scenario.noise.sigma_phase_m * rng.gaussian();
                const double cn0 = std::clamp(scenario.cn0.baseline_dbhz +
                                                  scenario.noise.sigma_cn0_db * rng.gaussian(),
                                              0.0, 70.0);
                out.measurements.rows.push_back({epoch, svid, cn0, rho, phi, true,
                                                 ScatterClass::direct});
            }

            const bool scatters =
                tag_on &&
                (scenario.tag.scatter_svids.empty() ||
                 scenario.tag.scatter_svids.count(svid) != 0) &&
                visible(sat, scenario.tag.position, scenario.visibility.elevation_mask_rad);
            if (scatters) {
                const double scattered_range = tag_path + c_light * scenario.tag.processing_delay_s;
                const double rho = scattered_range + c_light * t_b +
                                   scenario.noise.sigma_pseudorange_m * rng.gaussian();
                const double phi = scattered_range + c_light * t_b +
                                   lambda * static_cast<double>(n_scattered[svid]) +
                                   scenario.noise.sigma_phase_m * rng.gaussian();
                const double d = std::max(tag_rx, scenario.cn0.reference_distance_m);
                const double rolloff = scenario.cn0.rolloff_db_per_decade *
                                       std::log10(d / scenario.cn0.reference_distance_m);
                const double gain = std::max(0.0, scenario.tag.gain_db - rolloff);
                const double cn0 = std::clamp(scenario.cn0.baseline_dbhz + gain +
                                                  scenario.noise.sigma_cn0_db * rng.gaussian(),
                                              0.0, 70.0);
                out.measurements.rows.push_back({epoch, svid, cn0, rho, phi, true,
                                                 ScatterClass::scattered});
            }
        }
        out.truth.epochs.push_back(std::move(truth));
    }
    return out;
}

std::string serialize_truth_csv(const TruthRecord& truth) {
    std::string out = "epoch_ms,truth_x,truth_y,truth_z,t_b";
    for (int svid : truth.svids) out += ",t_s_" + format_int(svid);
    out += '\n';
    for (const auto& e : truth.epochs) {
        out += format_int(e.epoch_ms);
        out += ',';
        out += format_double(e.receiver.x);
        out += ',';
        out += format_double(e.receiver.y);
        out += ',';
        out += format_double(e.receiver.z);
        out += ',';
        out += format_double(e.t_b);
        for (int svid : truth.svids) {
            out += ',';
            const auto it = e.t_s.find(svid);
            out += format_double(it == e.t_s.end() ? 0.0 : it->second);
        }
        out += '\n';
    }
    return out;
}

void write_truth_csv(const TruthRecord& truth, const std::string& path) {
    write_text_file(path, serialize_truth_csv(truth));
}

TruthRecord parse_truth_csv(const std::string& path) {
    const std::string text = read_text_file(path);
    TruthRecord truth;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        const std::size_t eol = text.find('\n', pos);
        const std::string_view line =
            trim(std::string_view(text).substr(pos, (eol == std::string::npos ? text.size() : eol) - pos));
        pos = (eol == std::string::npos) ? text.size() : eol + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (line_no == 1) {
            if (fields.size() < 5 || fields[0] != "epoch_ms" || fields[1] != "truth_x" ||
                fields[2] != "truth_y" || fields[3] != "truth_z" || fields[4] != "t_b")
                throw SchemaMismatch("truth csv: expected header epoch_ms,truth_x,truth_y,"
                                     "truth_z,t_b,t_s_<svid>...");
            for (std::size_t k = 5; k < fields.size(); ++k) {
                const std::string_view f = trim(fields[k]);
                int svid = 0;
                if (f.substr(0, 4) != "t_s_" || !parse_int(f.substr(4), svid))
                    throw SchemaMismatch("truth csv: bad t_s column name");
                truth.svids.push_back(svid);
            }
            continue;
        }
        if (fields.size() != 5 + truth.svids.size())
            throw MalformedRow(line_no, "truth csv: wrong field count");
        TruthEpoch e;
        if (!parse_int64(trim(fields[0]), e.epoch_ms) ||
            !parse_double(trim(fields[1]), e.receiver.x) ||
            !parse_double(trim(fields[2]), e.receiver.y) ||
            !parse_double(trim(fields[3]), e.receiver.z) ||
            !parse_double(trim(fields[4]), e.t_b))
            throw MalformedRow(line_no, "truth csv: non-numeric field");
        for (std::size_t k = 0; k < truth.svids.size(); ++k) {
            double v = 0.0;
            if (!parse_double(trim(fields[5 + k]), v))
                throw MalformedRow(line_no, "truth csv: non-numeric t_s");
            e.t_s[truth.svids[k]] = v;
        }
        truth.epochs.push_back(std::move(e));
    }
    if (truth.epochs.empty() && truth.svids.empty() && line_no == 0)
        throw SchemaMismatch("truth csv: empty file");
    return truth;
}

} // namespace mirrorfix
