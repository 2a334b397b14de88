#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mirrorfix/errors.hpp"
#include "mirrorfix/geodesy.hpp"
#include "mirrorfix/measurements.hpp"
#include "mirrorfix/tagdetect.hpp"

namespace mirrorfix {

/// Deterministic draw source with a pinned algorithm so fixtures are
/// reproducible byte for byte (documented in docs/formats.md):
///   engine      mt19937_64 seeded with `seed`
///   uniform()   (next_u64() >> 11) * 2^-53, in [0, 1)
///   gaussian()  Box-Muller cosine branch from two uniforms
///   uniform_int(lo, hi)  lo + floor(uniform() * (hi - lo + 1)), inclusive
class Prng {
public:
    explicit Prng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t next_u64() { return engine_(); }
    double uniform();
    double gaussian();
    long long uniform_int(long long lo, long long hi);

private:
    std::mt19937_64 engine_;
};

struct EpochPlan {
    std::int64_t start_ms = 0;
    std::int64_t step_ms = 1000;
    int count = 0;
};

struct ClockModel {
    double bias_s = 0.0;
    double drift_s_per_s = 0.0;
};

struct NoiseModel {
    double sigma_pseudorange_m = 3.0;
    double sigma_phase_m = 0.02;
    double sigma_cn0_db = 1.0;
};

/// Scattered C/N0 = direct C/N0 + gain - rolloff_db_per_decade *
/// log10(d / reference_distance), clamped so the tag never attenuates.
struct Cn0Model {
    double baseline_dbhz = 40.0;
    double rolloff_db_per_decade = 4.38;
    double reference_distance_m = 2.0;
};

struct TagSpec {
    EcefPoint position;
    double processing_delay_s = 0.0;
    SwitchingPattern pattern;
    double gain_db = 9.0;
    std::set<int> scatter_svids; // empty = every satellite the tag can see
};

struct VisibilityPolicy {
    double elevation_mask_rad = 5.0 * constants::deg2rad;
    std::set<int> blocked_svids; // forced NLoS toward the receiver
};

struct Scenario {
    int schema = 1;
    std::uint64_t seed = 0;
    EpochPlan epochs;
    Constellation satellites;
    TagSpec tag;
    std::vector<std::pair<std::int64_t, EcefPoint>> receiver; // step-function trajectory
    ClockModel clock;
    NoiseModel noise;
    Cn0Model cn0;
    VisibilityPolicy visibility;
};

/// Per-epoch ground truth; per-svid maps cover every configured satellite.
struct TruthEpoch {
    std::int64_t epoch_ms = 0;
    EcefPoint receiver;
    double t_b = 0.0; // s
    std::map<int, double> direct_range_m;
    std::map<int, double> tag_path_m; // |sat - tag| + |tag - rx|
    std::map<int, double> t_s;        // s, see generate()
};

struct TruthRecord {
    std::vector<int> svids;
    std::vector<TruthEpoch> epochs;
};

struct SimulationOutput {
    MeasurementSet measurements;
    TruthRecord truth;
};

/// True iff the sat-rx segment clears the spherical Earth and the elevation
/// at rx is at least the mask.
bool visible(const EcefPoint& sat, const EcefPoint& rx, double elevation_mask_rad);

/// Deterministic measurement generation with exact ground truth.
///
/// Direct rows:    rho = |sat - rx| + c*t_b,  Phi = rho + lambda*N.
/// Scattered rows: the pseudorange carries the tag-path range plus the
/// processing delay; t_s is defined against the virtual satellite so that
/// rho_s - c*t_s = |P_vs - rx| + c*t_b holds identically, which keeps the
/// virtual-satellite solver exact at zero noise.
/// Gaussian noises come from one Prng in a documented draw order.
SimulationOutput generate(const Scenario& scenario);

/// Receiver truth position at an epoch (latest trajectory entry not after it).
EcefPoint receiver_at(const Scenario& scenario, std::int64_t epoch_ms);

void validate(const Scenario& scenario); // throws InvalidScenario

// Scenario JSON (schema 1) and truth CSV codecs.
Scenario parse_scenario_json_text(const std::string& text);
Scenario parse_scenario_json(const std::string& path);
std::string serialize_truth_csv(const TruthRecord& truth);
void write_truth_csv(const TruthRecord& truth, const std::string& path);
TruthRecord parse_truth_csv(const std::string& path);

} // namespace mirrorfix
