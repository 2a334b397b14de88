#include <benchmark/benchmark.h>

#include "mirrorfix/simulator.hpp"
#include "mirrorfix/solver_abs.hpp"
#include "mirrorfix/solver_diff.hpp"
#include "mirrorfix/tagdetect.hpp"

using namespace mirrorfix;

namespace {

EcefPoint surface_point(double lat, double lon, double height = 0.0) {
    const double r = constants::earth_radius + height;
    return {r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon),
            r * std::sin(lat)};
}

Scenario bench_scenario(int n_sats, int epochs) {
    Scenario s;
    s.epochs = {0, 1000, epochs};
    s.tag.position = surface_point(0.5, 0.2, 5.0);
    s.tag.pattern = {20000, 0.5, 0};
    const EnuFrame frame(s.tag.position);
    s.receiver.emplace_back(0, frame.to_ecef({8.0, -5.0, -2.0}));
    s.clock.bias_s = 2.5e-4;
    s.noise = {0.0, 0.0, 0.0};
    const double els[8] = {60, 35, 70, 25, 50, 40, 80, 30};
    for (int i = 0; i < n_sats; ++i) {
        const double az = (i * 360.0 / n_sats + 10.0) * constants::deg2rad;
        const double el = els[i % 8] * constants::deg2rad;
        const Eigen::Vector3d enu{std::cos(el) * std::sin(az), std::cos(el) * std::cos(az),
                                  std::sin(el)};
        s.satellites.add(i + 1, frame.to_ecef(enu * 2.2e7));
    }
    return s;
}

std::map<int, EcefPoint> positions(const Scenario& s) {
    std::map<int, EcefPoint> out;
    for (const auto& [svid, model] : s.satellites.satellites())
        out[svid] = s.satellites.position(svid, 0.0);
    return out;
}

void BM_SolveAbsFiveSats(benchmark::State& state) {
    const Scenario s = bench_scenario(5, 1);
    const SimulationOutput out = generate(s);
    std::vector<Measurement> direct;
    for (const auto& m : out.measurements.rows)
        if (m.scattered == ScatterClass::direct) direct.push_back(m);
    const auto sats = positions(s);
    for (auto _ : state) {
        const PositionSolution sol = solve_position(direct, sats, {s.tag.position}, {}, {});
        benchmark::DoNotOptimize(sol);
    }
}
BENCHMARK(BM_SolveAbsFiveSats);

void BM_SolveDiffEightPairs(benchmark::State& state) {
    const Scenario s = bench_scenario(8, 1);
    const SimulationOutput out = generate(s);
    const auto pairs = build_phase_pairs(out.measurements, s.satellites, s.tag.position, 40000);
    for (auto _ : state) {
        const BaseVectorSolution sol = solve_base_vector(pairs, {});
        benchmark::DoNotOptimize(sol);
    }
}
BENCHMARK(BM_SolveDiffEightPairs);

void BM_DetectPattern(benchmark::State& state) {
    SwitchingPattern pattern{20000, 0.5, 4000};
    Prng rng(1);
    std::vector<std::pair<std::int64_t, double>> series;
    for (int i = 0; i < 600; ++i) {
        const std::int64_t epoch = i * 1000;
        series.emplace_back(epoch, 38.0 + (pattern_on(pattern, epoch) ? 5.0 : 0.0) +
                                       rng.gaussian());
    }
    for (auto _ : state) {
        const DetectionResult r = detect_pattern(series, {20000, 0.5, 0});
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_DetectPattern);

void BM_SimulateMinute(benchmark::State& state) {
    Scenario s = bench_scenario(8, 60);
    s.noise = {3.0, 0.02, 1.0};
    for (auto _ : state) {
        const SimulationOutput out = generate(s);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_SimulateMinute);

} // namespace

BENCHMARK_MAIN();
