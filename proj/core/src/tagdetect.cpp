#include "mirrorfix/tagdetect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mirrorfix {

namespace {

std::int64_t positive_mod(std::int64_t a, std::int64_t m) {
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

void validate_pattern(const SwitchingPattern& p) {
    if (p.period_ms <= 0) throw DomainError("switching pattern: period must be positive");
    if (!(p.duty > 0.0 && p.duty < 1.0))
        throw DomainError("switching pattern: duty must be in (0, 1)");
}

} // namespace

bool pattern_on(const SwitchingPattern& pattern, std::int64_t epoch_ms) {
    validate_pattern(pattern);
    const auto on_ms = static_cast<std::int64_t>(
        std::llround(pattern.duty * static_cast<double>(pattern.period_ms)));
    return positive_mod(epoch_ms - pattern.phase_ms, pattern.period_ms) < on_ms;
}

DetectionResult detect_pattern(std::span<const std::pair<std::int64_t, double>> series,
                               const SwitchingPattern& pattern,
                               const DetectOptions& options) {
    validate_pattern(pattern);
    if (series.size() < 2) throw InsufficientSpan("detect_pattern: need at least 2 samples");
    std::int64_t step = std::numeric_limits<std::int64_t>::max();
    for (std::size_t i = 1; i < series.size(); ++i) {
        const std::int64_t gap = series[i].first - series[i - 1].first;
        if (gap <= 0) throw DomainError("detect_pattern: epochs must be strictly increasing");
        step = std::min(step, gap);
    }
    const std::int64_t span = series.back().first - series.front().first;
    if (span + step < 2 * pattern.period_ms)
        throw InsufficientSpan("detect_pattern: series spans fewer than 2 full periods");

    const std::size_t n = series.size();
    double mean = 0.0;
    for (const auto& [e, v] : series) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& [e, v] : series) var += (v - mean) * (v - mean);

    // Candidate ON-start offsets: every integer number of sample steps
    // within one cycle.
    SwitchingPattern candidate = pattern;
    double best_score = -std::numeric_limits<double>::infinity();
    std::int64_t best_phase = 0;
    for (std::int64_t phase = 0; phase < pattern.period_ms; phase += step) {
        candidate.phase_ms = phase;
        double sum_on = 0.0, sum_off = 0.0;
        std::size_t n_on = 0, n_off = 0;
        for (const auto& [e, v] : series) {
            if (pattern_on(candidate, e)) {
                sum_on += v;
                ++n_on;
            } else {
                sum_off += v;
                ++n_off;
            }
        }
        if (n_on == 0 || n_off == 0) continue;
        // Pearson correlation against the +/-1 template; both series centered.
        const double t_mean = (static_cast<double>(n_on) - static_cast<double>(n_off)) /
                              static_cast<double>(n);
        double cov = 0.0, t_var = 0.0;
        for (const auto& [e, v] : series) {
            const double t = pattern_on(candidate, e) ? 1.0 : -1.0;
            cov += (v - mean) * (t - t_mean);
            t_var += (t - t_mean) * (t - t_mean);
        }
        const double denom = std::sqrt(var * t_var);
        const double score = denom > 0.0 ? cov / denom : 0.0;
        if (score > best_score) {
            best_score = score;
            best_phase = phase;
        }
    }
    if (!std::isfinite(best_score))
        throw InsufficientSpan("detect_pattern: no phase offset separates ON and OFF");

    candidate.phase_ms = best_phase;
    double sum_on = 0.0, sum_off = 0.0;
    std::size_t n_on = 0, n_off = 0;
    DetectionResult result;
    result.per_epoch_labels.reserve(n);
    for (const auto& [e, v] : series) {
        if (pattern_on(candidate, e)) {
            sum_on += v;
            ++n_on;
            result.per_epoch_labels.push_back(ScatterClass::scattered);
        } else {
            sum_off += v;
            ++n_off;
            result.per_epoch_labels.push_back(ScatterClass::direct);
        }
    }
    const double gain = sum_on / static_cast<double>(n_on) -
                        sum_off / static_cast<double>(n_off);
    result.phase_ms = best_phase;
    result.score = best_score;
    result.detected = gain >= options.threshold_db && best_score >= options.score_min;
    if (result.detected) result.gain_db = gain;
    return result;
}

double coverage_gain(std::span<const double> series_on, std::span<const double> series_off) {
    if (series_on.empty() || series_off.empty())
        throw EmptyInput("coverage_gain: both series must be nonempty");
    double on = 0.0, off = 0.0;
    for (double v : series_on) on += v;
    for (double v : series_off) off += v;
    return on / static_cast<double>(series_on.size()) -
           off / static_cast<double>(series_off.size());
}

} // namespace mirrorfix
