#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mirrorfix/errors.hpp"
#include "mirrorfix/measurements.hpp"

namespace mirrorfix {

/// Square-wave ON/OFF keying: one cycle is period_ms long, the tag is ON for
/// the first duty fraction of the cycle starting at phase_ms.
struct SwitchingPattern {
    std::int64_t period_ms = 20000;
    double duty = 0.5;
    std::int64_t phase_ms = 0; // estimated by detect_pattern
};

/// True when the tag is ON at the given epoch.
bool pattern_on(const SwitchingPattern& pattern, std::int64_t epoch_ms);

struct DetectionResult {
    bool detected = false;
    std::optional<double> gain_db; // set only when detected
    std::int64_t phase_ms = 0;
    double score = 0.0; // normalized correlation in [-1, 1]
    std::vector<ScatterClass> per_epoch_labels;
};

struct DetectOptions {
    double threshold_db = 3.0; // the coverage criterion
    double score_min = 0.6;
};

/// Correlates a C/N0 time series against the ON/OFF square wave at every
/// integer-epoch phase offset and labels each epoch scattered or direct.
/// The pattern's phase field is ignored (it is what gets estimated).
DetectionResult detect_pattern(std::span<const std::pair<std::int64_t, double>> series,
                               const SwitchingPattern& pattern,
                               const DetectOptions& options = {});

/// Mean C/N0 difference (dB) between ON and OFF samples.
double coverage_gain(std::span<const double> series_on, std::span<const double> series_off);

} // namespace mirrorfix
