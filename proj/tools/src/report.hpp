#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mirrorfix::app {

inline constexpr const char* trajectory_csv_header = "epoch_ms,x_m,y_m,z_m";

struct TrajectoryPoint {
    std::int64_t epoch_ms = 0;
    double x = 0.0, y = 0.0, z = 0.0;
};

std::vector<TrajectoryPoint> parse_trajectory_csv(const std::string& path);
std::string serialize_trajectory_csv(const std::vector<TrajectoryPoint>& points);

struct ReportSummary {
    std::size_t count = 0;
    double median_m = 0.0;
    double p95_m = 0.0;
    double max_m = 0.0;
};

struct Report {
    std::vector<std::pair<std::int64_t, double>> errors; // per-epoch 3-D error
    std::vector<std::pair<double, double>> cdf;          // sorted (error, fraction)
    ReportSummary summary;
};

/// Joins solved positions with truth by epoch. Every solution epoch must
/// exist in the truth file; a miss raises JoinMismatch naming the epoch.
Report make_report(const std::string& solutions_csv, const std::string& truth_csv);

} // namespace mirrorfix::app
