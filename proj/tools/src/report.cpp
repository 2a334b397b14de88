#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mirrorfix/errors.hpp"
#include "mirrorfix/simulator.hpp"
#include "mirrorfix/textio.hpp"

namespace mirrorfix::app {

std::vector<TrajectoryPoint> parse_trajectory_csv(const std::string& path) {
    const std::string text = read_text_file(path);
    std::vector<TrajectoryPoint> points;
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
        const std::size_t eol = text.find('\n', pos);
        const std::string_view line = trim(
            std::string_view(text).substr(pos, (eol == std::string::npos ? text.size() : eol) - pos));
        pos = (eol == std::string::npos) ? text.size() : eol + 1;
        ++line_no;
        if (line_no == 1) {
            if (line != trajectory_csv_header)
                throw SchemaMismatch(std::string("trajectory csv: expected header '") +
                                     trajectory_csv_header + "'");
            continue;
        }
        if (line.empty()) continue;
        const auto f = split_fields(line);
        TrajectoryPoint p;
        if (f.size() != 4 || !parse_int64(trim(f[0]), p.epoch_ms) ||
            !parse_double(trim(f[1]), p.x) || !parse_double(trim(f[2]), p.y) ||
            !parse_double(trim(f[3]), p.z))
            throw MalformedRow(line_no, "trajectory csv: expected epoch_ms,x_m,y_m,z_m");
        points.push_back(p);
    }
    return points;
}

std::string serialize_trajectory_csv(const std::vector<TrajectoryPoint>& points) {
    std::string out = trajectory_csv_header;
    out += '\n';
    for (const auto& p : points) {
        out += format_int(p.epoch_ms);
        out += ',';
        out += format_double(p.x);
        out += ',';
        out += format_double(p.y);
        out += ',';
        out += format_double(p.z);
        out += '\n';
    }
    return out;
}

Report make_report(const std::string& solutions_csv, const std::string& truth_csv) {
    const auto solutions = parse_trajectory_csv(solutions_csv);
    const TruthRecord truth = parse_truth_csv(truth_csv);
    std::map<std::int64_t, const TruthEpoch*> by_epoch;
    for (const auto& e : truth.epochs) by_epoch[e.epoch_ms] = &e;

    Report report;
    for (const auto& p : solutions) {
        const auto it = by_epoch.find(p.epoch_ms);
        if (it == by_epoch.end())
            throw JoinMismatch("report: epoch " + format_int(p.epoch_ms) +
                               " missing from truth");
        const auto& t = it->second->receiver;
        const double dx = p.x - t.x, dy = p.y - t.y, dz = p.z - t.z;
        report.errors.emplace_back(p.epoch_ms, std::sqrt(dx * dx + dy * dy + dz * dz));
    }

    std::vector<double> sorted;
    sorted.reserve(report.errors.size());
    for (const auto& [e, err] : report.errors) sorted.push_back(err);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    for (std::size_t i = 0; i < n; ++i)
        report.cdf.emplace_back(sorted[i],
                                static_cast<double>(i + 1) / static_cast<double>(n));
    if (n > 0) {
        const auto rank = [n](double q) {
            const auto r = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
            return std::min(n - 1, r > 0 ? r - 1 : 0);
        };
        report.summary.count = n;
        report.summary.median_m = sorted[rank(0.5)];
        report.summary.p95_m = sorted[rank(0.95)];
        report.summary.max_m = sorted.back();
    }
    return report;
}

} // namespace mirrorfix::app
