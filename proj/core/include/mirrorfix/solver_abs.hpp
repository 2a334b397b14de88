#pragma once

#include <Eigen/Core>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "mirrorfix/errors.hpp"
#include "mirrorfix/geodesy.hpp"
#include "mirrorfix/measurements.hpp"

namespace mirrorfix {

/// Surveyed tag state: known position plus the estimated scatter delay.
struct TagConfig {
    EcefPoint position;
    double t_s = 0.0;      // s, valid only when t_s_valid
    bool t_s_valid = false;
};

/// Fictitious satellite obtained by point reflection through the tag.
struct VirtualSatellite {
    int svid = 0; // mirrors the real svid
    EcefPoint position;
    EcefPoint source; // the real satellite
};

/// position = 2*tag - real, the unique axis-free 180 degree rotation about
/// the tag point. Throws DegenerateGeometry when real == tag.
VirtualSatellite make_virtual_satellite(const EcefPoint& real, const EcefPoint& tag,
                                        int svid = 0);

struct PositionSolution {
    EcefPoint position;
    double clock_bias_direct = 0.0;    // t_b1, s
    double clock_bias_scattered = 0.0; // t_b2, s
    int iterations = 0;
    double residual_rms = 0.0; // m
    bool converged = false;
    double dop = 0.0;
};

/// One (direct, scattered) clock-bias observation for the delay estimator.
struct BiasPair {
    double t_b1 = 0.0; // s, from non-scattered rows
    double t_b2 = 0.0; // s, from scattered rows
};

/// Exponential moving average over t_b2 - t_b1 samples. The first update
/// initializes the state; seed() installs a prior instead.
class ScatterDelayEstimator {
public:
    explicit ScatterDelayEstimator(double alpha = 0.2);
    void seed(double t_s);
    void update(const BiasPair& pair);
    bool valid() const { return state_.has_value(); }
    double estimate() const; // throws NoPairs before any update/seed

private:
    double alpha_;
    std::optional<double> state_;
};

/// EMA of (t_b2 - t_b1) over the pairs, in order. Throws NoPairs when empty.
double estimate_scatter_delay(std::span<const BiasPair> pairs, double alpha = 0.2);

/// Default measurement variance: (0.3 m)^2 * 10^((45 - cn0)/10).
double cn0_variance(double cn0_dbhz);

struct AbsOptions {
    double tol_m = 1e-4;
    int max_iter = 50;
    std::optional<Eigen::Vector3d> warm_start; // default start is the origin
    bool joint_ts = false; // dual-bias mode when the scatter delay is unknown
};

/// Iterative Gauss-Newton WLS over direct and scattered pseudoranges.
///
/// Scattered rows are evaluated against the virtual satellite. When the
/// scatter delay is known (per-svid entry in ts_by_svid, or tag.t_s_valid),
/// c*t_s is removed from the scattered pseudorange and all rows share one
/// clock bias (4 unknowns). With joint_ts and the delay unknown, the
/// stacked dual-bias system [x, y, z, c*t_b1, c*t_b2] is solved instead
/// (5 unknowns, >= 6 rows) and t_s falls out as t_b2 - t_b1.
///
/// variances: per-row measurement variance aligned with rows; empty spans
/// use the C/N0 model.
PositionSolution solve_position(std::span<const Measurement> rows,
                                const std::map<int, EcefPoint>& satellites,
                                const TagConfig& tag,
                                const std::map<int, double>& ts_by_svid,
                                std::span<const double> variances,
                                const AbsOptions& options = {});

/// sqrt of the trace of the position block of (G^T G)^-1.
double dilution_of_precision(const Eigen::MatrixXd& geometry);

/// Scattered clock biases t_b2 per svid, extracted against the virtual
/// satellites with the receiver position held fixed:
/// t_b2 = (rho_s - |P_vs - position|) / c.
std::vector<std::pair<int, double>> extract_scattered_bias(
    std::span<const Measurement> rows, const std::map<int, EcefPoint>& satellites,
    const EcefPoint& tag, const EcefPoint& position);

/// Keeps the latest row per (svid, class); superseded earlier rows are
/// returned for reporting.
struct DedupeResult {
    std::vector<Measurement> rows;
    std::vector<Measurement> superseded;
};
DedupeResult dedupe_rows(std::span<const Measurement> rows);

} // namespace mirrorfix
