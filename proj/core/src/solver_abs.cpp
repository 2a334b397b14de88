#include "mirrorfix/solver_abs.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>

namespace mirrorfix {

namespace {
constexpr double c_light = constants::speed_of_light;
}

VirtualSatellite make_virtual_satellite(const EcefPoint& real, const EcefPoint& tag,
                                        int svid) {
    if (real == tag)
        throw DegenerateGeometry("make_virtual_satellite: satellite at the tag");
    VirtualSatellite vs;
    vs.svid = svid;
    vs.source = real;
    vs.position = EcefPoint::from(2.0 * tag.vec() - real.vec());
    return vs;
}

ScatterDelayEstimator::ScatterDelayEstimator(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("scatter delay estimator: alpha must be in (0, 1]");
}

void ScatterDelayEstimator::seed(double t_s) { state_ = t_s; }

void ScatterDelayEstimator::update(const BiasPair& pair) {
    const double sample = pair.t_b2 - pair.t_b1;
    state_ = state_ ? alpha_ * sample + (1.0 - alpha_) * *state_ : sample;
}

double ScatterDelayEstimator::estimate() const {
    if (!state_) throw NoPairs("scatter delay estimator: no pairs yet");
    return *state_;
}

double estimate_scatter_delay(std::span<const BiasPair> pairs, double alpha) {
    if (pairs.empty()) throw NoPairs("estimate_scatter_delay: no pairs");
    ScatterDelayEstimator est(alpha);
    for (const auto& p : pairs) est.update(p);
    return est.estimate();
}

double cn0_variance(double cn0_dbhz) {
    return 0.09 * std::pow(10.0, (45.0 - cn0_dbhz) / 10.0);
}

PositionSolution solve_position(std::span<const Measurement> rows,
                                const std::map<int, EcefPoint>& satellites,
                                const TagConfig& tag,
                                const std::map<int, double>& ts_by_svid,
                                std::span<const double> variances,
                                const AbsOptions& options) {
    if (!variances.empty() && variances.size() != rows.size())
        throw DomainError("solve_position: variance count != row count");

    struct Row {
        EcefPoint sat;      // direct: the real satellite; scattered: the virtual one
        double pseudorange; // scattered rows already corrected by -c*t_s when known
        double weight;
        bool scattered;
    };
    std::vector<Row> eq;
    eq.reserve(rows.size());

    bool any_scattered = false;
    bool all_ts_known = true;
    double applied_ts_sum = 0.0;
    std::size_t applied_ts_count = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Measurement& m = rows[i];
        if (m.scattered == ScatterClass::unknown)
            throw DomainError("solve_position: unlabeled row (svid " +
                              std::to_string(m.svid) + ")");
        const auto sat_it = satellites.find(m.svid);
        if (sat_it == satellites.end())
            throw DomainError("solve_position: no satellite position for svid " +
                              std::to_string(m.svid));
        Row row;
        row.scattered = m.scattered == ScatterClass::scattered;
        row.pseudorange = m.pseudorange_m;
        row.weight = 1.0 / (variances.empty() ? cn0_variance(m.cn0_dbhz) : variances[i]);
        if (row.scattered) {
            any_scattered = true;
            row.sat = make_virtual_satellite(sat_it->second, tag.position, m.svid).position;
            const auto ts_it = ts_by_svid.find(m.svid);
            if (ts_it != ts_by_svid.end()) {
                row.pseudorange -= c_light * ts_it->second;
                applied_ts_sum += ts_it->second;
                ++applied_ts_count;
            } else if (tag.t_s_valid) {
                row.pseudorange -= c_light * tag.t_s;
                applied_ts_sum += tag.t_s;
                ++applied_ts_count;
            } else {
                all_ts_known = false;
            }
        } else {
            row.sat = sat_it->second;
        }
        eq.push_back(row);
    }

    const bool dual_bias = any_scattered && !all_ts_known;
    if (dual_bias && !options.joint_ts)
        throw DomainError(
            "solve_position: scattered rows need a known t_s or joint estimation");
    const int n_unknowns = dual_bias ? 5 : 4;
    const std::size_t min_rows = dual_bias ? 6 : static_cast<std::size_t>(n_unknowns);
    if (eq.size() < min_rows)
        throw Underdetermined("solve_position: " + std::to_string(eq.size()) +
                              " rows for " + std::to_string(n_unknowns) + " unknowns");

    // State: [L; c*t_b1] or [L; c*t_b1; c*t_b2].
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_unknowns);
    if (options.warm_start) x.head<3>() = *options.warm_start;

    const auto m_rows = static_cast<Eigen::Index>(eq.size());
    Eigen::MatrixXd g(m_rows, n_unknowns);
    Eigen::VectorXd resid(m_rows);

    const auto build = [&](const Eigen::VectorXd& state) {
        const EcefPoint l{state(0), state(1), state(2)};
        for (Eigen::Index i = 0; i < m_rows; ++i) {
            const Row& row = eq[static_cast<std::size_t>(i)];
            const double r = range(row.sat, l);
            const Eigen::Vector3d los = unit_vector(l, row.sat);
            const double bias = (dual_bias && row.scattered) ? state(4) : state(3);
            resid(i) = row.pseudorange - (r + bias);
            g.row(i).setZero();
            g.row(i).head<3>() = -los.transpose();
            g(i, (dual_bias && row.scattered) ? 4 : 3) = 1.0;
        }
    };

    PositionSolution sol;
    bool converged = false;
    int iter = 0;
    Eigen::MatrixXd gw(m_rows, n_unknowns);
    Eigen::VectorXd rw(m_rows);
    for (; iter < options.max_iter; ++iter) {
        build(x);
        // WLS step via QR on sqrt(W)G: the same normal-equation minimizer
        // without squaring the condition number, so the rank test separates
        // collinear geometry from the legitimately ill-conditioned
        // virtual-satellite systems.
        for (Eigen::Index i = 0; i < m_rows; ++i) {
            const double sw = std::sqrt(eq[static_cast<std::size_t>(i)].weight);
            gw.row(i) = g.row(i) * sw;
            rw(i) = resid(i) * sw;
        }
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gw);
        if (qr.rank() < n_unknowns)
            throw SingularNormalMatrix("solve_position: degenerate geometry");
        const Eigen::VectorXd delta = qr.solve(rw);
        x += delta;
        if (delta.head<3>().norm() < options.tol_m) {
            converged = true;
            ++iter;
            break;
        }
    }
    if (!converged)
        throw NonConvergence("solve_position: no convergence in " +
                             std::to_string(options.max_iter) + " iterations");

    build(x); // final residuals and geometry at the converged state
    sol.position = {x(0), x(1), x(2)};
    sol.clock_bias_direct = x(3) / c_light;
    if (dual_bias) {
        sol.clock_bias_scattered = x(4) / c_light;
    } else if (applied_ts_count > 0) {
        // Biases were merged; report t_b2 = t_b1 + mean applied delay.
        sol.clock_bias_scattered =
            sol.clock_bias_direct + applied_ts_sum / static_cast<double>(applied_ts_count);
    } else {
        sol.clock_bias_scattered = sol.clock_bias_direct;
    }
    sol.iterations = iter;
    sol.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(m_rows));
    sol.converged = true;
    sol.dop = dilution_of_precision(g);
    return sol;
}

double dilution_of_precision(const Eigen::MatrixXd& geometry) {
    if (geometry.cols() < 3)
        throw DomainError("dilution_of_precision: geometry needs a position block");
    if (geometry.rows() < geometry.cols())
        throw SingularNormalMatrix("dilution_of_precision: fewer rows than unknowns");
    // SVD route: (G^T G)^-1 = V diag(1/s^2) V^T. Near-degenerate geometry
    // yields an honestly huge DOP; only true rank deficiency throws.
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(geometry, Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= sv(0) * 1e-12)
        throw SingularNormalMatrix("dilution_of_precision: singular geometry");
    const Eigen::MatrixXd& v = svd.matrixV();
    double trace = 0.0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        for (Eigen::Index i = 0; i < 3; ++i)
            trace += v(i, k) * v(i, k) / (sv(k) * sv(k));
    return std::sqrt(trace);
}

std::vector<std::pair<int, double>> extract_scattered_bias(
    std::span<const Measurement> rows, const std::map<int, EcefPoint>& satellites,
    const EcefPoint& tag, const EcefPoint& position) {
    std::vector<std::pair<int, double>> out;
    for (const auto& m : rows) {
        if (m.scattered != ScatterClass::scattered) continue;
        const auto sat_it = satellites.find(m.svid);
        if (sat_it == satellites.end())
            throw DomainError("extract_scattered_bias: no satellite for svid " +
                              std::to_string(m.svid));
        const VirtualSatellite vs = make_virtual_satellite(sat_it->second, tag, m.svid);
        const double t_b2 = (m.pseudorange_m - range(vs.position, position)) / c_light;
        out.emplace_back(m.svid, t_b2);
    }
    return out;
}

DedupeResult dedupe_rows(std::span<const Measurement> rows) {
    std::map<std::pair<int, char>, Measurement> latest;
    DedupeResult result;
    for (const auto& m : rows) {
        const std::pair<int, char> key{m.svid, static_cast<char>(m.scattered)};
        const auto it = latest.find(key);
        if (it == latest.end()) {
            latest.emplace(key, m);
        } else if (m.epoch_ms >= it->second.epoch_ms) {
            result.superseded.push_back(it->second);
            it->second = m;
        } else {
            result.superseded.push_back(m);
        }
    }
    result.rows.reserve(latest.size());
    for (const auto& [key, m] : latest) result.rows.push_back(m);
    return result;
}

} // namespace mirrorfix
