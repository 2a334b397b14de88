#include "mirrorfix/solver_diff.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mirrorfix/textio.hpp"

namespace mirrorfix {

namespace {
constexpr double c_light = constants::speed_of_light;
}

std::vector<PhasePair> build_phase_pairs(const MeasurementSet& set,
                                         const Constellation& satellites,
                                         const EcefPoint& tag, std::int64_t window_ms,
                                         PairMode mode) {
    const bool carrier = mode == PairMode::carrier_phase;
    std::map<int, std::vector<const Measurement*>> direct, scattered;
    std::size_t scattered_rows = 0, scattered_locked = 0;
    for (const auto& m : set.rows) {
        if (m.scattered == ScatterClass::scattered) ++scattered_rows;
        if (carrier && !m.adr_valid) continue;
        if (m.scattered == ScatterClass::direct) direct[m.svid].push_back(&m);
        if (m.scattered == ScatterClass::scattered) {
            scattered[m.svid].push_back(&m);
            ++scattered_locked;
        }
    }
    if (carrier && scattered_rows > 0 && scattered_locked == 0)
        throw CarrierUnlocked("build_phase_pairs: no scattered row holds carrier lock");

    std::vector<PhasePair> pairs;
    for (const auto& [svid, s_rows] : scattered) {
        const auto d_it = direct.find(svid);
        if (d_it == direct.end()) continue;
        for (const Measurement* s : s_rows) {
            const Measurement* best = nullptr;
            std::int64_t best_gap = std::numeric_limits<std::int64_t>::max();
            for (const Measurement* d : d_it->second) {
                const std::int64_t gap = std::llabs(s->epoch_ms - d->epoch_ms);
                if (gap < best_gap || (gap == best_gap && best && d->epoch_ms < best->epoch_ms)) {
                    best_gap = gap;
                    best = d;
                }
            }
            if (!best || best_gap > window_ms) continue;

            PhasePair p;
            p.svid = svid;
            p.t1_ms = best->epoch_ms;
            p.t2_ms = s->epoch_ms;
            p.wavelength = set.wavelength;
            const EcefPoint sat_t1 = satellites.position(svid, static_cast<double>(p.t1_ms) * 1e-3);
            const EcefPoint sat_t2 = satellites.position(svid, static_cast<double>(p.t2_ms) * 1e-3);
            p.delta_r_tag = range(sat_t2, tag) - range(sat_t1, tag);
            p.e = unit_vector(sat_t2, tag);
            if (carrier) {
                p.phi_direct = best->adr_m;
                p.phi_scattered = s->adr_m;
                p.delta_n = estimate_ambiguity(*s, set.wavelength).n -
                            estimate_ambiguity(*best, set.wavelength).n;
            } else {
                p.phi_direct = best->pseudorange_m;
                p.phi_scattered = s->pseudorange_m;
                p.delta_n = 0;
            }
            pairs.push_back(std::move(p));
        }
    }
    if (pairs.empty()) throw NoPairs("build_phase_pairs: no pairable rows inside window");
    return pairs;
}

std::pair<double, Eigen::Vector4d> residual_and_jacobian(const PhasePair& pair,
                                                         const Eigen::Vector3d& b0) {
    const double norm = b0.norm();
    if (norm == 0.0)
        throw ZeroBaseVector("residual_and_jacobian: gradient singular at b0 = 0");
    const double phi_d = pair.phi_scattered - pair.phi_direct;
    const double s_phi = phi_d - pair.delta_r_tag -
                         pair.wavelength * static_cast<double>(pair.delta_n) - norm +
                         b0.dot(pair.e);
    Eigen::Vector4d row;
    row.head<3>() = b0 / norm - pair.e;
    row(3) = 1.0;
    return {s_phi, row};
}

BaseVectorSolution solve_base_vector(std::span<const PhasePair> pairs,
                                     std::span<const double> variances,
                                     const DiffOptions& options) {
    if (pairs.size() < 4)
        throw Underdetermined("solve_base_vector: need >= 4 pairs, got " +
                              std::to_string(pairs.size()));
    if (!variances.empty() && variances.size() != pairs.size())
        throw DomainError("solve_base_vector: variance count != pair count");
    if (options.b_init.norm() == 0.0)
        throw ZeroBaseVector("solve_base_vector: b_init must not be the origin");

    const auto m = static_cast<Eigen::Index>(pairs.size());
    Eigen::Vector3d b0 = options.b_init;
    double c_dt = 0.0;
    Eigen::MatrixXd g(m, 4);
    Eigen::VectorXd s(m);

    BaseVectorSolution sol;
    bool converged = false;
    int iter = 0;
    for (; iter < options.max_iter; ++iter) {
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto [s_phi, row] = residual_and_jacobian(pairs[static_cast<std::size_t>(i)], b0);
            s(i) = s_phi;
            g.row(i) = row.transpose();
        }
        // sqrt(W)-scaled QR step, the WLS minimizer of the stacked system
        Eigen::MatrixXd gw = g;
        Eigen::VectorXd sw = s;
        if (!variances.empty()) {
            for (Eigen::Index i = 0; i < m; ++i) {
                const double scale = 1.0 / std::sqrt(variances[static_cast<std::size_t>(i)]);
                gw.row(i) *= scale;
                sw(i) *= scale;
            }
        }
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gw);
        if (qr.rank() < 4)
            throw SingularNormalMatrix("solve_base_vector: directions do not span");
        const Eigen::VectorXd delta = qr.solve(sw);
        b0 += delta.head<3>();
        c_dt = delta(3);
        if (b0.norm() == 0.0)
            throw ZeroBaseVector("solve_base_vector: iterate hit the origin");
        if (delta.head<3>().norm() < options.tol_m) {
            converged = true;
            ++iter;
            break;
        }
    }
    if (!converged)
        throw NonConvergence("solve_base_vector: no convergence in " +
                             std::to_string(options.max_iter) + " iterations");

    double ss = 0.0;
    for (const auto& pair : pairs) {
        const auto [s_phi, row] = residual_and_jacobian(pair, b0);
        const double r = s_phi - c_dt;
        ss += r * r;
    }
    sol.b = b0;
    sol.delta_t = c_dt / c_light;
    sol.iterations = iter;
    sol.converged = true;
    sol.residual_rms = std::sqrt(ss / static_cast<double>(pairs.size()));
    return sol;
}

FloorPlanDecision apply_floor_plan(const BaseVectorSolution& solution,
                                   const FloorPlanConstraint& plan,
                                   const EnuFrame& tag_frame) {
    if (plan.polygon_en.size() < 3)
        throw InvalidScenario("floor plan: polygon needs at least 3 vertices");
    if (!(plan.height_min_m <= plan.height_max_m))
        throw InvalidScenario("floor plan: empty height interval");

    // Closed membership with a micrometer-scale guard so frame round-trip
    // rounding at Earth-radius magnitudes cannot flip points sitting
    // exactly on a bound.
    constexpr double edge_tol = 1e-6;
    const Eigen::Vector3d enu = tag_frame.rotate(solution.b);
    if (enu.z() < plan.height_min_m - edge_tol || enu.z() > plan.height_max_m + edge_tol)
        return {false, "height " + format_double(enu.z()) + " m outside [" +
                           format_double(plan.height_min_m) + ", " +
                           format_double(plan.height_max_m) + "]"};

    const Eigen::Vector2d p = enu.head<2>();
    int positive = 0, negative = 0;
    const std::size_t n = plan.polygon_en.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector2d& a = plan.polygon_en[i];
        const Eigen::Vector2d& b = plan.polygon_en[(i + 1) % n];
        const double cross = (b.x() - a.x()) * (p.y() - a.y()) -
                             (b.y() - a.y()) * (p.x() - a.x());
        if (cross > edge_tol) ++positive;
        if (cross < -edge_tol) ++negative;
    }
    if (positive > 0 && negative > 0)
        return {false, "horizontal position outside the allowed polygon"};
    return {true, {}};
}

EcefPoint recover_position(const EcefPoint& tag, const BaseVectorSolution& solution) {
    if (!solution.converged)
        throw NotConverged("recover_position: solution did not converge");
    return {tag.x + solution.b.x(), tag.y + solution.b.y(), tag.z + solution.b.z()};
}

} // namespace mirrorfix
