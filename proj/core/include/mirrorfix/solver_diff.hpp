#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mirrorfix/errors.hpp"
#include "mirrorfix/geodesy.hpp"
#include "mirrorfix/measurements.hpp"

namespace mirrorfix {

/// One scattered/direct observation pair of the same satellite.
struct PhasePair {
    int svid = 0;
    double phi_direct = 0.0;    // m, at t1
    double phi_scattered = 0.0; // m, at t2
    std::int64_t t1_ms = 0;
    std::int64_t t2_ms = 0;
    double delta_r_tag = 0.0;   // m, satellite-to-tag range change t1 -> t2
    long long delta_n = 0;      // cycles
    Eigen::Vector3d e{0, 0, 0}; // unit vector, satellite (at t2) toward tag
    double wavelength = constants::gps_l1_wavelength;
};

struct BaseVectorSolution {
    Eigen::Vector3d b{0, 0, 0}; // m, tag -> receiver
    double delta_t = 0.0;       // s, differential clock term
    int iterations = 0;
    bool converged = false;
    double residual_rms = 0.0; // m
};

/// Allowed receiver region: convex polygon in the tag's local tangent plane
/// plus a closed height interval. Membership includes the boundary.
struct FloorPlanConstraint {
    std::vector<Eigen::Vector2d> polygon_en; // convex, consistently wound
    double height_min_m = 0.0;
    double height_max_m = 0.0;
};

enum class PairMode {
    carrier_phase, // ADR measurements, requires carrier lock
    pseudorange,   // fallback: rho in place of Phi, delta_n = 0
};

/// Pairs each scattered epoch with the nearest direct epoch of the same
/// satellite within the window, computing geometry from the orbit model.
std::vector<PhasePair> build_phase_pairs(const MeasurementSet& set,
                                         const Constellation& satellites,
                                         const EcefPoint& tag, std::int64_t window_ms,
                                         PairMode mode = PairMode::carrier_phase);

/// s_phi = Phi_d - delta_r_tag - lambda*delta_n - |b0| + b0.e and the
/// linearized row [(b0/|b0| - e)^T, 1], the last entry multiplying c*dT.
/// Throws ZeroBaseVector at the |b0| = 0 gradient singularity.
std::pair<double, Eigen::Vector4d> residual_and_jacobian(const PhasePair& pair,
                                                         const Eigen::Vector3d& b0);

struct DiffOptions {
    double tol_m = 1e-4;
    int max_iter = 50;
    Eigen::Vector3d b_init{1.0, 1.0, 1.0}; // never the origin
};

/// Newton-iterated WLS for [delta_b; c*dT] over >= 4 pairs.
BaseVectorSolution solve_base_vector(std::span<const PhasePair> pairs,
                                     std::span<const double> variances,
                                     const DiffOptions& options = {});

struct FloorPlanDecision {
    bool accepted = false;
    std::string reason; // violated bound when rejected
};

/// Accepts the solution iff tag + b lies inside the floor-plan region.
/// The frame must be anchored at the tag.
FloorPlanDecision apply_floor_plan(const BaseVectorSolution& solution,
                                   const FloorPlanConstraint& plan,
                                   const EnuFrame& tag_frame);

/// P = tag + b. Throws NotConverged for unconverged solutions.
EcefPoint recover_position(const EcefPoint& tag, const BaseVectorSolution& solution);

/// Floor-plan JSON: {"vertices_en": [[e, n], ...], "height_m": [min, max]},
/// meters in the tag's ENU frame.
FloorPlanConstraint parse_floor_plan_json(const std::string& path);
FloorPlanConstraint parse_floor_plan_json_text(const std::string& text);

} // namespace mirrorfix
