#include "mirrorfix/geodesy.hpp"

#include <Eigen/Geometry>
#include <cmath>

namespace mirrorfix {

EcefPoint orbit_position(const CircularOrbit& orbit, double t) {
    if (!std::isfinite(t)) throw DomainError("orbit_position: t must be finite");
    const double theta = orbit.phase0 + orbit.angular_rate * t;
    const Eigen::Vector3d in_plane{orbit.radius * std::cos(theta),
                                   orbit.radius * std::sin(theta), 0.0};
    const Eigen::Vector3d p = Eigen::AngleAxisd(orbit.raan, Eigen::Vector3d::UnitZ()) *
                              (Eigen::AngleAxisd(orbit.inclination, Eigen::Vector3d::UnitX()) *
                               in_plane);
    return EcefPoint::from(p);
}

double range(const EcefPoint& a, const EcefPoint& b) {
    return (a.vec() - b.vec()).norm();
}

Eigen::Vector3d unit_vector(const EcefPoint& from, const EcefPoint& to) {
    const Eigen::Vector3d d = to.vec() - from.vec();
    const double n = d.norm();
    if (n == 0.0) throw DegenerateGeometry("unit_vector: from == to");
    return d / n;
}

EnuFrame::EnuFrame(const EcefPoint& origin) : origin_(origin) {
    const double p = std::hypot(origin.x, origin.y);
    if (p == 0.0 && origin.z == 0.0)
        throw DegenerateGeometry("EnuFrame: origin at Earth center");
    // Spherical latitude/longitude; the toolkit never needs the ellipsoid.
    const double lat = std::atan2(origin.z, p);
    const double lon = std::atan2(origin.y, origin.x);
    const double sl = std::sin(lat), cl = std::cos(lat);
    const double so = std::sin(lon), co = std::cos(lon);
    ecef_to_enu_ << -so, co, 0.0,
                    -sl * co, -sl * so, cl,
                    cl * co, cl * so, sl;
}

Eigen::Vector3d EnuFrame::to_enu(const EcefPoint& p) const {
    return ecef_to_enu_ * (p.vec() - origin_.vec());
}

EcefPoint EnuFrame::to_ecef(const Eigen::Vector3d& enu) const {
    return EcefPoint::from(origin_.vec() + ecef_to_enu_.transpose() * enu);
}

Eigen::Vector3d EnuFrame::rotate(const Eigen::Vector3d& ecef_displacement) const {
    return ecef_to_enu_ * ecef_displacement;
}

void Constellation::add(int svid, SatelliteModel model) {
    satellites_[svid] = std::move(model);
}

EcefPoint Constellation::position(int svid, double t) const {
    const auto it = satellites_.find(svid);
    if (it == satellites_.end())
        throw Error("constellation: unknown svid " + std::to_string(svid));
    if (const auto* fixed = std::get_if<EcefPoint>(&it->second)) return *fixed;
    return orbit_position(std::get<CircularOrbit>(it->second), t);
}

void validate(const CircularOrbit& orbit) {
    if (!(orbit.radius > constants::earth_radius))
        throw InvalidScenario("orbit radius must exceed the Earth radius");
    if (!(orbit.angular_rate > 0.0))
        throw InvalidScenario("orbit angular_rate must be positive");
}

} // namespace mirrorfix
