#pragma once

#include <Eigen/Core>
#include <map>
#include <variant>

#include "mirrorfix/errors.hpp"

namespace mirrorfix {

namespace constants {
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double speed_of_light = 299792458.0; // m/s
inline constexpr double earth_radius = 6.371e6;       // m, spherical model
inline constexpr double gps_orbit_radius = 2.656e7;   // m
inline constexpr double gps_orbit_period = 43082.0;   // s
inline constexpr double gps_inclination = 55.0 * pi / 180.0;
inline constexpr double gps_l1_frequency = 1.57542e9;  // Hz
inline constexpr double gps_l1_wavelength = 0.19029367; // m
inline constexpr double deg2rad = pi / 180.0;
inline constexpr double rad2deg = 180.0 / pi;
} // namespace constants

/// Earth-centered Earth-fixed position in meters.
struct EcefPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Eigen::Vector3d vec() const { return {x, y, z}; }
    static EcefPoint from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

    friend bool operator==(const EcefPoint&, const EcefPoint&) = default;
};

/// Circular orbit: a circle of fixed radius, tilted by inclination about the
/// x axis and rotated by the right ascension of the ascending node about z.
/// All angles radians, rates rad/s.
struct CircularOrbit {
    double radius = constants::gps_orbit_radius;
    double inclination = constants::gps_inclination;
    double raan = 0.0;
    double phase0 = 0.0;
    double angular_rate = 2.0 * constants::pi / constants::gps_orbit_period;
};

/// Position on the orbit circle at time t (seconds).
EcefPoint orbit_position(const CircularOrbit& orbit, double t);

/// Euclidean distance |a - b| in meters.
double range(const EcefPoint& a, const EcefPoint& b);

/// (to - from) / |to - from|. Throws DegenerateGeometry when from == to.
Eigen::Vector3d unit_vector(const EcefPoint& from, const EcefPoint& to);

/// Local east/north/up frame anchored at an ECEF point (spherical Earth).
class EnuFrame {
public:
    explicit EnuFrame(const EcefPoint& origin);

    const EcefPoint& origin() const { return origin_; }
    /// ECEF point -> local ENU coordinates (meters).
    Eigen::Vector3d to_enu(const EcefPoint& p) const;
    /// Local ENU coordinates -> ECEF point.
    EcefPoint to_ecef(const Eigen::Vector3d& enu) const;
    /// Rotate an ECEF displacement into ENU components (no origin shift).
    Eigen::Vector3d rotate(const Eigen::Vector3d& ecef_displacement) const;

private:
    EcefPoint origin_;
    Eigen::Matrix3d ecef_to_enu_; // rows: east, north, up
};

using SatelliteModel = std::variant<EcefPoint, CircularOrbit>;

/// Satellite position source keyed by svid: either a fixed point or an orbit.
class Constellation {
public:
    void add(int svid, SatelliteModel model);
    bool contains(int svid) const { return satellites_.count(svid) != 0; }
    /// Position of svid at time t (seconds). Throws Error for unknown svid.
    EcefPoint position(int svid, double t) const;
    const std::map<int, SatelliteModel>& satellites() const { return satellites_; }

private:
    std::map<int, SatelliteModel> satellites_;
};

/// Throws InvalidScenario unless radius > Earth radius and angular_rate > 0.
void validate(const CircularOrbit& orbit);

} // namespace mirrorfix
