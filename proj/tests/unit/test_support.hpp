#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <random>
#include <string>

#include "mirrorfix/geodesy.hpp"
#include "mirrorfix/simulator.hpp"

namespace test_support {

/// Independent least-squares route: SVD pseudoinverse, never the normal
/// equations the implementation uses.
inline Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& g, const Eigen::VectorXd& rhs) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.solve(rhs);
}

/// Random unit vector from a test-local engine.
inline Eigen::Vector3d random_unit(std::mt19937& rng) {
    std::normal_distribution<double> n;
    Eigen::Vector3d v{n(rng), n(rng), n(rng)};
    while (v.norm() < 1e-6) v = {n(rng), n(rng), n(rng)};
    return v.normalized();
}

/// Point on the spherical Earth surface at the given lat/lon (radians).
inline mirrorfix::EcefPoint surface_point(double lat, double lon, double height = 0.0) {
    const double r = mirrorfix::constants::earth_radius + height;
    return {r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon),
            r * std::sin(lat)};
}

/// Satellite at the given elevation/azimuth as seen from a surface point.
inline mirrorfix::EcefPoint satellite_above(const mirrorfix::EcefPoint& site,
                                            double elevation_rad, double azimuth_rad,
                                            double range_m = 2.2e7) {
    const mirrorfix::EnuFrame frame(site);
    const Eigen::Vector3d enu{std::cos(elevation_rad) * std::sin(azimuth_rad),
                              std::cos(elevation_rad) * std::cos(azimuth_rad),
                              std::sin(elevation_rad)};
    return frame.to_ecef(enu * range_m);
}

/// Unique scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("mirrorfix_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Zero-noise scenario: tag 5 m above a mid-latitude site, receiver a few
/// meters away, n_sats fixed satellites spread over the sky.
inline mirrorfix::Scenario make_scenario(int n_sats, int epoch_count,
                                         std::uint64_t seed = 0,
                                         const Eigen::Vector3d& rx_enu = {8.0, -5.0,
                                                                          -2.0}) {
    using namespace mirrorfix;
    Scenario s;
    s.seed = seed;
    s.epochs = {0, 1000, epoch_count};
    s.tag.position = surface_point(0.5, 0.2, 5.0);
    s.tag.pattern = {20000, 0.5, 0};
    s.tag.gain_db = 9.0;
    const EnuFrame frame(s.tag.position);
    s.receiver.emplace_back(0, frame.to_ecef(rx_enu));
    s.clock.bias_s = 2.5e-4;
    s.noise = {0.0, 0.0, 0.0};
    // Azimuths cover 0.8 turn (never antipodal pairs) and ranges differ per
    // satellite; with two satellites an antipodal/equal-range layout makes
    // the four real+virtual positions and the origin exactly coplanar.
    const double elevations[8] = {60.0, 35.0, 70.0, 25.0, 50.0, 40.0, 80.0, 30.0};
    for (int i = 0; i < n_sats; ++i) {
        const double az = (i * 360.0 * 0.8 / n_sats + 15.0) * constants::deg2rad;
        const double el = elevations[i % 8] * constants::deg2rad;
        const double range_m = 2.0e7 + (i % 5) * 1.5e6;
        s.satellites.add(i + 1, satellite_above(s.tag.position, el, az, range_m));
    }
    return s;
}

inline std::map<int, mirrorfix::EcefPoint> satellite_positions(const mirrorfix::Scenario& s,
                                                               double t = 0.0) {
    std::map<int, mirrorfix::EcefPoint> out;
    for (const auto& [svid, model] : s.satellites.satellites())
        out[svid] = s.satellites.position(svid, t);
    return out;
}

} // namespace test_support
