#include <json.hpp>

#include "mirrorfix/simulator.hpp"
#include "mirrorfix/solver_diff.hpp"
#include "mirrorfix/textio.hpp"

namespace mirrorfix {

namespace {

using nlohmann::json;

EcefPoint point_from(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3)
        throw InvalidScenario(std::string(what) + ": expected [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

// Angles arrive in degrees; orbits may give period_s instead of a rate.
CircularOrbit orbit_from(const json& j) {
    CircularOrbit orbit;
    if (j.contains("radius_m")) orbit.radius = j["radius_m"].get<double>();
    if (j.contains("inclination_deg"))
        orbit.inclination = j["inclination_deg"].get<double>() * constants::deg2rad;
    if (j.contains("raan_deg")) orbit.raan = j["raan_deg"].get<double>() * constants::deg2rad;
    if (j.contains("phase0_deg"))
        orbit.phase0 = j["phase0_deg"].get<double>() * constants::deg2rad;
    if (j.contains("period_s")) {
        const double period = j["period_s"].get<double>();
        if (!(period > 0.0)) throw InvalidScenario("orbit: period_s must be > 0");
        orbit.angular_rate = 2.0 * constants::pi / period;
    }
    return orbit;
}

} // namespace

Scenario parse_scenario_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidScenario(std::string("scenario json: ") + e.what());
    }
    try {
        Scenario s;
        s.schema = j.at("schema").get<int>();
        if (s.schema != 1) throw InvalidScenario("scenario json: unsupported schema version");
        if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();

        if (j.contains("epochs")) {
            const auto& e = j["epochs"];
            if (e.contains("start_ms")) s.epochs.start_ms = e["start_ms"].get<std::int64_t>();
            if (e.contains("step_ms")) s.epochs.step_ms = e["step_ms"].get<std::int64_t>();
            if (e.contains("count")) s.epochs.count = e["count"].get<int>();
        }

        for (const auto& sat : j.at("satellites")) {
            const int svid = sat.at("svid").get<int>();
            if (s.satellites.contains(svid))
                throw InvalidScenario("scenario json: duplicate svid " + std::to_string(svid));
            if (sat.contains("fixed"))
                s.satellites.add(svid, point_from(sat["fixed"], "satellite fixed"));
            else if (sat.contains("orbit"))
                s.satellites.add(svid, orbit_from(sat["orbit"]));
            else
                throw InvalidScenario("scenario json: satellite needs 'fixed' or 'orbit'");
        }

        const auto& tag = j.at("tag");
        s.tag.position = point_from(tag.at("position"), "tag position");
        if (tag.contains("processing_delay_s"))
            s.tag.processing_delay_s = tag["processing_delay_s"].get<double>();
        if (tag.contains("gain_db")) s.tag.gain_db = tag["gain_db"].get<double>();
        if (tag.contains("pattern")) {
            const auto& p = tag["pattern"];
            if (p.contains("period_ms"))
                s.tag.pattern.period_ms = p["period_ms"].get<std::int64_t>();
            if (p.contains("duty")) s.tag.pattern.duty = p["duty"].get<double>();
            if (p.contains("phase_ms")) s.tag.pattern.phase_ms = p["phase_ms"].get<std::int64_t>();
        }
        if (tag.contains("scatter_svids"))
            for (const auto& v : tag["scatter_svids"]) s.tag.scatter_svids.insert(v.get<int>());

        for (const auto& entry : j.at("receiver")) {
            s.receiver.emplace_back(entry.at("epoch_ms").get<std::int64_t>(),
                                    point_from(entry.at("position"), "receiver position"));
        }

        if (j.contains("clock")) {
            const auto& c = j["clock"];
            if (c.contains("bias_s")) s.clock.bias_s = c["bias_s"].get<double>();
            if (c.contains("drift_s_per_s"))
                s.clock.drift_s_per_s = c["drift_s_per_s"].get<double>();
        }
        if (j.contains("noise")) {
            const auto& n = j["noise"];
            if (n.contains("sigma_pseudorange_m"))
                s.noise.sigma_pseudorange_m = n["sigma_pseudorange_m"].get<double>();
            if (n.contains("sigma_phase_m"))
                s.noise.sigma_phase_m = n["sigma_phase_m"].get<double>();
            if (n.contains("sigma_cn0_db")) s.noise.sigma_cn0_db = n["sigma_cn0_db"].get<double>();
        }
        if (j.contains("cn0")) {
            const auto& c = j["cn0"];
            if (c.contains("baseline_dbhz")) s.cn0.baseline_dbhz = c["baseline_dbhz"].get<double>();
            if (c.contains("rolloff_db_per_decade"))
                s.cn0.rolloff_db_per_decade = c["rolloff_db_per_decade"].get<double>();
            if (c.contains("reference_distance_m"))
                s.cn0.reference_distance_m = c["reference_distance_m"].get<double>();
        }
        if (j.contains("visibility")) {
            const auto& v = j["visibility"];
            if (v.contains("elevation_mask_deg"))
                s.visibility.elevation_mask_rad =
                    v["elevation_mask_deg"].get<double>() * constants::deg2rad;
            if (v.contains("blocked_svids"))
                for (const auto& b : v["blocked_svids"])
                    s.visibility.blocked_svids.insert(b.get<int>());
        }

        validate(s);
        return s;
    } catch (const json::exception& e) {
        throw InvalidScenario(std::string("scenario json: ") + e.what());
    }
}

Scenario parse_scenario_json(const std::string& path) {
    return parse_scenario_json_text(read_text_file(path));
}

FloorPlanConstraint parse_floor_plan_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidScenario(std::string("floor plan json: ") + e.what());
    }
    try {
        FloorPlanConstraint plan;
        for (const auto& v : j.at("vertices_en")) {
            if (!v.is_array() || v.size() != 2)
                throw InvalidScenario("floor plan json: vertex must be [east, north]");
            plan.polygon_en.emplace_back(v[0].get<double>(), v[1].get<double>());
        }
        const auto& h = j.at("height_m");
        if (!h.is_array() || h.size() != 2)
            throw InvalidScenario("floor plan json: height_m must be [min, max]");
        plan.height_min_m = h[0].get<double>();
        plan.height_max_m = h[1].get<double>();
        if (plan.polygon_en.size() < 3)
            throw InvalidScenario("floor plan json: need at least 3 vertices");
        if (!(plan.height_min_m <= plan.height_max_m))
            throw InvalidScenario("floor plan json: empty height interval");
        return plan;
    } catch (const json::exception& e) {
        throw InvalidScenario(std::string("floor plan json: ") + e.what());
    }
}

FloorPlanConstraint parse_floor_plan_json(const std::string& path) {
    return parse_floor_plan_json_text(read_text_file(path));
}

} // namespace mirrorfix
