#include "mirrorfix/measurements.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "mirrorfix/textio.hpp"

namespace mirrorfix {

namespace {

bool class_from_char(char c, ScatterClass& out) {
    switch (c) {
    case 'S': out = ScatterClass::scattered; return true;
    case 'D': out = ScatterClass::direct; return true;
    case 'U': out = ScatterClass::unknown; return true;
    default: return false;
    }
}

auto row_key(const Measurement& m) {
    return std::tuple(m.epoch_ms, m.svid, static_cast<char>(m.scattered));
}

void sort_rows(std::vector<Measurement>& rows) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Measurement& a, const Measurement& b) {
                         return row_key(a) < row_key(b);
                     });
}

// Splits text into lines; the trailing newline does not produce an empty line.
std::vector<std::string_view> csv_lines(const std::string& text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) {
            lines.emplace_back(text.data() + pos, text.size() - pos);
            break;
        }
        lines.emplace_back(text.data() + pos, eol - pos);
        pos = eol + 1;
    }
    return lines;
}

} // namespace

std::vector<std::int64_t> MeasurementSet::epochs() const {
    std::vector<std::int64_t> out;
    for (const auto& m : rows)
        if (out.empty() || out.back() != m.epoch_ms) out.push_back(m.epoch_ms);
    return out;
}

std::vector<Measurement> MeasurementSet::epoch_slice(std::int64_t epoch_ms) const {
    std::vector<Measurement> out;
    for (const auto& m : rows)
        if (m.epoch_ms == epoch_ms) out.push_back(m);
    return out;
}

std::vector<int> MeasurementSet::svids() const {
    std::set<int> ids;
    for (const auto& m : rows) ids.insert(m.svid);
    return {ids.begin(), ids.end()};
}

Ambiguity estimate_ambiguity(const Measurement& m, double wavelength) {
    if (!m.adr_valid) throw CarrierUnlocked("estimate_ambiguity: carrier not locked");
    if (!m.pseudorange_plausible())
        throw OutOfBand("estimate_ambiguity: pseudorange out of plausible band");
    // std::round is round-half-away-from-zero, the decided tie rule.
    const double cycles = (m.adr_m - m.pseudorange_m) / wavelength;
    return {m.svid, static_cast<long long>(std::llround(cycles)), m.epoch_ms};
}

MeasurementSet parse_measurement_csv_text(const std::string& text) {
    const auto lines = csv_lines(text);
    if (lines.empty() || trim(lines[0]) != measurement_csv_header)
        throw SchemaMismatch(std::string("measurement csv: expected header '") +
                             measurement_csv_header + "'");

    MeasurementSet set;
    std::vector<std::pair<std::size_t, std::string>> bad;
    std::set<std::tuple<std::int64_t, int, char>> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const std::string_view line = trim(lines[i]);
        if (line.empty()) continue;
        const auto f = split_fields(line);
        Measurement m;
        std::int64_t adr_valid = 0;
        std::string reason;
        if (f.size() != 7) {
            reason = "expected 7 fields";
        } else if (!parse_int64(trim(f[0]), m.epoch_ms)) {
            reason = "bad epoch_ms";
        } else if (!parse_int(trim(f[1]), m.svid)) {
            reason = "bad svid";
        } else if (!parse_double(trim(f[2]), m.cn0_dbhz)) {
            reason = "bad cn0_dbhz";
        } else if (!parse_double(trim(f[3]), m.pseudorange_m)) {
            reason = "bad pseudorange_m";
        } else if (!parse_double(trim(f[4]), m.adr_m)) {
            reason = "bad adr_m";
        } else if (!parse_int64(trim(f[5]), adr_valid) || (adr_valid != 0 && adr_valid != 1)) {
            reason = "adr_valid must be 0 or 1";
        } else if (trim(f[6]).size() != 1 || !class_from_char(trim(f[6])[0], m.scattered)) {
            reason = "scattered must be S, D or U";
        } else if (m.cn0_dbhz < 0.0 || m.cn0_dbhz > 70.0) {
            reason = "cn0_dbhz outside [0, 70]";
        }
        if (reason.empty()) {
            m.adr_valid = adr_valid == 1;
            if (!seen.insert({m.epoch_ms, m.svid, static_cast<char>(m.scattered)}).second)
                reason = "duplicate (epoch, svid, scattered)";
        }
        if (!reason.empty()) {
            bad.emplace_back(line_no, reason);
            continue;
        }
        set.rows.push_back(m);
    }
    if (!bad.empty()) {
        std::string what = "measurement csv: " + std::to_string(bad.size()) + " bad row(s):";
        for (const auto& [ln, why] : bad)
            what += " [line " + std::to_string(ln) + ": " + why + "]";
        throw MalformedRow(bad.front().first, what);
    }
    sort_rows(set.rows);
    return set;
}

MeasurementSet parse_measurement_csv(const std::string& path) {
    return parse_measurement_csv_text(read_text_file(path));
}

std::string serialize_measurement_csv(const MeasurementSet& set) {
    std::string out = measurement_csv_header;
    out += '\n';
    for (const auto& m : set.rows) {
        out += format_int(m.epoch_ms);
        out += ',';
        out += format_int(m.svid);
        out += ',';
        out += format_double(m.cn0_dbhz);
        out += ',';
        out += format_double(m.pseudorange_m);
        out += ',';
        out += format_double(m.adr_m);
        out += ',';
        out += m.adr_valid ? '1' : '0';
        out += ',';
        out += static_cast<char>(m.scattered);
        out += '\n';
    }
    return out;
}

void write_measurement_csv(const MeasurementSet& set, const std::string& path) {
    write_text_file(path, serialize_measurement_csv(set));
}

MeasurementSet convert_raw_log_text(const std::string& text, const std::string& clock_model,
                                    RawConvertReport* report) {
    if (clock_model != "simple")
        throw DomainError("convert_raw_log: unknown clock model '" + clock_model + "'");
    const auto lines = csv_lines(text);
    if (lines.empty() || trim(lines[0]) != raw_log_header)
        throw SchemaMismatch(std::string("raw log: expected header '") + raw_log_header +
                             "'");

    constexpr double week_ns = 604800.0 * 1e9;
    MeasurementSet set;
    RawConvertReport local;
    std::set<std::tuple<std::int64_t, int, char>> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const std::string_view line = trim(lines[i]);
        if (line.empty()) continue;
        const auto f = split_fields(line);
        Measurement m;
        m.scattered = ScatterClass::unknown;
        double t_rx_ns = 0.0, t_tx_ns = 0.0;
        std::int64_t adr_state = 0;
        std::string reason;
        if (f.size() != 7) {
            reason = "expected 7 fields";
        } else if (!parse_int64(trim(f[0]), m.epoch_ms) || !parse_int(trim(f[1]), m.svid) ||
                   !parse_double(trim(f[2]), m.cn0_dbhz) ||
                   !parse_double(trim(f[3]), t_rx_ns) || !parse_double(trim(f[4]), t_tx_ns) ||
                   !parse_double(trim(f[5]), m.adr_m) || !parse_int64(trim(f[6]), adr_state)) {
            reason = "missing or non-numeric field";
        }
        if (reason.empty()) {
            double tof_ns = t_rx_ns - t_tx_ns;
            // GPS week rollover: transmit timestamps wrap every 604800 s.
            if (tof_ns < -week_ns / 2.0) tof_ns += week_ns;
            if (tof_ns > week_ns / 2.0) tof_ns -= week_ns;
            if (tof_ns < 0.0) {
                reason = "negative time of flight";
            } else {
                m.pseudorange_m = constants::speed_of_light * tof_ns * 1e-9;
                m.adr_valid = (adr_state & 1) != 0;
                if (!seen.insert({m.epoch_ms, m.svid, static_cast<char>(m.scattered)}).second)
                    reason = "duplicate (epoch, svid)";
            }
        }
        if (!reason.empty()) {
            local.skipped.emplace_back(line_no, reason);
            continue;
        }
        set.rows.push_back(m);
        ++local.converted;
    }
    sort_rows(set.rows);
    if (report) *report = std::move(local);
    return set;
}

MeasurementSet convert_raw_log(const std::string& path, const std::string& clock_model,
                               RawConvertReport* report) {
    return convert_raw_log_text(read_text_file(path), clock_model, report);
}

} // namespace mirrorfix
