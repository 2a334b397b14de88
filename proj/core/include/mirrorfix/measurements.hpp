#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mirrorfix/errors.hpp"
#include "mirrorfix/geodesy.hpp"

namespace mirrorfix {

enum class ScatterClass : char {
    scattered = 'S',
    direct = 'D',
    unknown = 'U',
};

/// One satellite's observation at one epoch.
struct Measurement {
    std::int64_t epoch_ms = 0; // receiver timescale
    int svid = 0;
    double cn0_dbhz = 0.0;
    double pseudorange_m = 0.0;
    double adr_m = 0.0; // accumulated delta range, Phi = lambda * phi
    bool adr_valid = false;
    ScatterClass scattered = ScatterClass::unknown;

    /// Out-of-band pseudoranges are flagged, never rejected.
    bool pseudorange_plausible() const {
        return pseudorange_m >= 1.8e7 && pseudorange_m <= 3.0e7;
    }

    friend bool operator==(const Measurement&, const Measurement&) = default;
};

/// Epoch-ordered observations sharing one carrier wavelength.
struct MeasurementSet {
    std::vector<Measurement> rows; // sorted by (epoch, svid, class)
    double wavelength = constants::gps_l1_wavelength;

    std::vector<std::int64_t> epochs() const;
    std::vector<Measurement> epoch_slice(std::int64_t epoch_ms) const;
    std::vector<int> svids() const;

    friend bool operator==(const MeasurementSet&, const MeasurementSet&) = default;
};

/// Whole-cycle carrier ambiguity for one satellite.
struct Ambiguity {
    int svid = 0;
    long long n = 0; // cycles
    std::int64_t reference_epoch = 0;
};

/// N = round((Phi - rho) / lambda), half away from zero. Throws
/// CarrierUnlocked without carrier lock, OutOfBand for implausible rho.
Ambiguity estimate_ambiguity(const Measurement& m, double wavelength);

inline constexpr const char* measurement_csv_header =
    "epoch_ms,svid,cn0_dbhz,pseudorange_m,adr_m,adr_valid,scattered";

MeasurementSet parse_measurement_csv(const std::string& path);
MeasurementSet parse_measurement_csv_text(const std::string& text);
std::string serialize_measurement_csv(const MeasurementSet& set);
void write_measurement_csv(const MeasurementSet& set, const std::string& path);

/// Row-level report from raw-log conversion: skipped rows with reasons.
struct RawConvertReport {
    std::size_t converted = 0;
    std::vector<std::pair<std::size_t, std::string>> skipped; // (line_no, reason)
};

inline constexpr const char* raw_log_header =
    "utc_ms,svid,cn0_dbhz,t_rx_ns,t_tx_ns,adr_m,adr_state";

/// Converts the documented raw-log column subset into canonical measurements:
/// pseudorange = c * (t_rx - t_tx) with GPS week-rollover normalization.
/// Only the "simple" clock model exists. Rows lacking required fields or
/// with a negative time of flight are skipped and reported.
MeasurementSet convert_raw_log(const std::string& path, const std::string& clock_model,
                               RawConvertReport* report = nullptr);
MeasurementSet convert_raw_log_text(const std::string& text, const std::string& clock_model,
                                    RawConvertReport* report = nullptr);

} // namespace mirrorfix
