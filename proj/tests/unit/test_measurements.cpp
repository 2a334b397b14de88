#include <doctest.h>

#include <cmath>
#include <random>

#include "mirrorfix/measurements.hpp"
#include "mirrorfix/textio.hpp"
#include "test_support.hpp"

using namespace mirrorfix;

namespace {

MeasurementSet random_set(std::mt19937& rng, std::size_t n) {
    std::uniform_int_distribution<std::int64_t> epoch(0, 20);
    std::uniform_int_distribution<int> svid(1, 32);
    std::uniform_real_distribution<double> cn0(0.0, 70.0);
    std::uniform_real_distribution<double> pr(1.7e7, 3.1e7);
    std::uniform_real_distribution<double> adr(1.7e7, 3.1e7);
    std::uniform_int_distribution<int> flag(0, 1);
    std::uniform_int_distribution<int> cls(0, 2);
    MeasurementSet set;
    std::set<std::tuple<std::int64_t, int, char>> seen;
    while (set.rows.size() < n) {
        Measurement m;
        m.epoch_ms = epoch(rng) * 1000;
        m.svid = svid(rng);
        m.cn0_dbhz = cn0(rng);
        m.pseudorange_m = pr(rng);
        m.adr_m = adr(rng);
        m.adr_valid = flag(rng) == 1;
        m.scattered = cls(rng) == 0   ? ScatterClass::scattered
                      : cls(rng) == 1 ? ScatterClass::direct
                                      : ScatterClass::unknown;
        if (!seen.insert({m.epoch_ms, m.svid, static_cast<char>(m.scattered)}).second)
            continue;
        set.rows.push_back(m);
    }
    return set;
}

} // namespace

TEST_CASE("ambiguity estimate") {
    Measurement m;
    m.svid = 4;
    m.epoch_ms = 5000;
    m.adr_valid = true;
    m.pseudorange_m = 2e7;

    m.adr_m = m.pseudorange_m; // Phi == rho
    CHECK(estimate_ambiguity(m, 0.19029367).n == 0);

    // rho = 1000 is far out of band, so shift both by a plausible offset
    m.pseudorange_m = 2e7 + 1000.0;
    m.adr_m = 2e7 + 1019.03;
    const Ambiguity a = estimate_ambiguity(m, 0.19029367);
    CHECK(a.n == 100);
    CHECK(a.svid == 4);
    CHECK(a.reference_epoch == 5000);

    // exact half-cycle ties round away from zero (lambda chosen binary-exact)
    m.pseudorange_m = 2e7;
    m.adr_m = 2e7 + 0.125;
    CHECK(estimate_ambiguity(m, 0.25).n == 1);
    m.adr_m = 2e7 - 0.125;
    CHECK(estimate_ambiguity(m, 0.25).n == -1);

    m.adr_valid = false;
    CHECK_THROWS_AS(estimate_ambiguity(m, 0.25), CarrierUnlocked);
    m.adr_valid = true;
    m.pseudorange_m = 1000.0;
    CHECK_THROWS_AS(estimate_ambiguity(m, 0.25), OutOfBand);
}

TEST_CASE("ambiguity is translation-consistent in whole cycles") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> frac(0.05, 0.45);
    std::uniform_int_distribution<int> cycles(-2000, 2000), shift(-50, 50);
    const double lambda = 0.19029367;
    for (int i = 0; i < 300; ++i) {
        Measurement m;
        m.adr_valid = true;
        m.pseudorange_m = 2.2e7;
        const int n = cycles(rng);
        m.adr_m = m.pseudorange_m + (n + frac(rng)) * lambda;
        const int k = shift(rng);
        Measurement shifted = m;
        shifted.adr_m += k * lambda;
        CHECK(estimate_ambiguity(shifted, lambda).n == estimate_ambiguity(m, lambda).n + k);
    }
}

TEST_CASE("pseudorange plausibility flag") {
    Measurement m;
    m.pseudorange_m = 2.2e7;
    CHECK(m.pseudorange_plausible());
    m.pseudorange_m = 1.7e7;
    CHECK_FALSE(m.pseudorange_plausible());
    m.pseudorange_m = 3.5e7;
    CHECK_FALSE(m.pseudorange_plausible());
}

TEST_CASE("csv parse: empty body, schema and row errors") {
    const std::string header = std::string(measurement_csv_header) + "\n";
    CHECK(parse_measurement_csv_text(header).rows.empty());

    CHECK_THROWS_AS(parse_measurement_csv_text("epoch,svid\n1,2\n"), SchemaMismatch);

    // malformed numeric field carries the line number
    try {
        parse_measurement_csv_text(header + "1000,5,44.5,xyz,0,1,D\n");
        FAIL("expected MalformedRow");
    } catch (const MalformedRow& e) {
        CHECK(e.line_no() == 2);
    }

    // duplicate (epoch, svid, scattered)
    const std::string dup = header + "1000,5,44.5,2e7,0,1,D\n1000,5,40,2.1e7,0,1,D\n";
    CHECK_THROWS_AS(parse_measurement_csv_text(dup), MalformedRow);

    // cn0 outside [0, 70]
    CHECK_THROWS_AS(parse_measurement_csv_text(header + "1000,5,90,2e7,0,1,D\n"),
                    MalformedRow);
}

TEST_CASE("csv parse sorts epochs ascending") {
    const std::string text = std::string(measurement_csv_header) +
                             "\n3000,5,40,2e7,0,0,D\n1000,9,40,2e7,0,0,D\n1000,5,40,2e7,0,0,D\n";
    const MeasurementSet set = parse_measurement_csv_text(text);
    REQUIRE(set.rows.size() == 3);
    CHECK(set.rows[0].epoch_ms == 1000);
    CHECK(set.rows[0].svid == 5);
    CHECK(set.rows[1].svid == 9);
    CHECK(set.rows[2].epoch_ms == 3000);
    CHECK(set.epochs() == std::vector<std::int64_t>{1000, 3000});
}

TEST_CASE("golden csv parses to the exact hand-computed values") {
    const MeasurementSet set =
        parse_measurement_csv(std::string(MIRRORFIX_TEST_DATA_DIR) +
                              "/golden_measurements.csv");
    REQUIRE(set.rows.size() == 3);
    // 70 ms time of flight: 0.070 * 299792458
    CHECK(set.rows[0].epoch_ms == 1000);
    CHECK(set.rows[0].svid == 5);
    CHECK(set.rows[0].cn0_dbhz == 44.5);
    CHECK(set.rows[0].pseudorange_m == 20985472.06);
    CHECK(set.rows[0].adr_m == 20985491.08);
    CHECK(set.rows[0].adr_valid);
    CHECK(set.rows[0].scattered == ScatterClass::direct);
    CHECK(set.rows[1].svid == 7);
    CHECK(set.rows[1].cn0_dbhz == 38.0);
    CHECK_FALSE(set.rows[1].adr_valid);
    CHECK(set.rows[1].scattered == ScatterClass::scattered);
    CHECK(set.rows[2].epoch_ms == 2000);
    CHECK(set.rows[2].scattered == ScatterClass::unknown);
}

TEST_CASE("golden csv round-trips byte for byte") {
    const std::string path =
        std::string(MIRRORFIX_TEST_DATA_DIR) + "/golden_measurements.csv";
    const std::string bytes = read_text_file(path);
    CHECK(serialize_measurement_csv(parse_measurement_csv_text(bytes)) == bytes);
}

TEST_CASE("parse(serialize(set)) == set for generated sets") {
    std::mt19937 rng(41);
    for (int i = 0; i < 50; ++i) {
        const MeasurementSet set = [&] {
            MeasurementSet s = random_set(rng, 40);
            // canonical order is part of the contract
            return parse_measurement_csv_text(serialize_measurement_csv(s));
        }();
        const MeasurementSet round = parse_measurement_csv_text(serialize_measurement_csv(set));
        CHECK(round == set);
    }
}

TEST_CASE("raw log conversion") {
    const std::string header = std::string(raw_log_header) + "\n";

    SUBCASE("70 ms time of flight") {
        const std::string text = header + "1000,5,44.5,100000000000,99930000000,12.5,1\n";
        RawConvertReport report;
        const MeasurementSet set = convert_raw_log_text(text, "simple", &report);
        REQUIRE(set.rows.size() == 1);
        CHECK(std::abs(set.rows[0].pseudorange_m - 0.070 * 299792458.0) < 1e-6);
        CHECK(std::abs(set.rows[0].pseudorange_m - 2.0985e7) < 1000.0);
        CHECK(set.rows[0].adr_valid);
        CHECK(set.rows[0].scattered == ScatterClass::unknown);
        CHECK(report.converted == 1);
        CHECK(report.skipped.empty());
    }

    SUBCASE("negative time of flight is skipped and reported") {
        const std::string text = header + "1000,5,44.5,100,200,0,0\n" +
                                 "1000,6,40,100000000000,99930000000,0,0\n";
        RawConvertReport report;
        const MeasurementSet set = convert_raw_log_text(text, "simple", &report);
        CHECK(set.rows.size() == 1);
        CHECK(set.rows[0].svid == 6);
        REQUIRE(report.skipped.size() == 1);
        CHECK(report.skipped[0].first == 2);
    }

    SUBCASE("week rollover normalization") {
        // receive stamp just after the week wrap, transmit just before it
        const double week_ns = 604800e9;
        const std::string text =
            header + "1000,5,44.5,70000000," + format_double(week_ns - 1e6) + ",0,0\n";
        const MeasurementSet set = convert_raw_log_text(text, "simple", nullptr);
        REQUIRE(set.rows.size() == 1);
        const double tof_s = (70000000.0 + 1e6) * 1e-9;
        CHECK(set.rows[0].pseudorange_m ==
              doctest::Approx(tof_s * 299792458.0).scale(0.0).epsilon(1e-12));
    }

    SUBCASE("rows lacking fields are skipped, bad header rejects") {
        RawConvertReport report;
        const MeasurementSet set =
            convert_raw_log_text(header + "1000,5,44.5\n", "simple", &report);
        CHECK(set.rows.empty());
        CHECK(report.skipped.size() == 1);
        CHECK_THROWS_AS(convert_raw_log_text("a,b\n", "simple", nullptr), SchemaMismatch);
        CHECK_THROWS_AS(convert_raw_log_text(header, "fancy", nullptr), DomainError);
    }
}
