#include <doctest.h>

#include <cmath>
#include <random>

#include "mirrorfix/rfdesign.hpp"
#include "mirrorfix/textio.hpp"
#include "test_support.hpp"

using namespace mirrorfix;

namespace {

// Scripted admittance oracle in plain real/imag arithmetic, independent of
// the std::complex path in the implementation.
double ceq_oracle(double c_j, double c_p, double l_p, double r, double r_nr, double f_c) {
    const double w = 2.0 * 3.14159265358979323846 * f_c;
    // junction admittance
    const double gj = 1.0 / r_nr, bj = w * c_j;
    // invert to impedance
    const double den_j = gj * gj + bj * bj;
    const double zr = gj / den_j, zi = -bj / den_j;
    // add series r + jwLp
    const double sr = zr + r, si = zi + w * l_p;
    // invert to admittance
    const double den_s = sr * sr + si * si;
    const double yr = sr / den_s, yi = -si / den_s;
    // parallel package capacitance
    const double im = yi + w * c_p;
    return im / w;
}

std::vector<std::pair<double, double>> sample_poly(const Polynomial& p, double lo,
                                                   double hi, int n) {
    std::vector<std::pair<double, double>> out;
    for (int i = 0; i < n; ++i) {
        const double v = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
        out.emplace_back(v, p(v));
    }
    return out;
}

} // namespace

TEST_CASE("reflection coefficient: matched, negative and passive loads") {
    // conjugate-matched 50 ohm load reflects nothing
    const auto matched = reflection_coefficient({50, 0}, {50, 0});
    CHECK(std::abs(matched) == doctest::Approx(0.0));

    // R_NR = -650 against a 50 ohm antenna amplifies
    const auto amp = reflection_coefficient({-650, 0}, {50, 0});
    CHECK(amp.real() == doctest::Approx(-700.0 / -600.0).epsilon(1e-12));
    CHECK(amp.imag() == doctest::Approx(0.0));
    CHECK(std::norm(amp) == doctest::Approx(1.3611).epsilon(1e-4));

    CHECK_THROWS_AS(reflection_coefficient({-50, 0}, {50, 0}), SingularDenominator);
}

TEST_CASE("passivity: |Gamma| <= 1 whenever Re(Z_L) >= 0 and Re(Z_A) > 0") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> re_l(0.0, 500.0), re_a(1.0, 500.0),
        im(-500.0, 500.0);
    for (int i = 0; i < 1000; ++i) {
        const Impedance zl{re_l(rng), im(rng)};
        const Impedance za{re_a(rng), im(rng)};
        CHECK(std::abs(reflection_coefficient(zl, za)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("reflection gain in dB") {
    CHECK(reflection_gain_db({50, 0}, {50, 0}) == doctest::Approx(-200.0));
    CHECK(std::abs(reflection_gain_db({-650, 0}, {50, 0}) - 1.34) < 0.01);
    // near-match to -Z_A: |Gamma| = 101
    CHECK(reflection_gain_db({-51, 0}, {50, 0}) > 40.0);
    CHECK(reflection_gain_db({-51, 0}, {50, 0}) ==
          doctest::Approx(20.0 * std::log10(101.0)).epsilon(1e-12));
}

TEST_CASE("gain exceeds 0 dB exactly when |Z_L - Z_A*| > |Z_L + Z_A|") {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> re(-400.0, 400.0), im(-400.0, 400.0);
    for (int i = 0; i < 500; ++i) {
        const Impedance zl{re(rng), im(rng)};
        const Impedance za{std::abs(re(rng)) + 1.0, im(rng)};
        const double num = std::abs(zl.c() - std::conj(za.c()));
        const double den = std::abs(zl.c() + za.c());
        if (den == 0.0) continue;
        const double gain = reflection_gain_db(zl, za);
        CHECK((gain > 0.0) == (num > den));
    }
}

TEST_CASE("resonant frequency and inverse inductance solve") {
    CHECK(resonant_frequency(1.0, 1.0) == doctest::Approx(0.15915494309).epsilon(1e-10));

    const double l1 = solve_inductance(1.57542e9, 0.465e-12);
    CHECK(l1 == doctest::Approx(2.195e-8).scale(0.0).epsilon(1e-3)); // 21.95 nH

    CHECK_THROWS_AS(resonant_frequency(0.0, 1.0), NonPositiveInput);
    CHECK_THROWS_AS(solve_inductance(1e9, -1e-12), NonPositiveInput);

    std::mt19937 rng(13);
    std::uniform_real_distribution<double> uf(1e6, 1e10), uc(1e-13, 1e-9);
    for (int i = 0; i < 300; ++i) {
        const double f = uf(rng), c = uc(rng);
        CHECK(resonant_frequency(solve_inductance(f, c), c) ==
              doctest::Approx(f).epsilon(1e-9));
    }
}

TEST_CASE("quality factor") {
    const ResonatorSpec unit = make_resonator(1.0, 1.0, 1.0);
    CHECK(quality_factor(unit) == doctest::Approx(1.0).epsilon(1e-12));

    const double l = 21.95e-9;
    const double c = solve_inductance(1.57542e9, l); // symmetric formula
    ResonatorSpec spec = make_resonator(l, c, 5.0);
    CHECK(std::abs(quality_factor(spec) - 43.46) < 0.05);

    ResonatorSpec half = spec;
    half.r_parasitic = spec.r_parasitic / 2.0;
    CHECK(quality_factor(half) == doctest::Approx(2.0 * quality_factor(spec)).epsilon(1e-12));

    spec.f_center *= 1.001; // breaks the l-c-f invariant
    CHECK_THROWS_AS(quality_factor(spec), DomainError);
}

TEST_CASE("equivalent capacitance against the admittance oracle") {
    DiodeModel diode; // datasheet defaults
    const double got = equivalent_parallel_capacitance(diode, -650.0, 1.57542e9);
    const double expect = ceq_oracle(0.1e-12, 0.3e-12, 1.2e-9, 6.0, -650.0, 1.57542e9);
    CHECK(got == doctest::Approx(expect).scale(0.0).epsilon(1e-12));
    CHECK(got == doctest::Approx(0.40e-12).scale(0.0).epsilon(0.01));
    // within +/-30% of the quoted 0.465 pF equivalent
    CHECK(std::abs(got - 0.465e-12) / 0.465e-12 < 0.30);
}

TEST_CASE("equivalent capacitance degenerate reduction to c_p") {
    DiodeModel diode;
    diode.c_j = 1e-22;
    diode.l_p = 1e-22;
    diode.r = 1e-12;
    const double got = equivalent_parallel_capacitance(diode, -1e15, 1.57542e9);
    CHECK(got == doctest::Approx(diode.c_p).scale(0.0).epsilon(1e-6));
}

TEST_CASE("equivalent capacitance grows with c_p") {
    DiodeModel diode;
    double prev = equivalent_parallel_capacitance(diode, -650.0, 1.57542e9);
    for (double cp = 0.35e-12; cp < 1.0e-12; cp += 0.05e-12) {
        diode.c_p = cp;
        const double cur = equivalent_parallel_capacitance(diode, -650.0, 1.57542e9);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("equivalent capacitance reports net-inductive packages") {
    DiodeModel diode;
    diode.c_j = 1e-15;
    diode.c_p = 1e-15;
    diode.l_p = 100e-9; // inductance dominates
    CHECK_THROWS_AS(equivalent_parallel_capacitance(diode, -650.0, 1.57542e9),
                    InductiveEquivalent);
}

TEST_CASE("IV fit recovers exact polynomials") {
    // exact line, degree 1
    const std::vector<std::pair<double, double>> line{{0.0, 1.0}, {0.1, 1.2}, {0.2, 1.4}};
    const IvFit lf = fit_iv_curve(line, 1);
    CHECK(lf.poly.coeffs[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lf.poly.coeffs[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(lf.residual_rms == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    // cubic I = V^3 - 0.3 V
    Polynomial cubic{{0.0, -0.3, 0.0, 1.0}};
    const auto samples = sample_poly(cubic, -0.6, 0.6, 9);
    const IvFit cf = fit_iv_curve(samples, 3);
    CHECK(cf.poly.coeffs[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(cf.poly.coeffs[1] == doctest::Approx(-0.3).epsilon(1e-9));
    CHECK(cf.poly.coeffs[2] == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(cf.poly.coeffs[3] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("IV fit boundary behavior") {
    const std::vector<std::pair<double, double>> pts{{0.0, 0.0}, {0.1, 0.5}, {0.2, 0.3}};
    CHECK_NOTHROW(fit_iv_curve(pts, 2));                    // exact interpolation
    CHECK_THROWS_AS(fit_iv_curve(pts, 3), RankDeficient);   // degree >= n
    const std::vector<std::pair<double, double>> dup{{0.0, 0.0}, {0.0, 0.5}, {0.2, 0.3}};
    CHECK_THROWS_AS(fit_iv_curve(dup, 1), RankDeficient);   // repeated bias
}

TEST_CASE("negative resistance from the fitted slope") {
    const Polynomial ohmic{{0.0, 4.0}}; // I = 4 V
    CHECK(negative_resistance(ohmic, 0.3) == doctest::Approx(0.25).epsilon(1e-12));

    const Polynomial cubic{{0.0, -0.3, 0.0, 1.0}};
    CHECK(negative_resistance(cubic, 0.0) == doctest::Approx(-1.0 / 0.3).epsilon(1e-12));

    const Polynomial flat{{0.7}};
    CHECK_THROWS_AS(negative_resistance(flat, 0.1), ZeroSlope);
}

TEST_CASE("negative resistance sign follows the slope; fit matches analytic derivative") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0), at(-0.5, 0.5);
    for (int i = 0; i < 200; ++i) {
        Polynomial p{{coeff(rng), coeff(rng), coeff(rng), coeff(rng)}};
        const auto samples = sample_poly(p, -0.7, 0.7, 12);
        const IvFit fit = fit_iv_curve(samples, 3);
        const double v = at(rng);
        const double analytic = p.derivative()(v);
        if (std::abs(analytic) < 1e-6) continue;
        const double r = negative_resistance(fit.poly, v);
        CHECK(r == doctest::Approx(1.0 / analytic).epsilon(1e-6));
        CHECK(std::signbit(r) == std::signbit(analytic));
    }
}

TEST_CASE("noise figure formula") {
    DiodeModel diode;
    diode.f_r0 = 1e10;

    DiodeModel lossless = diode;
    lossless.r = 0.0;
    CHECK(noise_figure(lossless, -650.0, 0.0) == doctest::Approx(2.2).epsilon(1e-12));

    // r=6, R_NR=-650, f/f_r0 = 0.1
    const double nf = noise_figure(diode, -650.0, 1e9);
    CHECK(nf == doctest::Approx(2.4223).scale(0.0).epsilon(1e-3));
    CHECK(10.0 * std::log10(nf) == doctest::Approx(3.842).epsilon(1e-3));

    CHECK_THROWS_AS(noise_figure(diode, -650.0, 1e10), AboveCutoff);
    CHECK_THROWS_AS(noise_figure(diode, 0.0, 1e9), SingularDenominator);
    DiodeModel unset;
    CHECK_THROWS_AS(noise_figure(unset, -650.0, 1e9), NonPositiveInput);
}

TEST_CASE("noise figure grows with frequency and matches re-evaluation") {
    DiodeModel diode;
    diode.f_r0 = 2.3e10;
    double prev = 0.0;
    for (double f = 1e8; f < 2e10; f += 1e9) {
        const double nf = noise_figure(diode, -650.0, f);
        CHECK(nf > prev);
        prev = nf;
    }

    std::mt19937 rng(21);
    std::uniform_real_distribution<double> ur(0.1, 20.0), urnr(-2000.0, -50.0),
        uf(1e6, 2.29e10), uka(0.5, 3.0);
    for (int i = 0; i < 1000; ++i) {
        DiodeModel d;
        d.r = ur(rng);
        d.k_a = uka(rng);
        d.f_r0 = 2.3e10;
        const double r_nr = urnr(rng);
        const double f = uf(rng);
        const double expect =
            (1.0 + d.k_a) / ((1.0 - d.r / r_nr) * (1.0 - f / *d.f_r0));
        CHECK(noise_figure(d, r_nr, f) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("bias scan finds the NF minimum inside the NR region") {
    DiodeModel diode;
    diode.f_r0 = 2.3e10;
    diode.fit_degree = 3;
    const Polynomial cubic{{0.0, -0.3, 0.0, 1.0}}; // NR region (-0.316, 0.316)
    diode.iv_samples = sample_poly(cubic, -0.6, 0.6, 13);

    const auto result = minimize_noise_figure(diode, {-0.5, 0.5}, 1.57542e9);
    CHECK(result.r_nr < 0.0);
    CHECK(std::abs(result.bias) < 0.3162);

    // fine-grid oracle: the coarse argmin lies within one coarse step
    const auto fine = minimize_noise_figure(diode, {-0.5, 0.5}, 1.57542e9, 1e-4);
    CHECK(std::abs(result.bias - fine.bias) <= 1e-3 + 1e-9);
    CHECK(result.nf >= fine.nf);

    // two-candidate grid returns the lower NF
    const auto coarse = minimize_noise_figure(diode, {0.0, 0.25}, 1.57542e9, 0.25);
    const IvFit fit = fit_iv_curve(diode.iv_samples, 3);
    const double nf0 = noise_figure(diode, negative_resistance(fit.poly, 0.0), 1.57542e9);
    const double nf1 = noise_figure(diode, negative_resistance(fit.poly, 0.25), 1.57542e9);
    CHECK(coarse.nf == doctest::Approx(std::min(nf0, nf1)).epsilon(1e-12));

    // ohmic diode has no NR region
    DiodeModel ohmic = diode;
    ohmic.fit_degree = 1;
    ohmic.iv_samples = sample_poly(Polynomial{{0.0, 2.0}}, -0.5, 0.5, 5);
    CHECK_THROWS_AS(minimize_noise_figure(ohmic, {-0.4, 0.4}, 1.57542e9),
                    NoNegativeResistanceRegion);

    CHECK_THROWS_AS(minimize_noise_figure(diode, {-0.9, 0.5}, 1.57542e9), DomainError);
}

TEST_CASE("IV csv parsing") {
    const auto dir = test_support::scratch_dir("ivcsv");
    const auto path = (dir / "iv.csv").string();
    write_text_file(path, "bias_v,current_a\n0.0,0.0\n0.05,0.0012\n0.1,0.0018\n");
    const auto samples = parse_iv_csv(path);
    REQUIRE(samples.size() == 3);
    CHECK(samples[1].first == doctest::Approx(0.05));
    CHECK(samples[2].second == doctest::Approx(0.0018));

    write_text_file(path, "volts,amps\n0,0\n");
    CHECK_THROWS_AS(parse_iv_csv(path), SchemaMismatch);
    write_text_file(path, "bias_v,current_a\n0.0,abc\n");
    CHECK_THROWS_AS(parse_iv_csv(path), MalformedRow);
}
