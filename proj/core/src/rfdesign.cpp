#include "mirrorfix/rfdesign.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "mirrorfix/geodesy.hpp"
#include "mirrorfix/textio.hpp"

namespace mirrorfix {

namespace {
constexpr double two_pi = 2.0 * constants::pi;
constexpr double gain_db_floor = -200.0;
constexpr double slope_floor = 1e-12; // A/V below which the IV slope counts as zero
} // namespace

double Polynomial::operator()(double v) const {
    // Horner evaluation.
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * v + *it;
    return acc;
}

Polynomial Polynomial::derivative() const {
    Polynomial d;
    for (std::size_t k = 1; k < coeffs.size(); ++k)
        d.coeffs.push_back(static_cast<double>(k) * coeffs[k]);
    if (d.coeffs.empty()) d.coeffs.push_back(0.0);
    return d;
}

ResonatorSpec make_resonator(double l, double c, double r_parasitic) {
    return {l, c, r_parasitic, resonant_frequency(l, c)};
}

std::complex<double> reflection_coefficient(const Impedance& z_load,
                                            const Impedance& z_antenna) {
    const std::complex<double> zl = z_load.c();
    const std::complex<double> za = z_antenna.c();
    const std::complex<double> den = zl + za;
    if (std::abs(den) == 0.0)
        throw SingularDenominator("reflection_coefficient: Z_L = -Z_A");
    return (zl - std::conj(za)) / den;
}

double reflection_gain_db(const Impedance& z_load, const Impedance& z_antenna) {
    const double mag = std::abs(reflection_coefficient(z_load, z_antenna));
    if (mag == 0.0) return gain_db_floor;
    return std::max(gain_db_floor, 20.0 * std::log10(mag));
}

double resonant_frequency(double l, double c) {
    if (!(l > 0.0) || !(c > 0.0)) throw NonPositiveInput("resonant_frequency: l, c > 0");
    return 1.0 / (two_pi * std::sqrt(l * c));
}

double solve_inductance(double f_c, double c) {
    if (!(f_c > 0.0) || !(c > 0.0)) throw NonPositiveInput("solve_inductance: f_c, c > 0");
    const double w = two_pi * f_c;
    return 1.0 / (w * w * c);
}

double quality_factor(const ResonatorSpec& spec) {
    if (!(spec.l > 0.0) || !(spec.c > 0.0) || !(spec.r_parasitic > 0.0))
        throw NonPositiveInput("quality_factor: l, c, r_parasitic > 0");
    const double f_derived = resonant_frequency(spec.l, spec.c);
    if (std::abs(spec.f_center - f_derived) > 1e-9 * f_derived)
        throw DomainError("quality_factor: f_center inconsistent with l and c");
    return two_pi * spec.f_center * spec.l / spec.r_parasitic;
}

double equivalent_parallel_capacitance(const DiodeModel& diode, double r_nr, double f_c) {
    if (!(f_c > 0.0)) throw NonPositiveInput("equivalent_parallel_capacitance: f_c > 0");
    if (!(r_nr < 0.0))
        throw NonPositiveInput("equivalent_parallel_capacitance: r_nr must be negative");
    const double w = two_pi * f_c;
    const std::complex<double> j{0.0, 1.0};
    // Junction: R_NR in parallel with C_j, then the package branch in series.
    const std::complex<double> y_junction = 1.0 / r_nr + j * w * diode.c_j;
    const std::complex<double> z_branch = diode.r + j * w * diode.l_p + 1.0 / y_junction;
    const std::complex<double> y_total = j * w * diode.c_p + 1.0 / z_branch;
    const double im = y_total.imag();
    if (im <= 0.0)
        throw InductiveEquivalent("net-inductive at f_c: Im(Y) = " + format_double(im) +
                                  " S");
    return im / w;
}

IvFit fit_iv_curve(std::span<const std::pair<double, double>> samples, int degree) {
    const auto n = samples.size();
    if (degree < 0) throw RankDeficient("fit_iv_curve: degree must be >= 0");
    if (n < static_cast<std::size_t>(degree) + 1)
        throw RankDeficient("fit_iv_curve: need at least degree+1 samples");
    for (std::size_t i = 1; i < n; ++i)
        if (!(samples[i].first > samples[i - 1].first))
            throw RankDeficient("fit_iv_curve: biases must be strictly increasing");

    Eigen::MatrixXd vand(n, degree + 1);
    Eigen::VectorXd rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        double p = 1.0;
        for (int k = 0; k <= degree; ++k) {
            vand(i, k) = p;
            p *= samples[i].first;
        }
        rhs(i) = samples[i].second;
    }
    const Eigen::VectorXd sol = vand.colPivHouseholderQr().solve(rhs);

    IvFit fit;
    fit.poly.coeffs.assign(sol.data(), sol.data() + sol.size());
    const Eigen::VectorXd resid = vand * sol - rhs;
    fit.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(n));
    return fit;
}

double negative_resistance(const Polynomial& fit, double bias) {
    const double slope = fit.derivative()(bias);
    if (std::abs(slope) < slope_floor)
        throw ZeroSlope("negative_resistance: dI/dV ~ 0 at bias " + format_double(bias));
    return 1.0 / slope;
}

double noise_figure(const DiodeModel& diode, double r_nr, double f) {
    if (!diode.f_r0 || !(*diode.f_r0 > 0.0))
        throw NonPositiveInput("noise_figure: cutoff frequency f_r0 not set");
    if (f >= *diode.f_r0) throw AboveCutoff("noise_figure: f >= f_r0");
    if (r_nr == 0.0) throw SingularDenominator("noise_figure: r_nr must be nonzero");
    return (1.0 + diode.k_a) / ((1.0 - diode.r / r_nr) * (1.0 - f / *diode.f_r0));
}

BiasScanResult minimize_noise_figure(const DiodeModel& diode,
                                     std::pair<double, double> bias_range, double f,
                                     double step) {
    if (!(step > 0.0)) throw NonPositiveInput("minimize_noise_figure: step > 0");
    if (diode.iv_samples.empty())
        throw DomainError("minimize_noise_figure: diode has no IV samples");
    const double lo = bias_range.first;
    const double hi = bias_range.second;
    if (!(lo <= hi)) throw DomainError("minimize_noise_figure: empty bias range");
    if (lo < diode.iv_samples.front().first || hi > diode.iv_samples.back().first)
        throw DomainError("minimize_noise_figure: bias range outside the fitted IV domain");

    const IvFit fit = fit_iv_curve(diode.iv_samples, diode.fit_degree);
    const Polynomial slope = fit.poly.derivative();

    BiasScanResult best;
    bool found = false;
    const auto steps = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    for (long long k = 0; k <= steps; ++k) {
        const double bias = lo + static_cast<double>(k) * step;
        const double s = slope(bias);
        if (!(s < -slope_floor)) continue; // only the negative resistance region
        const double r_nr = 1.0 / s;
        const double nf = noise_figure(diode, r_nr, f);
        if (!found || nf < best.nf) {
            best = {bias, nf, r_nr};
            found = true;
        }
    }
    if (!found)
        throw NoNegativeResistanceRegion(
            "minimize_noise_figure: no bias with dI/dV < 0 in range");
    return best;
}

std::vector<std::pair<double, double>> parse_iv_csv(const std::string& path) {
    const std::string text = read_text_file(path);
    std::vector<std::pair<double, double>> samples;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line(text.data() + pos,
                              (eol == std::string::npos ? text.size() : eol) - pos);
        pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;
        ++line_no;
        line = trim(line);
        if (line_no == 1) {
            if (line != "bias_v,current_a")
                throw SchemaMismatch("IV csv: expected header 'bias_v,current_a'");
            continue;
        }
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        double bias = 0.0, current = 0.0;
        if (fields.size() != 2 || !parse_double(trim(fields[0]), bias) ||
            !parse_double(trim(fields[1]), current))
            throw MalformedRow(line_no, "IV csv: expected 'bias_v,current_a' numbers");
        samples.emplace_back(bias, current);
    }
    return samples;
}

} // namespace mirrorfix
