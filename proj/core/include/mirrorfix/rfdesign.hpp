#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mirrorfix/errors.hpp"

namespace mirrorfix {

/// Complex impedance in ohms.
struct Impedance {
    double real = 0.0;
    double imag = 0.0;
    std::complex<double> c() const { return {real, imag}; }
};

/// Tunnel-diode small-signal model and measured IV curve.
///
/// Parasitic defaults are the MBD1057 datasheet values. f_r0 (resistive
/// cutoff) has no default and must be supplied before any noise-figure work.
struct DiodeModel {
    double c_j = 0.1e-12; // junction capacitance, F
    double c_p = 0.3e-12; // package capacitance, F
    double l_p = 1.2e-9;  // package inductance, H
    double r = 6.0;       // series (board) resistance, ohm
    std::vector<std::pair<double, double>> iv_samples; // (bias V, current A)
    int fit_degree = 9;
    double k_a = 1.2; // noise factor
    std::optional<double> f_r0; // cutoff frequency, Hz
};

/// Series LC resonator with parasitic loss. f_center must satisfy
/// f_center = 1/(2*pi*sqrt(l*c)) within 1e-9 relative.
struct ResonatorSpec {
    double l = 0.0;           // H
    double c = 0.0;           // F
    double r_parasitic = 0.0; // ohm
    double f_center = 0.0;    // Hz
};

/// Builds a consistent ResonatorSpec (f_center derived from l and c).
ResonatorSpec make_resonator(double l, double c, double r_parasitic);

/// Polynomial with ascending coefficients: c0 + c1*v + c2*v^2 + ...
struct Polynomial {
    std::vector<double> coeffs;
    double operator()(double v) const;
    Polynomial derivative() const;
};

struct IvFit {
    Polynomial poly;
    double residual_rms = 0.0; // A
};

/// Gamma = (Z_L - conj(Z_A)) / (Z_L + Z_A). Throws SingularDenominator
/// when Z_L = -Z_A.
std::complex<double> reflection_coefficient(const Impedance& z_load,
                                            const Impedance& z_antenna);

/// 10*log10(|Gamma|^2), floored at -200 dB for a matched load.
double reflection_gain_db(const Impedance& z_load, const Impedance& z_antenna);

/// f_c = 1 / (2*pi*sqrt(L*C)).
double resonant_frequency(double l, double c);

/// L = 1 / ((2*pi*f_c)^2 * C), the inverse of resonant_frequency in L.
double solve_inductance(double f_c, double c);

/// Q = 2*pi*f_center*L / R.
double quality_factor(const ResonatorSpec& spec);

/// Equivalent parallel capacitance of the packaged diode at f_c.
///
/// Topology: C_p in parallel with [r + j*w*L_p in series with
/// (C_j parallel R_NR)]; returns Im(Y)/(2*pi*f_c). Throws
/// InductiveEquivalent when the package is net-inductive at f_c.
double equivalent_parallel_capacitance(const DiodeModel& diode, double r_nr, double f_c);

/// Least-squares polynomial fit of IV samples. Exact interpolation
/// (degree == n-1) is allowed; degree >= n or repeated biases throw
/// RankDeficient.
IvFit fit_iv_curve(std::span<const std::pair<double, double>> samples, int degree);

/// R_NR = 1 / F'(bias). Throws ZeroSlope at IV-curve extrema.
double negative_resistance(const Polynomial& fit, double bias);

/// NF = (1 + K_a) / [(1 - r/R_NR) * (1 - f/f_r0)], linear (not dB).
double noise_figure(const DiodeModel& diode, double r_nr, double f);

struct BiasScanResult {
    double bias = 0.0; // V
    double nf = 0.0;   // linear
    double r_nr = 0.0; // ohm
};

/// Grid search over bias (default step 1 mV) restricted to the negative
/// resistance region; returns the bias minimizing NF.
BiasScanResult minimize_noise_figure(const DiodeModel& diode,
                                     std::pair<double, double> bias_range, double f,
                                     double step = 1e-3);

/// Reads a two-column CSV `bias_v,current_a` (header required).
std::vector<std::pair<double, double>> parse_iv_csv(const std::string& path);

} // namespace mirrorfix
