#pragma once

// Small-x asymptotics of the zero-energy scattering solution,
//
//   phi(x) ~ C x^{n/4} sum_p a_p t^p exp(e(x)),   t = x^{n/2-1},
//
// the decaying-at-the-origin branch of sqrt(x) Z_mu with s frozen.

#include <cstddef>
#include <vector>

#include "singreg/potentials.hpp"

namespace singreg {

// mu = -1/(n-2).
double mu_of(double n);

// a_0..a_k from the pole-free Gamma recurrence
//   Gamma(mu+p+1/2)/Gamma(mu-p+1/2) = prod_{j<p} (mu+1/2+j)(mu-1/2-j).
std::vector<double> series_coefficients(double n, double lambda, double s0, std::size_t k);

struct ShortRangeExpansion {
    double n = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
    double s0 = 0.0;
    std::size_t order = 0;
    std::vector<double> coeffs;

    // Expansion variable t = x^{n/2-1}.
    double variable(double x) const;
    // sum_p a_p t^p and its t-derivative.
    double polynomial(double t) const;
    double polynomial_derivative(double t) const;
};

ShortRangeExpansion make_expansion(const PotentialSpec& p, double lambda, std::size_t order = 1);

// e(x) = -2 x sgn(v) sqrt|v| / ((n-2) Lambda).
double exponent_term(const PotentialSpec& p, double lambda, double x);
// Same quantity written through s(x): -2 s(x) x / ((n-2) Lambda x^{n/2}).
double exponent_term_via_s(const PotentialSpec& p, double lambda, double x);

// Slope of the exponent with s frozen at its local value: sgn(v) sqrt|v| / Lambda.
double exponent_slope(const PotentialSpec& p, double lambda, double x);

double eval_series_solution(const ShortRangeExpansion& expansion, const PotentialSpec& p,
                            double amplitude, double x);

// log|phi| of the truncated series (amplitude 1); finite where the value underflows.
double series_log_value(const ShortRangeExpansion& expansion, const PotentialSpec& p, double x);

// phi'/phi of the truncated series with s held as a local constant.
double series_log_derivative(const ShortRangeExpansion& expansion, const PotentialSpec& p,
                             double x);

} // namespace singreg
