#pragma once

// Self-similar factor approximants
//
//   f*(t) = c0 t^p prod_j (1 + A_j t)^{n_j}
//
// trained so that the Taylor expansion of f*/(c0 t^p) about t = 0 reproduces
// a given series 1 + a_1 t + ... + a_k t^k, optionally subject to the
// large-variable boundary condition f ~ C t^nu.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace singreg {

struct Factor {
    double A = 0.0;
    double n = 0.0;
};

// f_0(t) = amplitude * t^power. An unknown amplitude is fixed by the
// boundary condition during training.
struct Prefactor {
    std::optional<double> amplitude = 1.0;
    double power = 0.0;
};

struct SeriesInput {
    std::vector<double> coeffs; // a_0 = 1, a_1..a_k
    Prefactor prefactor;
};

struct BoundaryData {
    double amplitude = 1.0; // C
    double exponent = 0.0;  // nu
};

class FactorApproximant {
public:
    FactorApproximant() = default;
    FactorApproximant(double amplitude, double power, std::vector<Factor> factors);

    double amplitude() const { return amplitude_; }
    double power() const { return power_; }
    const std::vector<Factor>& factors() const { return factors_; }

    double operator()(double t) const { return evaluate(t); }
    double evaluate(double t) const;
    Eigen::ArrayXd evaluate(const Eigen::ArrayXd& t) const;

private:
    double amplitude_ = 1.0;
    double power_ = 0.0;
    std::vector<Factor> factors_;
};

struct TrainOptions {
    unsigned starts = 16;
    unsigned max_iterations = 200;
    double tolerance = 1e-10;
    std::uint64_t seed = 0;
};

// Solves the training conditions (and boundary conditions when given) for N
// factors. Throws ConstructionError when no real solution is found and
// DegeneracyError for the a_1 = 0, N = 1 boundary-constrained case.
FactorApproximant train(const SeriesInput& series, const std::optional<BoundaryData>& boundary,
                        std::size_t factor_count, const TrainOptions& options = {});

// Largest absolute residual of the training and boundary equations.
double training_residual(const FactorApproximant& fa, const SeriesInput& series,
                         const std::optional<BoundaryData>& boundary);

// First k+1 Taylor coefficients of prod_j (1 + A_j t)^{n_j}.
template <typename Scalar>
std::vector<Scalar> taylor_coefficients(const std::vector<Scalar>& A, const std::vector<Scalar>& n,
                                        std::size_t k)
{
    // log of the product has coefficients L_m = sum_j n_j (-1)^{m+1} A_j^m / m;
    // exponentiate with b_m = (1/m) sum_{i=1..m} i L_i b_{m-i}.
    std::vector<Scalar> L(k + 1, Scalar(0));
    for (std::size_t j = 0; j < A.size(); ++j) {
        Scalar power = Scalar(1);
        for (std::size_t m = 1; m <= k; ++m) {
            power = power * A[j];
            const double sign = (m % 2 == 1) ? 1.0 : -1.0;
            L[m] = L[m] + n[j] * power * (sign / static_cast<double>(m));
        }
    }
    std::vector<Scalar> b(k + 1, Scalar(0));
    b[0] = Scalar(1);
    for (std::size_t m = 1; m <= k; ++m) {
        Scalar sum = Scalar(0);
        for (std::size_t i = 1; i <= m; ++i)
            sum = sum + L[i] * b[m - i] * static_cast<double>(i);
        b[m] = sum / static_cast<double>(m);
    }
    return b;
}

std::vector<double> taylor_coefficients(const FactorApproximant& fa, std::size_t k);

struct LargeXBehavior {
    double amplitude = 0.0;
    double exponent = 0.0;
};

// f* ~ c0 prod A_j^{n_j} t^{p + sum n_j} as t -> infinity.
LargeXBehavior large_x_behavior(const FactorApproximant& fa);

struct ClosedFormConstants {
    double A = 0.0;
    double alpha = 0.0;
    double mu = 0.0;
};

// Two-term, boundary-constrained single-factor solution for the scattering
// series: alpha = n/(n-2), A = (n-2) Lambda (1/4 - mu^2) / (2 s0 alpha).
ClosedFormConstants closed_form_constants(double n, double lambda, double s0);

// The same A through the Gamma-function ratio Gamma(mu+3/2)/Gamma(mu+1/2).
double closed_form_A_gamma(double n, double lambda, double s0);

// Plain-text record, 17 significant digits.
std::string to_text(const FactorApproximant& fa);
FactorApproximant from_text(const std::string& text);

} // namespace singreg
