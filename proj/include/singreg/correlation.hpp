#pragma once

// Regularizing correlation function
//
//   g(x) = (A t / (1 + A t))^alpha exp(-4 x sgn(v) sqrt|v| / ((n-2) Lambda)),
//   t = x^{n/2-1},
//
// the square of the extrapolated scattering solution, and the regularized
// potential Phi = g v.

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "singreg/factor_approximants.hpp"
#include "singreg/potentials.hpp"
#include "singreg/quadrature.hpp"
#include "singreg/shortrange_series.hpp"

namespace singreg {

struct CorrelationModel {
    PotentialSpec potential;
    double lambda = 0.0;
    double A = 0.0;
    double alpha = 0.0;
    double mu = 0.0;
    double s0 = 0.0;
};

// Below this x a Lennard-Jones-class g is exactly zero.
inline constexpr double kCoreFloor = 1e-3;
// exp(x) underflows double precision below this.
inline constexpr double kExpUnderflow = -745.0;

CorrelationModel build_model(const PotentialSpec& potential, double lambda);

double g(const CorrelationModel& model, double x);
Eigen::ArrayXd g(const CorrelationModel& model, const Eigen::ArrayXd& x);

double phi_reg(const CorrelationModel& model, double x);
Eigen::ArrayXd phi_reg(const CorrelationModel& model, const Eigen::ArrayXd& x);

// The extrapolated amplitude phi(x) in factor-approximant form:
// A^{alpha/2} t^{alpha/2} (1 + A t)^{-alpha/2} times exp(e(x)).
FactorApproximant scattering_approximant(const CorrelationModel& model);
double phi_extrapolated(const CorrelationModel& model, double x);

// phi'/phi of the extrapolated amplitude, s frozen in the exponent.
double extrapolated_log_derivative(const CorrelationModel& model, double x);

// Series input and boundary data whose training reproduces the model
// constants: two-term series in t, prefactor t^{alpha/2} with free
// amplitude, |phi| -> 1 at large x.
SeriesInput scattering_series_input(const ShortRangeExpansion& expansion);
BoundaryData scattering_boundary();

struct IntegrabilityOptions {
    int dimension = 3;
    double tol = 1e-6;
    double x_max = 50.0;
    int halvings = 8; // x_min = 2^0 .. 2^-halvings
    QuadratureOptions quadrature{1e-300, 1e-12, 8, 20000};
};

struct IntegralSequence {
    std::vector<double> x_min;
    std::vector<double> value;
    std::vector<double> ratio; // value[j] / value[j-1]
    bool converged = false;
};

struct IntegrabilityReport {
    IntegralSequence regularized;
    IntegralSequence bare;
    double tail = 0.0;             // analytic integral of v x^{d-1} beyond x_max
    double tail_error_bound = 0.0; // bound on |g - 1| * |tail| for the regularized sequence
    double predicted_rate = 0.0;   // 2^{n-d}
    double observed_rate = 0.0;    // last bare ratio
    bool bare_diverges_as_predicted = false;
};

// Integral of f(x) x^{d-1} on [x_min, x_max] plus `tail` for the decreasing
// x_min sequence; converged when the last relative change is below tol.
IntegralSequence integrate_sequence(const std::function<double(double)>& f, double tail,
                                    const IntegrabilityOptions& options);

// Tail integral of the bare potential times x^{d-1} beyond x_max.
double potential_tail(const PotentialSpec& p, int dimension, double x_max);

IntegrabilityReport verify_integrability(const CorrelationModel& model,
                                         const IntegrabilityOptions& options = {});

struct SmallnessReport {
    double max_value = 0.0;
    double argmax = 0.0;
    double min_value = 0.0;
    double argmin = 0.0;
};

// Extremes of g (1 - g) over the grid; g > 1 in the attractive well shows up as min < 0.
SmallnessReport smallness_diagnostic(const std::function<double(double)>& g_of_x,
                                     const Eigen::ArrayXd& grid);
SmallnessReport smallness_diagnostic(const CorrelationModel& model, const Eigen::ArrayXd& grid);

} // namespace singreg
