#pragma once

// Numerical reference for the dimensionless zero-energy scattering equation
//
//   phi'' = c(x) phi,   c(x) = v(x) / Lambda^2.
//
// The equation is linear, so samples are stored renormalized: the true
// solution is phi[i] * exp(log_scale[i]). Only normalization-free quantities
// (log-derivatives, Wronskian ratios) are meaningful across solvers.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "singreg/potentials.hpp"
#include "singreg/shortrange_series.hpp"

namespace singreg {

using Coupling = std::function<double(double)>;

Coupling scattering_coupling(const PotentialSpec& p, double lambda);

struct InitialData {
    double x = 0.0;
    double phi = 1.0;
    double dphi = 0.0;
    double log_scale = 0.0;
};

enum class Direction { Outward, Inward };

struct SolveOptions {
    double rtol = 1e-10;
    double atol = 1e-10;
    // > 0 switches off error control and takes steps of exactly this size.
    double fixed_step = 0.0;
    // Points the integrator must land on (in addition to the end point).
    std::vector<double> checkpoints;
    std::size_t max_steps = 20'000'000;
};

struct OracleSolution {
    std::vector<double> x;
    std::vector<double> phi;
    std::vector<double> dphi;
    std::vector<double> ddphi;
    std::vector<double> log_scale;
    Direction direction = Direction::Outward;
    InitialData init;
    // Inward solutions started from phi = 1, phi' = 0 at large x are a
    // qualitative proxy only.
    bool proxy = false;
    std::size_t rejected_steps = 0;

    std::size_t size() const { return x.size(); }
    // Index of a stored sample equal to xq, or npos.
    std::size_t find(double xq) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// Dormand-Prince 5(4) from init.x to x_end (either direction).
OracleSolution integrate(const Coupling& coupling, const InitialData& init, double x_end,
                         const SolveOptions& options = {});

// Outward solve with (phi, phi') at x0 taken from the truncated short-range series.
OracleSolution solve_outward(const PotentialSpec& p, double lambda, double x0, double x1,
                             const ShortRangeExpansion& init_from_series,
                             const SolveOptions& options = {});

// Inward proxy: phi(x_max) = 1, phi'(x_max) = 0, integrated down to x_end.
OracleSolution solve_inward(const PotentialSpec& p, double lambda, double x_max, double x_end,
                            const SolveOptions& options = {});

// phi'/phi at x by quintic Hermite interpolation of (phi, phi', phi'').
double log_derivative(const OracleSolution& sol, double x);

// phi(x) in true normalization (may overflow for strongly growing branches).
double value(const OracleSolution& sol, double x);

// |phi'' - c phi| / max(|phi''|, |phi|) of the dense output at x.
double ode_residual(const OracleSolution& sol, const Coupling& coupling, double x);

// phi1 phi2' - phi2 phi1' at a sample point shared by both solutions,
// returned as (mantissa, log scale).
std::pair<double, double> wronskian(const OracleSolution& a, const OracleSolution& b, double x);

// Closed-form n = 4 solution x exp(-1/(Lambda x)) and its derivative.
std::pair<double, double> exact_power_law_reference(double n, double lambda, double x);

struct NormalizationFit {
    double c_lin = 0.0;
    double c_const = 0.0;
};

// Least-squares fit phi ~ c_lin x + c_const over the stored samples in [lo, hi].
NormalizationFit asymptotic_normalization_probe(const OracleSolution& sol, double lo, double hi);

} // namespace singreg
