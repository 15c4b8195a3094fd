#pragma once

// Dimensionless singular pair potentials v(x), x = r / sigma, and the
// decomposition v = s^2 / x^n that separates the fast x^-n core from the
// slowly varying s(x).

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace singreg {

struct PhysicalParams {
    double sigma = 1.0;
    double epsilon = 1.0;
    double mass = 1.0;
};

// Lambda = 1 / (sigma sqrt(m epsilon)) in units with hbar = 1.
double reduce(const PhysicalParams& physical);

enum class PotentialKind { LennardJones, PowerLaw, Tabulated };

// Closed-form kernels, usable with any floating scalar.
// 1 - x^6 factored through (1 - x), which is exact near the zero crossing.
template <typename Scalar>
Scalar one_minus_x6(Scalar x)
{
    return (Scalar(1) - x) * (Scalar(1) + x * (Scalar(1) + x * (Scalar(1) + x * (Scalar(1) + x * (Scalar(1) + x)))));
}

template <typename Scalar>
Scalar lennard_jones(Scalar x)
{
    const Scalar x6 = x * x * x * x * x * x;
    return Scalar(4) * one_minus_x6(x) / (x6 * x6);
}

template <typename Scalar>
Scalar power_law(Scalar x, Scalar n)
{
    using std::pow;
    return pow(x, -n);
}

class PotentialSpec {
public:
    static PotentialSpec lennard_jones();
    static PotentialSpec power_law(double n);
    // Table of v(x) on strictly increasing x > 0. The singularity exponent is
    // not inferred from the data and must be given.
    static PotentialSpec tabulated(std::vector<double> x, std::vector<double> v, double n);

    PotentialKind kind() const { return kind_; }
    double n() const { return n_; }
    std::string name() const;

    double operator()(double x) const { return evaluate(x); }
    double evaluate(double x) const;

    // s(x) = sgn(v) sqrt(x^n |v|); s(0) is the limit.
    double s(double x) const;
    double s0() const { return s0_; }

    // y(x) = x^n v(x) (signed s^2) and its x-derivative.
    double scaled(double x) const;
    double scaled_derivative(double x) const;

    // Non-fatal notes about the parameter range (n <= 3 in three dimensions).
    std::vector<std::string> warnings() const;

    // Range over which evaluate() is defined; [0, inf) except for tables.
    double x_lower() const;
    double x_upper() const;

    const std::vector<double>& table_x() const;
    const std::vector<double>& table_v() const;

private:
    struct Table;

    PotentialSpec(PotentialKind kind, double n);

    PotentialKind kind_;
    double n_;
    double s0_ = 0.0;
    std::shared_ptr<const Table> table_;
};

double evaluate(const PotentialSpec& p, double x);
Eigen::ArrayXd evaluate(const PotentialSpec& p, const Eigen::ArrayXd& x);

double s_of_x(const PotentialSpec& p, double x);

struct SlowVariationReport {
    Eigen::ArrayXd x;
    Eigen::ArrayXd ratio;
    double max_ratio = 0.0;
    double argmax = 0.0;
};

// |d(s^2)/dx| / |d(x^-n)/dx| on the probe grid. Small ratios mean s can be
// frozen while solving near the core.
SlowVariationReport slow_variation_check(const PotentialSpec& p, const Eigen::ArrayXd& x_probe);

// Richardson extrapolation to x = 0 from s(h), s(h/2), s(h/4), quadratic error model.
double richardson_limit(double s_h, double s_h2, double s_h4);

} // namespace singreg
