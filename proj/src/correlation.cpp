#include "singreg/correlation.hpp"

#include <cmath>
#include <sstream>

#include "singreg/errors.hpp"

namespace singreg {

CorrelationModel build_model(const PotentialSpec& potential, double lambda)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw DomainError("lambda must be positive");
    const ClosedFormConstants c = closed_form_constants(potential.n(), lambda, potential.s0());
    if (!(c.A > 0.0)) {
        std::ostringstream msg;
        msg << "n = " << potential.n() << " gives A = " << c.A
            << " <= 0; the extrapolated correlation function needs n > 4";
        throw DomainError(msg.str());
    }
    return CorrelationModel{potential, lambda, c.A, c.alpha, c.mu, potential.s0()};
}

namespace {

// Returns false when the exponential has underflowed; g is then exactly 0.
bool doubled_exponent(const CorrelationModel& m, double x, double& exponent)
{
    if (!(x > 0.0))
        throw DomainError("correlation function needs x > 0");
    if (m.potential.kind() == PotentialKind::LennardJones && x < kCoreFloor)
        return false;
    exponent = 2.0 * exponent_term(m.potential, m.lambda, x);
    return !(exponent < kExpUnderflow) && !std::isnan(exponent);
}

double rise(const CorrelationModel& m, double x)
{
    const double At = m.A * std::pow(x, m.potential.n() / 2.0 - 1.0);
    return At / (1.0 + At);
}

} // namespace

double g(const CorrelationModel& model, double x)
{
    double exponent = 0.0;
    if (!doubled_exponent(model, x, exponent))
        return 0.0;
    return std::pow(rise(model, x), model.alpha) * std::exp(exponent);
}

Eigen::ArrayXd g(const CorrelationModel& model, const Eigen::ArrayXd& x)
{
    return x.unaryExpr([&model](double xi) { return g(model, xi); });
}

double phi_reg(const CorrelationModel& model, double x)
{
    const double gx = g(model, x);
    if (gx == 0.0)
        return 0.0;
    return gx * model.potential.evaluate(x);
}

Eigen::ArrayXd phi_reg(const CorrelationModel& model, const Eigen::ArrayXd& x)
{
    return x.unaryExpr([&model](double xi) { return phi_reg(model, xi); });
}

FactorApproximant scattering_approximant(const CorrelationModel& model)
{
    const double half = model.alpha / 2.0;
    return FactorApproximant(std::pow(model.A, half), half, {Factor{model.A, -half}});
}

double phi_extrapolated(const CorrelationModel& model, double x)
{
    double exponent = 0.0;
    if (!doubled_exponent(model, x, exponent))
        return 0.0;
    const double t = std::pow(x, model.potential.n() / 2.0 - 1.0);
    return scattering_approximant(model).evaluate(t) * std::exp(exponent / 2.0);
}

double extrapolated_log_derivative(const CorrelationModel& model, double x)
{
    if (!(x > 0.0))
        throw DomainError("log-derivative needs x > 0");
    const double n = model.potential.n();
    const double t = std::pow(x, n / 2.0 - 1.0);
    const double dt_dx = (n / 2.0 - 1.0) * t / x;
    return n / (4.0 * x) - model.alpha / 2.0 * model.A / (1.0 + model.A * t) * dt_dx
         + exponent_slope(model.potential, model.lambda, x);
}

SeriesInput scattering_series_input(const ShortRangeExpansion& expansion)
{
    if (expansion.coeffs.size() < 2)
        throw DomainError("scattering series needs at least two terms");
    SeriesInput input;
    input.coeffs = {expansion.coeffs[0], expansion.coeffs[1]};
    input.prefactor.amplitude = std::nullopt;
    input.prefactor.power = expansion.n / (2.0 * (expansion.n - 2.0));
    return input;
}

BoundaryData scattering_boundary() { return BoundaryData{1.0, 0.0}; }

double potential_tail(const PotentialSpec& p, int dimension, double x_max)
{
    const double d = dimension;
    switch (p.kind()) {
    case PotentialKind::LennardJones:
        if (d >= 6.0)
            throw DomainError("Lennard-Jones tail integral diverges for d >= 6");
        return 4.0 * (std::pow(x_max, d - 12.0) / (12.0 - d) - std::pow(x_max, d - 6.0) / (6.0 - d));
    case PotentialKind::PowerLaw:
        if (d >= p.n())
            throw DomainError("power-law tail integral diverges for d >= n");
        return std::pow(x_max, d - p.n()) / (p.n() - d);
    case PotentialKind::Tabulated:
        // No tail model beyond the table.
        return 0.0;
    }
    return 0.0;
}

IntegralSequence integrate_sequence(const std::function<double(double)>& f, double tail,
                                    const IntegrabilityOptions& options)
{
    if (!(options.tol > 0.0))
        throw DomainError("integrability tolerance must be positive");
    if (options.dimension < 1)
        throw DomainError("dimension must be at least 1");
    const int power = options.dimension - 1;
    auto integrand = [&](double x) {
        const double fx = f(x);
        return fx == 0.0 ? 0.0 : fx * std::pow(x, power);
    };

    IntegralSequence seq;
    for (int j = 0; j <= options.halvings; ++j) {
        const double x_min = std::ldexp(1.0, -j);
        if (!(x_min < options.x_max))
            continue;
        const QuadratureResult q = integrate_adaptive(integrand, x_min, options.x_max, options.quadrature);
        seq.x_min.push_back(x_min);
        seq.value.push_back(q.value + tail);
        if (seq.value.size() > 1) {
            const double prev = seq.value[seq.value.size() - 2];
            seq.ratio.push_back(seq.value.back() / prev);
        }
    }
    if (seq.value.size() >= 2) {
        const double last = seq.value.back();
        const double prev = seq.value[seq.value.size() - 2];
        const double scale = std::max(std::abs(last), std::abs(prev));
        seq.converged = scale == 0.0 || std::abs(last - prev) < options.tol * scale;
    }
    return seq;
}

IntegrabilityReport verify_integrability(const CorrelationModel& model,
                                         const IntegrabilityOptions& options)
{
    IntegrabilityReport report;
    report.tail = potential_tail(model.potential, options.dimension, options.x_max);
    report.tail_error_bound = std::abs(1.0 - g(model, options.x_max)) * std::abs(report.tail);
    report.regularized = integrate_sequence([&model](double x) { return phi_reg(model, x); },
                                            report.tail, options);
    report.bare = integrate_sequence([&model](double x) { return model.potential.evaluate(x); },
                                     report.tail, options);
    report.predicted_rate = std::pow(2.0, model.potential.n() - options.dimension);
    if (!report.bare.ratio.empty()) {
        report.observed_rate = report.bare.ratio.back();
        report.bare_diverges_as_predicted =
            !report.bare.converged && std::abs(report.observed_rate / report.predicted_rate - 1.0) < 0.05;
    }
    return report;
}

SmallnessReport smallness_diagnostic(const std::function<double(double)>& g_of_x,
                                     const Eigen::ArrayXd& grid)
{
    SmallnessReport out;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double gx = g_of_x(grid[i]);
        const double value = gx * (1.0 - gx);
        if (i == 0 || value > out.max_value) {
            out.max_value = value;
            out.argmax = grid[i];
        }
        if (i == 0 || value < out.min_value) {
            out.min_value = value;
            out.argmin = grid[i];
        }
    }
    return out;
}

SmallnessReport smallness_diagnostic(const CorrelationModel& model, const Eigen::ArrayXd& grid)
{
    return smallness_diagnostic([&model](double x) { return g(model, x); }, grid);
}

} // namespace singreg
