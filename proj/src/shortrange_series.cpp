#include "singreg/shortrange_series.hpp"

#include <cmath>
#include <sstream>

#include "singreg/errors.hpp"

namespace singreg {

namespace {

void require_positive(double x, const char* what)
{
    if (!(x > 0.0)) {
        std::ostringstream msg;
        msg << what << " must be positive (got " << x << ")";
        throw DomainError(msg.str());
    }
}

} // namespace

double mu_of(double n)
{
    if (!(n > 2.0) || !std::isfinite(n))
        throw DomainError("mu = -1/(n-2) requires n > 2");
    return -1.0 / (n - 2.0);
}

std::vector<double> series_coefficients(double n, double lambda, double s0, std::size_t k)
{
    const double mu = mu_of(n);
    require_positive(lambda, "lambda");
    require_positive(s0, "s(0)");

    const double q = (n - 2.0) * lambda / (4.0 * s0);
    std::vector<double> a(k + 1);
    a[0] = 1.0;
    for (std::size_t p = 0; p < k; ++p) {
        const double j = static_cast<double>(p);
        a[p + 1] = a[p] * (mu + 0.5 + j) * (mu - 0.5 - j) / (j + 1.0) * q;
        if (!std::isfinite(a[p + 1])) {
            std::ostringstream msg;
            msg << "series coefficient a_" << p + 1 << " overflows";
            throw std::range_error(msg.str());
        }
    }
    return a;
}

double ShortRangeExpansion::variable(double x) const { return std::pow(x, n / 2.0 - 1.0); }

double ShortRangeExpansion::polynomial(double t) const
{
    double sum = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        sum = sum * t + *it;
    return sum;
}

double ShortRangeExpansion::polynomial_derivative(double t) const
{
    double sum = 0.0;
    for (std::size_t p = coeffs.size(); p-- > 1;)
        sum = sum * t + static_cast<double>(p) * coeffs[p];
    return sum;
}

ShortRangeExpansion make_expansion(const PotentialSpec& p, double lambda, std::size_t order)
{
    ShortRangeExpansion e;
    e.n = p.n();
    e.lambda = lambda;
    e.mu = mu_of(p.n());
    e.s0 = p.s0();
    e.order = order;
    e.coeffs = series_coefficients(e.n, lambda, e.s0, order);
    return e;
}

double exponent_term(const PotentialSpec& p, double lambda, double x)
{
    require_positive(x, "x");
    require_positive(lambda, "lambda");
    const double v = p.evaluate(x);
    return -2.0 * x * std::copysign(std::sqrt(std::abs(v)), v) / ((p.n() - 2.0) * lambda);
}

double exponent_term_via_s(const PotentialSpec& p, double lambda, double x)
{
    require_positive(x, "x");
    require_positive(lambda, "lambda");
    const double n = p.n();
    return -2.0 * p.s(x) * x / ((n - 2.0) * lambda * std::pow(x, n / 2.0));
}

double exponent_slope(const PotentialSpec& p, double lambda, double x)
{
    const double v = p.evaluate(x);
    return std::copysign(std::sqrt(std::abs(v)), v) / lambda;
}

double eval_series_solution(const ShortRangeExpansion& expansion, const PotentialSpec& p,
                            double amplitude, double x)
{
    require_positive(x, "x");
    const double e = exponent_term(p, expansion.lambda, x);
    const double poly = expansion.polynomial(expansion.variable(x));
    return amplitude * std::pow(x, expansion.n / 4.0) * poly * std::exp(e);
}

double series_log_value(const ShortRangeExpansion& expansion, const PotentialSpec& p, double x)
{
    require_positive(x, "x");
    const double poly = expansion.polynomial(expansion.variable(x));
    return expansion.n / 4.0 * std::log(x) + std::log(std::abs(poly))
         + exponent_term(p, expansion.lambda, x);
}

double series_log_derivative(const ShortRangeExpansion& expansion, const PotentialSpec& p,
                             double x)
{
    require_positive(x, "x");
    const double n = expansion.n;
    const double t = expansion.variable(x);
    const double dt_dx = (n / 2.0 - 1.0) * t / x;
    return n / (4.0 * x) + expansion.polynomial_derivative(t) * dt_dx / expansion.polynomial(t)
         + exponent_slope(p, expansion.lambda, x);
}

} // namespace singreg
