#include "singreg/potentials.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "singreg/errors.hpp"

namespace singreg {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void require_positive_x(double x)
{
    if (!(x > 0.0) || std::isnan(x)) {
        std::ostringstream msg;
        msg << "potential evaluated at x = " << x << "; x must be positive";
        throw DomainError(msg.str());
    }
}

double signed_sqrt(double y) { return std::copysign(std::sqrt(std::abs(y)), y); }

// Nodes used for the s(0) extrapolation of tabulated potentials.
constexpr double kRichardsonStep = 1e-2;

} // namespace

// Monotone piecewise-cubic Hermite interpolant of y over u = log x.
struct PotentialSpec::Table {
    std::vector<double> x;
    std::vector<double> v;
    std::vector<double> u;
    std::vector<double> y;
    std::vector<double> slope;

    std::size_t interval(double uq) const
    {
        const auto it = std::upper_bound(u.begin(), u.end(), uq);
        std::size_t k = static_cast<std::size_t>(it - u.begin());
        k = k == 0 ? 0 : k - 1;
        return std::min(k, u.size() - 2);
    }

    double value(double uq) const
    {
        const std::size_t k = interval(uq);
        const double h = u[k + 1] - u[k];
        const double t = (uq - u[k]) / h;
        const double t2 = t * t;
        const double t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y[k] + (t3 - 2 * t2 + t) * h * slope[k]
             + (-2 * t3 + 3 * t2) * y[k + 1] + (t3 - t2) * h * slope[k + 1];
    }

    double derivative(double uq) const
    {
        const std::size_t k = interval(uq);
        const double h = u[k + 1] - u[k];
        const double t = (uq - u[k]) / h;
        const double t2 = t * t;
        return ((6 * t2 - 6 * t) * y[k] + (6 * t - 6 * t2) * y[k + 1]) / h
             + (3 * t2 - 4 * t + 1) * slope[k] + (3 * t2 - 2 * t) * slope[k + 1];
    }

    void build_slopes()
    {
        const std::size_t m = u.size();
        slope.assign(m, 0.0);
        std::vector<double> h(m - 1), delta(m - 1);
        for (std::size_t k = 0; k + 1 < m; ++k) {
            h[k] = u[k + 1] - u[k];
            delta[k] = (y[k + 1] - y[k]) / h[k];
        }
        if (m == 2) {
            slope[0] = slope[1] = delta[0];
            return;
        }
        for (std::size_t k = 1; k + 1 < m; ++k) {
            if (delta[k - 1] * delta[k] <= 0.0)
                continue;
            const double w1 = 2 * h[k] + h[k - 1];
            const double w2 = h[k] + 2 * h[k - 1];
            slope[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
        auto end_slope = [](double h0, double h1, double d0, double d1) {
            double d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if (d * d0 <= 0.0)
                d = 0.0;
            else if (d0 * d1 <= 0.0 && std::abs(d) > std::abs(3 * d0))
                d = 3 * d0;
            return d;
        };
        slope[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        slope[m - 1] = end_slope(h[m - 2], h[m - 3], delta[m - 2], delta[m - 3]);
    }
};

double reduce(const PhysicalParams& physical)
{
    if (!positive_finite(physical.sigma) || !positive_finite(physical.epsilon)
        || !positive_finite(physical.mass))
        throw DomainError("sigma, epsilon and mass must all be positive");
    return 1.0 / (physical.sigma * std::sqrt(physical.mass * physical.epsilon));
}

PotentialSpec::PotentialSpec(PotentialKind kind, double n) : kind_(kind), n_(n) {}

PotentialSpec PotentialSpec::lennard_jones()
{
    PotentialSpec p(PotentialKind::LennardJones, 12.0);
    p.s0_ = 2.0;
    return p;
}

PotentialSpec PotentialSpec::power_law(double n)
{
    if (!(n > 2.0) || !std::isfinite(n))
        throw DomainError("singularity exponent n must exceed 2");
    PotentialSpec p(PotentialKind::PowerLaw, n);
    p.s0_ = 1.0;
    return p;
}

PotentialSpec PotentialSpec::tabulated(std::vector<double> x, std::vector<double> v, double n)
{
    if (!(n > 2.0) || !std::isfinite(n))
        throw DomainError("singularity exponent n must exceed 2");
    if (x.size() != v.size() || x.size() < 2)
        throw DomainError("potential table needs at least two (x, v) pairs of equal length");
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!positive_finite(x[k]) || !std::isfinite(v[k]))
            throw DomainError("potential table entries must be finite with x > 0");
        if (k > 0 && !(x[k] > x[k - 1]))
            throw DomainError("potential table x values must be strictly increasing");
    }

    auto table = std::make_shared<Table>();
    table->u.resize(x.size());
    table->y.resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        table->u[k] = std::log(x[k]);
        table->y[k] = std::pow(x[k], n) * v[k];
    }
    table->x = std::move(x);
    table->v = std::move(v);
    table->build_slopes();

    PotentialSpec p(PotentialKind::Tabulated, n);
    p.table_ = std::move(table);

    const double h = kRichardsonStep;
    if (p.table_->x.front() > h / 4)
        throw DomainError("potential table must extend down to x <= 2.5e-3 to fix s(0)");
    p.s0_ = richardson_limit(p.s(h), p.s(h / 2), p.s(h / 4));
    if (!(p.s0_ > 0.0))
        throw DomainError("tabulated potential must be repulsive at the origin (x^n v -> positive limit)");
    return p;
}

std::string PotentialSpec::name() const
{
    switch (kind_) {
    case PotentialKind::LennardJones: return "lj";
    case PotentialKind::PowerLaw: return "power";
    case PotentialKind::Tabulated: return "table";
    }
    return "unknown";
}

double PotentialSpec::x_lower() const { return table_ ? table_->x.front() : 0.0; }

double PotentialSpec::x_upper() const
{
    return table_ ? table_->x.back() : std::numeric_limits<double>::infinity();
}

const std::vector<double>& PotentialSpec::table_x() const
{
    static const std::vector<double> empty;
    return table_ ? table_->x : empty;
}

const std::vector<double>& PotentialSpec::table_v() const
{
    static const std::vector<double> empty;
    return table_ ? table_->v : empty;
}

double PotentialSpec::scaled(double x) const
{
    require_positive_x(x);
    switch (kind_) {
    case PotentialKind::LennardJones: return 4.0 * one_minus_x6(x);
    case PotentialKind::PowerLaw: return 1.0;
    case PotentialKind::Tabulated:
        if (x < table_->x.front() || x > table_->x.back()) {
            std::ostringstream msg;
            msg << "x = " << x << " outside tabulated range [" << table_->x.front() << ", "
                << table_->x.back() << "]";
            throw DomainError(msg.str());
        }
        return table_->value(std::log(x));
    }
    return 0.0;
}

double PotentialSpec::scaled_derivative(double x) const
{
    require_positive_x(x);
    switch (kind_) {
    case PotentialKind::LennardJones: return -24.0 * std::pow(x, 5);
    case PotentialKind::PowerLaw: return 0.0;
    case PotentialKind::Tabulated: scaled(x); return table_->derivative(std::log(x)) / x;
    }
    return 0.0;
}

double PotentialSpec::evaluate(double x) const
{
    require_positive_x(x);
    switch (kind_) {
    case PotentialKind::LennardJones: return singreg::lennard_jones(x);
    case PotentialKind::PowerLaw: return singreg::power_law(x, n_);
    case PotentialKind::Tabulated: return scaled(x) * std::pow(x, -n_);
    }
    return 0.0;
}

double PotentialSpec::s(double x) const
{
    if (x == 0.0)
        return s0_;
    switch (kind_) {
    case PotentialKind::LennardJones: return signed_sqrt(scaled(x));
    case PotentialKind::PowerLaw: require_positive_x(x); return 1.0;
    case PotentialKind::Tabulated: return signed_sqrt(scaled(x));
    }
    return 0.0;
}

std::vector<std::string> PotentialSpec::warnings() const
{
    std::vector<std::string> out;
    if (n_ <= 3.0) {
        std::ostringstream msg;
        msg << "n = " << n_ << " <= 3: the potential is integrable in three dimensions; "
            << "the regularization is still defined for n > 2";
        out.push_back(msg.str());
    }
    return out;
}

double evaluate(const PotentialSpec& p, double x) { return p.evaluate(x); }

Eigen::ArrayXd evaluate(const PotentialSpec& p, const Eigen::ArrayXd& x)
{
    return x.unaryExpr([&p](double xi) { return p.evaluate(xi); });
}

double s_of_x(const PotentialSpec& p, double x)
{
    if (x < 0.0 || std::isnan(x))
        throw DomainError("s(x) requires x >= 0");
    return p.s(x);
}

double richardson_limit(double s_h, double s_h2, double s_h4)
{
    return s_h / 3.0 - 2.0 * s_h2 + 8.0 * s_h4 / 3.0;
}

SlowVariationReport slow_variation_check(const PotentialSpec& p, const Eigen::ArrayXd& x_probe)
{
    SlowVariationReport report;
    report.x = x_probe;
    report.ratio.resize(x_probe.size());
    const double n = p.n();
    for (Eigen::Index i = 0; i < x_probe.size(); ++i) {
        const double x = x_probe[i];
        // |y'| / (n x^{-n-1}) written without forming x^{-n-1}.
        report.ratio[i] = std::abs(p.scaled_derivative(x)) * std::pow(x, n + 1.0) / n;
        if (i == 0 || report.ratio[i] > report.max_ratio) {
            report.max_ratio = report.ratio[i];
            report.argmax = x;
        }
    }
    return report;
}

} // namespace singreg
