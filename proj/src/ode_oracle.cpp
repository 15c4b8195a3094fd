#include "singreg/ode_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "singreg/errors.hpp"

namespace singreg {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct State {
    double phi;
    double dphi;
};

State rhs(const Coupling& c, double x, const State& y) { return {y.dphi, c(x) * y.phi}; }

State combine(const State& y, double h, std::initializer_list<std::pair<double, State>> terms)
{
    State out = y;
    for (const auto& [w, k] : terms) {
        out.phi += h * w * k.phi;
        out.dphi += h * w * k.dphi;
    }
    return out;
}

// Scales (phi, dphi) by an exact power of two so |phi| lands in [0.5, 1).
void renormalize(State& y, double& log_scale)
{
    const double ref = y.phi != 0.0 ? y.phi : y.dphi;
    if (ref == 0.0 || !std::isfinite(ref))
        return;
    int e = 0;
    std::frexp(ref, &e);
    y.phi = std::ldexp(y.phi, -e);
    y.dphi = std::ldexp(y.dphi, -e);
    log_scale += e * std::numbers::ln2;
}

struct Local {
    double p;
    double dp;
    double ddp;
    double log_scale;
};

Local interpolate(const OracleSolution& sol, double x)
{
    if (sol.x.empty() || x < sol.x.front() || x > sol.x.back() || std::isnan(x)) {
        std::ostringstream msg;
        msg << "x = " << x << " outside the solved range";
        throw DomainError(msg.str());
    }
    const auto it = std::lower_bound(sol.x.begin(), sol.x.end(), x);
    const auto i = static_cast<std::size_t>(it - sol.x.begin());
    if (i < sol.x.size() && sol.x[i] == x)
        return {sol.phi[i], sol.dphi[i], sol.ddphi[i], sol.log_scale[i]};

    const std::size_t l = i - 1;
    const std::size_t r = i;
    const double h = sol.x[r] - sol.x[l];
    const double tau = (x - sol.x[l]) / h;
    const double rel = std::exp(sol.log_scale[r] - sol.log_scale[l]);
    const double p0 = sol.phi[l], d0 = sol.dphi[l], s0 = sol.ddphi[l];
    const double p1 = sol.phi[r] * rel, d1 = sol.dphi[r] * rel, s1 = sol.ddphi[r] * rel;

    const double t2 = tau * tau, t3 = t2 * tau, t4 = t3 * tau, t5 = t4 * tau;
    const double H0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    const double H1 = tau - 6 * t3 + 8 * t4 - 3 * t5;
    const double H2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    const double H3 = 10 * t3 - 15 * t4 + 6 * t5;
    const double H4 = -4 * t3 + 7 * t4 - 3 * t5;
    const double H5 = 0.5 * (t3 - 2 * t4 + t5);
    const double D0 = -30 * t2 + 60 * t3 - 30 * t4;
    const double D1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
    const double D2 = 0.5 * (2 * tau - 9 * t2 + 12 * t3 - 5 * t4);
    const double D3 = 30 * t2 - 60 * t3 + 30 * t4;
    const double D4 = -12 * t2 + 28 * t3 - 15 * t4;
    const double D5 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
    const double S0 = -60 * tau + 180 * t2 - 120 * t3;
    const double S1 = -36 * tau + 96 * t2 - 60 * t3;
    const double S2 = 0.5 * (2 - 18 * tau + 36 * t2 - 20 * t3);
    const double S4 = -24 * tau + 84 * t2 - 60 * t3;
    const double S5 = 0.5 * (6 * tau - 24 * t2 + 20 * t3);

    const double p = H0 * p0 + h * H1 * d0 + h * h * H2 * s0 + H3 * p1 + h * H4 * d1 + h * h * H5 * s1;
    const double dp = (D0 * p0 + D3 * p1) / h + D1 * d0 + D4 * d1 + h * (D2 * s0 + D5 * s1);
    const double ddp = S0 * (p0 - p1) / (h * h) + (S1 * d0 + S4 * d1) / h + S2 * s0 + S5 * s1;
    return {p, dp, ddp, sol.log_scale[l]};
}

} // namespace

std::size_t OracleSolution::find(double xq) const
{
    const auto it = std::lower_bound(x.begin(), x.end(), xq);
    if (it != x.end() && *it == xq)
        return static_cast<std::size_t>(it - x.begin());
    return npos;
}

Coupling scattering_coupling(const PotentialSpec& p, double lambda)
{
    if (!(lambda > 0.0))
        throw DomainError("lambda must be positive");
    const double inv = 1.0 / (lambda * lambda);
    return [p, inv](double x) { return p.evaluate(x) * inv; };
}

OracleSolution integrate(const Coupling& coupling, const InitialData& init, double x_end,
                         const SolveOptions& options)
{
    if (!std::isfinite(init.x) || !std::isfinite(x_end) || init.x == x_end)
        throw DomainError("integration interval is empty");
    if (!std::isfinite(init.phi) || !std::isfinite(init.dphi))
        throw DomainError("initial data must be finite");

    const double dir = x_end > init.x ? 1.0 : -1.0;
    std::vector<double> targets;
    for (double cp : options.checkpoints)
        if ((cp - init.x) * dir > 0.0 && (x_end - cp) * dir > 0.0)
            targets.push_back(cp);
    targets.push_back(x_end);
    std::sort(targets.begin(), targets.end(), [dir](double l, double r) { return l * dir < r * dir; });
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

    OracleSolution sol;
    sol.direction = dir > 0 ? Direction::Outward : Direction::Inward;
    sol.init = init;

    double x = init.x;
    State y{init.phi, init.dphi};
    double log_scale = init.log_scale;
    renormalize(y, log_scale);
    auto store = [&](double xs, const State& ys, double ls) {
        sol.x.push_back(xs);
        sol.phi.push_back(ys.phi);
        sol.dphi.push_back(ys.dphi);
        sol.ddphi.push_back(coupling(xs) * ys.phi);
        sol.log_scale.push_back(ls);
    };
    store(x, y, log_scale);

    const bool fixed = options.fixed_step > 0.0;
    double h;
    if (fixed) {
        h = options.fixed_step;
    } else {
        const double span = std::abs(x_end - init.x);
        const double rate = std::sqrt(std::abs(coupling(x))) + std::abs(y.phi != 0.0 ? y.dphi / y.phi : 0.0);
        h = std::min(0.01 * span, 0.05 / std::max(rate, 1e-300));
    }

    std::size_t next = 0;
    std::size_t steps = 0;
    State k1 = rhs(coupling, x, y);
    while (next < targets.size()) {
        if (++steps > options.max_steps) {
            std::ostringstream msg;
            msg << "integrator exceeded " << options.max_steps << " steps at x = " << x;
            throw NumericError(msg.str());
        }
        const double target = targets[next];
        const double remaining = std::abs(target - x);
        bool landing = false;
        double step = h;
        if (step >= remaining * (1.0 - 1e-12)) {
            step = remaining;
            landing = true;
        }
        if (!fixed && !landing && step < 1e-14 * std::max(1.0, std::abs(x))) {
            std::ostringstream msg;
            msg << "step size underflow at x = " << x;
            throw NumericError(msg.str());
        }
        const double hs = dir * step;

        const State k2 = rhs(coupling, x + c2 * hs, combine(y, hs, {{a21, k1}}));
        const State k3 = rhs(coupling, x + c3 * hs, combine(y, hs, {{a31, k1}, {a32, k2}}));
        const State k4 = rhs(coupling, x + c4 * hs, combine(y, hs, {{a41, k1}, {a42, k2}, {a43, k3}}));
        const State k5 = rhs(coupling, x + c5 * hs,
                             combine(y, hs, {{a51, k1}, {a52, k2}, {a53, k3}, {a54, k4}}));
        const State k6 = rhs(coupling, x + hs,
                             combine(y, hs, {{a61, k1}, {a62, k2}, {a63, k3}, {a64, k4}, {a65, k5}}));
        const State y5 = combine(y, hs, {{b1, k1}, {b3, k3}, {b4, k4}, {b5, k5}, {b6, k6}});
        const double x_new = landing ? target : x + hs;
        const State k7 = rhs(coupling, x_new, y5);

        double err = 0.0;
        if (!fixed) {
            const State e = combine(State{0.0, 0.0}, hs,
                                    {{e1, k1}, {e3, k3}, {e4, k4}, {e5, k5}, {e6, k6}, {e7, k7}});
            const double sp = options.atol + options.rtol * std::max(std::abs(y.phi), std::abs(y5.phi));
            const double sd = options.atol + options.rtol * std::max(std::abs(y.dphi), std::abs(y5.dphi));
            err = std::max(std::abs(e.phi) / sp, std::abs(e.dphi) / sd);
            if (!std::isfinite(err))
                err = 1e10;
        }

        if (fixed || err <= 1.0) {
            x = x_new;
            y = y5;
            renormalize(y, log_scale);
            k1 = rhs(coupling, x, y);
            store(x, y, log_scale);
            if (landing)
                ++next;
            if (!fixed) {
                const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                // A step shortened to land on a target says little about the next one.
                if (!landing || step == h)
                    h = step * grow;
            }
        } else {
            ++sol.rejected_steps;
            h = step * std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
    }

    if (sol.direction == Direction::Inward) {
        std::reverse(sol.x.begin(), sol.x.end());
        std::reverse(sol.phi.begin(), sol.phi.end());
        std::reverse(sol.dphi.begin(), sol.dphi.end());
        std::reverse(sol.ddphi.begin(), sol.ddphi.end());
        std::reverse(sol.log_scale.begin(), sol.log_scale.end());
    }
    return sol;
}

OracleSolution solve_outward(const PotentialSpec& p, double lambda, double x0, double x1,
                             const ShortRangeExpansion& init_from_series, const SolveOptions& options)
{
    if (!(x0 > 0.0) || !(x1 > x0))
        throw DomainError("outward solve needs 0 < x0 < x1");
    const double poly = init_from_series.polynomial(init_from_series.variable(x0));
    if (!(poly > 0.0)) {
        std::ostringstream msg;
        msg << "truncated series is not positive at x0 = " << x0 << "; start closer to the origin";
        throw DomainError(msg.str());
    }
    InitialData init;
    init.x = x0;
    init.phi = 1.0;
    init.dphi = series_log_derivative(init_from_series, p, x0);
    init.log_scale = series_log_value(init_from_series, p, x0);
    return integrate(scattering_coupling(p, lambda), init, x1, options);
}

OracleSolution solve_inward(const PotentialSpec& p, double lambda, double x_max, double x_end,
                            const SolveOptions& options)
{
    if (!(x_end > 0.0) || !(x_max > x_end))
        throw DomainError("inward solve needs 0 < x_end < x_max");
    OracleSolution sol = integrate(scattering_coupling(p, lambda), InitialData{x_max, 1.0, 0.0, 0.0},
                                   x_end, options);
    sol.proxy = true;
    return sol;
}

double log_derivative(const OracleSolution& sol, double x)
{
    const Local l = interpolate(sol, x);
    if (l.p == 0.0) {
        std::ostringstream msg;
        msg << "phi vanishes at x = " << x << "; log-derivative has a pole";
        throw NumericError(msg.str());
    }
    return l.dp / l.p;
}

double value(const OracleSolution& sol, double x)
{
    const Local l = interpolate(sol, x);
    return l.p * std::exp(l.log_scale);
}

double ode_residual(const OracleSolution& sol, const Coupling& coupling, double x)
{
    const Local l = interpolate(sol, x);
    return std::abs(l.ddp - coupling(x) * l.p) / std::max(std::abs(l.ddp), std::abs(l.p));
}

std::pair<double, double> wronskian(const OracleSolution& a, const OracleSolution& b, double x)
{
    const Local la = interpolate(a, x);
    const Local lb = interpolate(b, x);
    return {la.p * lb.dp - lb.p * la.dp, la.log_scale + lb.log_scale};
}

std::pair<double, double> exact_power_law_reference(double n, double lambda, double x)
{
    if (n != 4.0)
        throw DomainError("closed-form reference exists only for n = 4");
    if (!(lambda > 0.0) || !(x > 0.0))
        throw DomainError("closed-form reference needs lambda > 0 and x > 0");
    const double e = std::exp(-1.0 / (lambda * x));
    return {x * e, e * (1.0 + 1.0 / (lambda * x))};
}

NormalizationFit asymptotic_normalization_probe(const OracleSolution& sol, double lo, double hi)
{
    if (!(hi > lo))
        throw NumericError("normalization probe window is empty; the linear fit is ill-conditioned");
    constexpr int points = 101;
    Eigen::MatrixXd M(points, 2);
    Eigen::VectorXd y(points);
    for (int i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * i / (points - 1);
        M(i, 0) = x;
        M(i, 1) = 1.0;
        y[i] = value(sol, x);
    }
    if (!y.allFinite())
        throw NumericError("solution overflows in the probe window; normalization fit undefined");
    const auto qr = M.colPivHouseholderQr();
    if (qr.rank() < 2)
        throw NumericError("normalization fit is rank deficient");
    const Eigen::Vector2d c = qr.solve(y);
    return {c[0], c[1]};
}

} // namespace singreg
