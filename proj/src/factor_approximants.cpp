#include "singreg/factor_approximants.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/AutoDiff>

#include "singreg/csv.hpp"
#include "singreg/errors.hpp"
#include "singreg/shortrange_series.hpp"

namespace singreg {

FactorApproximant::FactorApproximant(double amplitude, double power, std::vector<Factor> factors)
    : amplitude_(amplitude), power_(power), factors_(std::move(factors))
{
}

double FactorApproximant::evaluate(double t) const
{
    if (!(t >= 0.0))
        throw DomainError("factor approximant evaluated at negative argument");
    double value = amplitude_;
    if (power_ != 0.0)
        value *= std::pow(t, power_);
    for (const Factor& f : factors_) {
        const double base = 1.0 + f.A * t;
        if (!(base > 0.0)) {
            std::ostringstream msg;
            msg << "factor (1 + " << f.A << " t) is not positive at t = " << t;
            throw DomainError(msg.str());
        }
        value *= std::pow(base, f.n);
    }
    return value;
}

Eigen::ArrayXd FactorApproximant::evaluate(const Eigen::ArrayXd& t) const
{
    return t.unaryExpr([this](double ti) { return evaluate(ti); });
}

std::vector<double> taylor_coefficients(const FactorApproximant& fa, std::size_t k)
{
    std::vector<double> A, n;
    for (const Factor& f : fa.factors()) {
        A.push_back(f.A);
        n.push_back(f.n);
    }
    return taylor_coefficients(A, n, k);
}

LargeXBehavior large_x_behavior(const FactorApproximant& fa)
{
    LargeXBehavior out{fa.amplitude(), fa.power()};
    for (const Factor& f : fa.factors()) {
        out.amplitude *= std::pow(f.A, f.n);
        out.exponent += f.n;
    }
    return out;
}

namespace {

using AD = Eigen::AutoDiffScalar<Eigen::VectorXd>;

struct Problem {
    std::vector<double> a; // a_1..a_k at index 1..k
    std::size_t k = 0;
    std::size_t N = 0;
    bool has_boundary = false;
    bool amplitude_equation = false;
    double power = 0.0;
    double log_c0 = 0.0;
    double nu = 0.0;
    double log_C = 0.0;

    std::size_t equations() const
    {
        return k + (has_boundary ? 1 : 0) + (amplitude_equation ? 1 : 0);
    }

    bool admissible(const Eigen::VectorXd& theta) const
    {
        for (std::size_t j = 0; j < N; ++j) {
            if (!std::isfinite(theta[j]) || !std::isfinite(theta[N + j]))
                return false;
            if (theta[j] < 0.0 || (amplitude_equation && theta[j] == 0.0))
                return false;
        }
        return true;
    }

    template <typename Scalar>
    std::vector<Scalar> residual(const std::vector<Scalar>& A, const std::vector<Scalar>& n) const
    {
        std::vector<Scalar> r;
        const std::vector<Scalar> b = taylor_coefficients(A, n, k);
        for (std::size_t m = 1; m <= k; ++m)
            r.push_back(b[m] - a[m]);
        if (has_boundary) {
            Scalar sum = Scalar(power - nu);
            for (const Scalar& nj : n)
                sum = sum + nj;
            r.push_back(sum);
        }
        if (amplitude_equation) {
            using std::log;
            Scalar sum = Scalar(log_c0 - log_C);
            for (std::size_t j = 0; j < A.size(); ++j)
                sum = sum + n[j] * log(A[j]);
            r.push_back(sum);
        }
        return r;
    }

    Eigen::VectorXd residual(const Eigen::VectorXd& theta) const
    {
        std::vector<double> A(theta.data(), theta.data() + N);
        std::vector<double> n(theta.data() + N, theta.data() + 2 * N);
        const std::vector<double> r = residual(A, n);
        return Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
    }

    void jacobian(const Eigen::VectorXd& theta, Eigen::VectorXd& r, Eigen::MatrixXd& J) const
    {
        const auto dim = static_cast<Eigen::Index>(2 * N);
        std::vector<AD> A(N), n(N);
        for (std::size_t j = 0; j < N; ++j) {
            A[j] = AD(theta[j], dim, static_cast<Eigen::Index>(j));
            n[j] = AD(theta[N + j], dim, static_cast<Eigen::Index>(N + j));
        }
        const std::vector<AD> res = residual(A, n);
        r.resize(static_cast<Eigen::Index>(res.size()));
        J.setZero(static_cast<Eigen::Index>(res.size()), dim);
        for (std::size_t i = 0; i < res.size(); ++i) {
            r[static_cast<Eigen::Index>(i)] = res[i].value();
            if (res[i].derivatives().size() == dim)
                J.row(static_cast<Eigen::Index>(i)) = res[i].derivatives().transpose();
        }
    }
};

// c_m = sum_j n_j A_j^m, read off the logarithm of the series.
std::vector<double> power_sums(const std::vector<double>& a, std::size_t k)
{
    std::vector<double> ell(k + 1, 0.0);
    for (std::size_t m = 1; m <= k; ++m) {
        double s = a[m];
        for (std::size_t i = 1; i < m; ++i)
            s -= static_cast<double>(i) * ell[i] * a[m - i] / static_cast<double>(m);
        ell[m] = s;
    }
    std::vector<double> c(k + 1, 0.0);
    for (std::size_t m = 1; m <= k; ++m)
        c[m] = ((m % 2 == 1) ? 1.0 : -1.0) * static_cast<double>(m) * ell[m];
    return c;
}

// Poles of the [N-1/N] Pade approximant of d/dt log f sit at t = -1/A_j;
// equivalently the A_j are the roots of the Prony polynomial of c_1..c_2N.
std::vector<double> pole_guesses(const std::vector<double>& c, std::size_t N)
{
    const auto n = static_cast<Eigen::Index>(N);
    Eigen::MatrixXd H(n, n);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index i = 0; i < n; ++i)
            H(r, i) = c[static_cast<std::size_t>(r + i + 1)];
        rhs[r] = -c[static_cast<std::size_t>(r + n + 1)];
    }
    const Eigen::VectorXd p = H.colPivHouseholderQr().solve(rhs);
    if (!p.allFinite())
        return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i)
        companion(i, i - 1) = 1.0;
    companion.col(n - 1) = -p;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    std::vector<double> roots;
    for (Eigen::Index i = 0; i < n; ++i)
        roots.push_back(solver.eigenvalues()[i].real());
    return roots;
}

// Exponents that best reproduce the power sums for fixed A_j, plus the
// exponent-sum boundary condition when present.
std::vector<double> fit_exponents(const Problem& pb, const std::vector<double>& c,
                                  const std::vector<double>& A)
{
    const auto N = static_cast<Eigen::Index>(pb.N);
    const auto rows = static_cast<Eigen::Index>(pb.k) + (pb.has_boundary ? 1 : 0);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, N);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
    for (std::size_t m = 1; m <= pb.k; ++m) {
        for (Eigen::Index j = 0; j < N; ++j)
            M(static_cast<Eigen::Index>(m - 1), j) = std::pow(A[static_cast<std::size_t>(j)], m);
        rhs[static_cast<Eigen::Index>(m - 1)] = c[m];
    }
    if (pb.has_boundary) {
        M.row(rows - 1).setOnes();
        rhs[rows - 1] = pb.nu - pb.power;
    }
    const Eigen::VectorXd n = M.colPivHouseholderQr().solve(rhs);
    return {n.data(), n.data() + n.size()};
}

struct NewtonResult {
    Eigen::VectorXd theta;
    double residual = std::numeric_limits<double>::infinity();
};

NewtonResult damped_newton(const Problem& pb, Eigen::VectorXd theta, unsigned max_iterations)
{
    NewtonResult out;
    if (!pb.admissible(theta))
        return out;
    Eigen::VectorXd r;
    Eigen::MatrixXd J;
    pb.jacobian(theta, r, J);
    if (!r.allFinite())
        return out;
    for (unsigned it = 0; it < max_iterations; ++it) {
        const double norm = r.norm();
        if (norm == 0.0)
            break;
        const Eigen::VectorXd step = J.colPivHouseholderQr().solve(-r);
        if (!step.allFinite())
            break;
        bool accepted = false;
        for (double damping = 1.0; damping > 1e-10; damping *= 0.5) {
            const Eigen::VectorXd trial = theta + damping * step;
            if (!pb.admissible(trial))
                continue;
            const Eigen::VectorXd rt = pb.residual(trial);
            if (rt.allFinite() && rt.norm() < norm) {
                theta = trial;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            break;
        pb.jacobian(theta, r, J);
    }
    out.theta = theta;
    out.residual = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
    return out;
}

double typical_scale(const Problem& pb, const std::vector<double>& c)
{
    if (pb.k >= 2 && c[1] != 0.0 && std::isfinite(c[2] / c[1]) && c[2] / c[1] != 0.0)
        return std::abs(c[2] / c[1]);
    if (pb.k >= 1 && pb.has_boundary && pb.nu != pb.power && pb.a[1] != 0.0)
        return std::abs(pb.a[1] / (pb.nu - pb.power)) * static_cast<double>(pb.N);
    if (pb.k >= 1 && pb.a[1] != 0.0)
        return std::abs(pb.a[1]);
    return 1.0;
}

std::vector<Eigen::VectorXd> starting_points(const Problem& pb, const std::vector<double>& c,
                                             const TrainOptions& options)
{
    std::vector<Eigen::VectorXd> starts;
    const auto N = static_cast<Eigen::Index>(pb.N);
    auto pack = [&](const std::vector<double>& A) {
        const std::vector<double> n = fit_exponents(pb, c, A);
        Eigen::VectorXd theta(2 * N);
        for (Eigen::Index j = 0; j < N; ++j) {
            theta[j] = A[static_cast<std::size_t>(j)];
            theta[N + j] = n[static_cast<std::size_t>(j)];
        }
        return theta;
    };

    std::vector<double> base;
    if (pb.k >= 2 * pb.N) {
        base = pole_guesses(c, pb.N);
        if (base.size() == pb.N) {
            for (double& A : base)
                A = std::abs(A);
            starts.push_back(pack(base));
        }
    }
    const double scale = typical_scale(pb, c);
    if (base.size() != pb.N) {
        base.clear();
        for (std::size_t j = 0; j < pb.N; ++j)
            base.push_back(scale * std::pow(3.0, static_cast<double>(j)));
        starts.push_back(pack(base));
    }

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> jitter(0.0, 0.7);
    std::uniform_real_distribution<double> decade(-2.0, 2.0);
    while (starts.size() < options.starts) {
        std::vector<double> A(pb.N);
        const bool around_base = starts.size() % 2 == 1;
        for (std::size_t j = 0; j < pb.N; ++j)
            A[j] = around_base ? base[j] * std::exp(jitter(rng)) : scale * std::pow(10.0, decade(rng));
        starts.push_back(pack(A));
    }
    return starts;
}

} // namespace

FactorApproximant train(const SeriesInput& series, const std::optional<BoundaryData>& boundary,
                        std::size_t factor_count, const TrainOptions& options)
{
    if (series.coeffs.empty() || series.coeffs[0] != 1.0)
        throw DomainError("series input must start with a_0 = 1");
    for (double a : series.coeffs)
        if (!std::isfinite(a))
            throw DomainError("series coefficients must be finite");
    const bool amplitude_known = series.prefactor.amplitude.has_value();
    if (!amplitude_known && !boundary)
        throw DomainError("an unknown prefactor amplitude needs boundary data to fix it");
    if (amplitude_known && !(*series.prefactor.amplitude > 0.0))
        throw DomainError("prefactor amplitude must be positive");
    if (boundary && !(boundary->amplitude > 0.0))
        throw DomainError("boundary amplitude C must be positive");

    Problem pb;
    pb.a = series.coeffs;
    pb.k = series.coeffs.size() - 1;
    pb.N = factor_count;
    pb.has_boundary = boundary.has_value();
    pb.amplitude_equation = boundary.has_value() && amplitude_known;
    pb.power = series.prefactor.power;
    if (amplitude_known)
        pb.log_c0 = std::log(*series.prefactor.amplitude);
    if (boundary) {
        pb.nu = boundary->exponent;
        pb.log_C = std::log(boundary->amplitude);
    }

    if (pb.equations() < 2 * pb.N) {
        std::ostringstream msg;
        msg << pb.equations() << " conditions cannot fix " << pb.N << " factors (need "
            << 2 * pb.N << ")";
        throw ConstructionError(msg.str());
    }
    if (pb.N == 1 && boundary && pb.k >= 1 && pb.a[1] == 0.0 && pb.nu != pb.power)
        throw DegeneracyError("a_1 = 0 forces A = 0 in the single-factor boundary construction "
                              "(the n = 4 case); the factor approximant collapses");

    auto finish = [&](std::vector<Factor> factors) {
        std::sort(factors.begin(), factors.end(),
                  [](const Factor& l, const Factor& r) { return l.A < r.A || (l.A == r.A && l.n < r.n); });
        double c0 = amplitude_known ? *series.prefactor.amplitude : 0.0;
        if (!amplitude_known) {
            double log_prod = 0.0;
            for (const Factor& f : factors) {
                if (!(f.A > 0.0) && f.n != 0.0)
                    throw ConstructionError("boundary amplitude undefined: a factor has A <= 0");
                if (f.n != 0.0)
                    log_prod += f.n * std::log(f.A);
            }
            c0 = std::exp(std::log(boundary->amplitude) - log_prod);
        }
        return FactorApproximant(c0, series.prefactor.power, std::move(factors));
    };

    const std::vector<double> c = power_sums(pb.a, pb.k);

    if (pb.N == 0) {
        const Eigen::VectorXd r = pb.residual(Eigen::VectorXd());
        const double res = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
        if (!(res < options.tolerance)) {
            std::ostringstream msg;
            msg << "no factors requested but the conditions are violated (residual " << res << ")";
            throw ConstructionError(msg.str());
        }
        return finish({});
    }

    double best = std::numeric_limits<double>::infinity();
    for (const Eigen::VectorXd& start : starting_points(pb, c, options)) {
        const NewtonResult result = damped_newton(pb, start, options.max_iterations);
        best = std::min(best, result.residual);
        if (result.residual < options.tolerance) {
            std::vector<Factor> factors;
            for (std::size_t j = 0; j < pb.N; ++j)
                factors.push_back({result.theta[static_cast<Eigen::Index>(j)],
                                   result.theta[static_cast<Eigen::Index>(pb.N + j)]});
            return finish(std::move(factors));
        }
    }
    std::ostringstream msg;
    msg << "no real factor approximant with " << pb.N << " factors and A_j >= 0 found after "
        << options.starts << " starts (best residual " << best << ")";
    throw ConstructionError(msg.str());
}

double training_residual(const FactorApproximant& fa, const SeriesInput& series,
                         const std::optional<BoundaryData>& boundary)
{
    const std::size_t k = series.coeffs.empty() ? 0 : series.coeffs.size() - 1;
    const std::vector<double> b = taylor_coefficients(fa, k);
    double worst = 0.0;
    for (std::size_t m = 1; m <= k; ++m)
        worst = std::max(worst, std::abs(b[m] - series.coeffs[m]));
    if (boundary) {
        const LargeXBehavior large = large_x_behavior(fa);
        worst = std::max(worst, std::abs(large.exponent - boundary->exponent));
        worst = std::max(worst, std::abs(large.amplitude - boundary->amplitude));
    }
    return worst;
}

ClosedFormConstants closed_form_constants(double n, double lambda, double s0)
{
    const double mu = mu_of(n);
    if (n == 4.0)
        throw DegeneracyError("n = 4 gives 1/4 - mu^2 = 0, so A = 0 and the approximant collapses");
    if (!(lambda > 0.0) || !(s0 > 0.0))
        throw DomainError("lambda and s(0) must be positive");
    ClosedFormConstants out;
    out.mu = mu;
    out.alpha = n / (n - 2.0);
    out.A = (n - 2.0) * lambda * (0.25 - mu * mu) / (2.0 * s0 * out.alpha);
    return out;
}

double closed_form_A_gamma(double n, double lambda, double s0)
{
    const double mu = mu_of(n);
    const double alpha = n / (n - 2.0);
    return (n - 2.0) * lambda * std::tgamma(mu + 1.5) * (0.5 - mu)
         / (2.0 * s0 * std::tgamma(mu + 0.5) * alpha);
}

std::string to_text(const FactorApproximant& fa)
{
    std::string out = "factor_approximant\n";
    out += "amplitude " + format_double(fa.amplitude()) + "\n";
    out += "power " + format_double(fa.power()) + "\n";
    for (const Factor& f : fa.factors())
        out += "factor " + format_double(f.A) + " " + format_double(f.n) + "\n";
    return out;
}

FactorApproximant from_text(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& why) {
        std::ostringstream msg;
        msg << "factor approximant record, line " << line_no << ": " << why;
        throw ParseError(msg.str());
    };
    auto number = [&](std::istringstream& fields) {
        std::string token;
        if (!(fields >> token))
            fail("missing number");
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size())
            fail("bad number '" + token + "'");
        return value;
    };

    bool header = false;
    std::optional<double> amplitude;
    double power = 0.0;
    std::vector<Factor> factors;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::istringstream fields(line);
        std::string key;
        fields >> key;
        if (!header) {
            if (key != "factor_approximant")
                fail("expected 'factor_approximant' header");
            header = true;
        } else if (key == "amplitude") {
            amplitude = number(fields);
        } else if (key == "power") {
            power = number(fields);
        } else if (key == "factor") {
            const double A = number(fields);
            const double n = number(fields);
            factors.push_back({A, n});
        } else {
            fail("unknown key '" + key + "'");
        }
        std::string extra;
        if (header && key != "factor_approximant" && (fields >> extra))
            fail("trailing field '" + extra + "'");
    }
    if (!header)
        throw ParseError("factor approximant record is empty");
    if (!amplitude)
        throw ParseError("factor approximant record has no amplitude");
    return FactorApproximant(*amplitude, power, std::move(factors));
}

} // namespace singreg
