#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "singreg/errors.hpp"
#include "singreg/factor_approximants.hpp"
#include "singreg/shortrange_series.hpp"

using namespace singreg;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Cauchy product of generalized binomial series, written independently of
// the log/exp recurrence used by the library.
std::vector<double> binomial_product(const std::vector<Factor>& factors, std::size_t k)
{
    std::vector<double> out(k + 1, 0.0);
    out[0] = 1.0;
    for (const Factor& f : factors) {
        std::vector<double> b(k + 1, 0.0);
        double c = 1.0;
        for (std::size_t m = 0; m <= k; ++m) {
            b[m] = c * std::pow(f.A, static_cast<double>(m));
            c *= (f.n - static_cast<double>(m)) / static_cast<double>(m + 1);
        }
        std::vector<double> next(k + 1, 0.0);
        for (std::size_t i = 0; i <= k; ++i)
            for (std::size_t j = 0; i + j <= k; ++j)
                next[i + j] += out[i] * b[j];
        out = next;
    }
    return out;
}

std::vector<Factor> sorted(std::vector<Factor> f)
{
    std::sort(f.begin(), f.end(), [](const Factor& a, const Factor& b) { return a.A < b.A; });
    return f;
}

} // namespace

TEST_CASE("Taylor coefficients match the binomial oracle", "[approximant][oracle]")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> uA(0.0, 3.0), un(-2.5, 2.5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Factor> f(1 + trial % 3);
        for (Factor& x : f)
            x = {uA(rng), un(rng)};
        const auto expected = binomial_product(f, 8);
        const auto got = taylor_coefficients(FactorApproximant(1.0, 0.0, f), 8);
        for (std::size_t m = 0; m <= 8; ++m)
            CHECK_THAT(got[m], WithinAbs(expected[m], 1e-11 * std::max(1.0, std::abs(expected[m]))));
    }
}

TEST_CASE("empty series trains to no factors", "[approximant]")
{
    SeriesInput s{{1.0, 0.0, 0.0}, Prefactor{2.0, 0.0}};
    const FactorApproximant fa = train(s, BoundaryData{2.0, 0.0}, 0);
    CHECK(fa.factors().empty());
    CHECK(fa.amplitude() == 2.0);
    CHECK(fa.evaluate(3.7) == 2.0);
}

TEST_CASE("binomial (1+2t)^3", "[approximant]")
{
    SeriesInput s{{1.0, 6.0, 12.0}, {}};
    const FactorApproximant fa = train(s, std::nullopt, 1);
    REQUIRE(fa.factors().size() == 1);
    CHECK_THAT(fa.factors()[0].A, WithinRel(2.0, 1e-12));
    CHECK_THAT(fa.factors()[0].n, WithinRel(3.0, 1e-12));
    const LargeXBehavior b = large_x_behavior(fa);
    CHECK_THAT(b.amplitude, WithinRel(8.0, 1e-11));
    CHECK_THAT(b.exponent, WithinRel(3.0, 1e-12));
}

TEST_CASE("scattering instance for n = 12", "[approximant]")
{
    for (double lambda : {0.347, 0.43, 0.74, 1.0}) {
        SeriesInput s;
        s.coeffs = {1.0, -0.3 * lambda};
        s.prefactor.amplitude = std::nullopt;
        s.prefactor.power = 0.6;
        const FactorApproximant fa = train(s, BoundaryData{1.0, 0.0}, 1);
        REQUIRE(fa.factors().size() == 1);
        CHECK_THAT(fa.factors()[0].n, WithinRel(-0.6, 1e-10));
        CHECK_THAT(fa.factors()[0].A, WithinRel(lambda / 2.0, 1e-10));
        CHECK_THAT(fa.amplitude(), WithinRel(std::pow(lambda / 2.0, 0.6), 1e-10));
        const LargeXBehavior b = large_x_behavior(fa);
        CHECK_THAT(b.amplitude, WithinRel(1.0, 1e-10));
        CHECK_THAT(b.exponent, WithinAbs(0.0, 1e-10));
    }
}

TEST_CASE("closed-form constants", "[approximant]")
{
    const ClosedFormConstants c12 = closed_form_constants(12.0, 0.430, 2.0);
    CHECK_THAT(c12.alpha, WithinRel(1.2, 1e-15));
    CHECK_THAT(c12.mu, WithinAbs(-0.1, 1e-16));
    CHECK_THAT(c12.A, WithinRel(0.215, 1e-14));

    const ClosedFormConstants c6 = closed_form_constants(6.0, 1.0, 1.0);
    CHECK(c6.mu == -0.25);
    CHECK(c6.alpha == 1.5);
    CHECK_THAT(c6.A, WithinRel(0.25, 1e-15));

    CHECK_THROWS_AS(closed_form_constants(4.0, 1.0, 1.0), DegeneracyError);
    CHECK_THROWS_AS(closed_form_constants(2.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(closed_form_constants(12.0, 0.0, 2.0), DomainError);
    CHECK_THROWS_AS(closed_form_constants(12.0, 1.0, -2.0), DomainError);
}

TEST_CASE("closed-form A: Gamma form, linearity", "[approximant][property]")
{
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> ul(0.1, 1.0), us(0.5, 3.0);
    for (double n : {5.0, 6.0, 8.0, 12.0, 20.0}) {
        for (int i = 0; i < 20; ++i) {
            const double lambda = ul(rng), s0 = us(rng);
            const double A = closed_form_constants(n, lambda, s0).A;
            CHECK_THAT(closed_form_A_gamma(n, lambda, s0), WithinRel(A, 1e-12));
            CHECK_THAT(closed_form_constants(n, 2.0 * lambda, s0).A, WithinRel(2.0 * A, 1e-14));
            CHECK_THAT(closed_form_constants(n, lambda, 2.0 * s0).A, WithinRel(A / 2.0, 1e-14));
        }
    }
}

TEST_CASE("closed form equals training", "[approximant][property]")
{
    for (double n : {5.0, 6.0, 8.0, 12.0, 20.0}) {
        const double lambda = 0.6, s0 = 1.3;
        const ClosedFormConstants c = closed_form_constants(n, lambda, s0);
        SeriesInput s;
        s.coeffs = series_coefficients(n, lambda, s0, 1);
        s.prefactor.amplitude = std::nullopt;
        s.prefactor.power = c.alpha / 2.0;
        const FactorApproximant fa = train(s, BoundaryData{1.0, 0.0}, 1);
        CHECK_THAT(fa.factors()[0].A, WithinRel(c.A, 1e-10));
        CHECK_THAT(fa.factors()[0].n, WithinRel(-c.alpha / 2.0, 1e-10));
    }
}

TEST_CASE("evaluate", "[approximant]")
{
    CHECK(FactorApproximant(3.0, 0.0, {}).evaluate(5.0) == 3.0);
    CHECK_THAT(FactorApproximant(2.0, 1.5, {}).evaluate(4.0), WithinRel(16.0, 1e-15));
    CHECK_THAT(FactorApproximant(1.0, 0.0, {{1.0, 2.0}}).evaluate(1.0), WithinRel(4.0, 1e-15));
    const FactorApproximant neg(1.0, 0.0, {{-1.0, 0.5}});
    CHECK_THROWS_AS(neg.evaluate(1.0), DomainError);
    CHECK_THROWS_AS(neg.evaluate(2.0), DomainError);
    CHECK_THROWS_AS(FactorApproximant().evaluate(-1.0), DomainError);

    Eigen::ArrayXd t(3);
    t << 0.0, 1.0, 2.0;
    const Eigen::ArrayXd y = FactorApproximant(1.0, 0.0, {{1.0, 2.0}}).evaluate(t);
    CHECK(y[0] == 1.0);
    CHECK_THAT(y[2], WithinRel(9.0, 1e-15));
}

TEST_CASE("scattering instance approaches its amplitude", "[approximant]")
{
    const double A = 0.215, half = 0.6;
    const FactorApproximant fa(std::pow(A, half), half, {{A, -half}});
    const LargeXBehavior b = large_x_behavior(fa);
    CHECK_THAT(b.amplitude, WithinRel(1.0, 1e-14));
    CHECK_THAT(b.exponent, WithinAbs(0.0, 1e-15));
    for (double x : {5.0, 10.0, 20.0}) {
        const double t = std::pow(x, 5.0);
        // (At/(1+At))^0.6 = 1 - 0.6/(At) + O(t^-2)
        CHECK(std::abs(fa.evaluate(t) - 1.0) < 1.0 / (A * t));
    }
}

TEST_CASE("large-x behavior", "[approximant]")
{
    const LargeXBehavior e = large_x_behavior(FactorApproximant(2.5, 0.75, {}));
    CHECK(e.amplitude == 2.5);
    CHECK(e.exponent == 0.75);
    const LargeXBehavior b = large_x_behavior(FactorApproximant(1.0, 0.0, {{2.0, 3.0}}));
    CHECK_THAT(b.amplitude, WithinRel(8.0, 1e-15));
    CHECK(b.exponent == 3.0);
}

TEST_CASE("binomial products are recovered", "[approximant][property]")
{
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> uA(0.2, 3.0), un(-2.0, 2.0);
    int done = 0;
    while (done < 20) {
        std::vector<Factor> truth{{uA(rng), un(rng)}, {uA(rng), un(rng)}};
        if (std::abs(truth[0].A - truth[1].A) < 0.3 || std::abs(truth[0].n) < 0.2 || std::abs(truth[1].n) < 0.2)
            continue;
        truth = sorted(truth);
        SeriesInput s{binomial_product(truth, 4), {}};
        const FactorApproximant fa = train(s, std::nullopt, 2, TrainOptions{16, 200, 1e-10, static_cast<std::uint64_t>(done)});
        REQUIRE(fa.factors().size() == 2);
        for (int j = 0; j < 2; ++j) {
            CHECK_THAT(fa.factors()[j].A, WithinRel(truth[j].A, 1e-8));
            CHECK_THAT(fa.factors()[j].n, WithinRel(truth[j].n, 1e-8));
        }
        ++done;
    }
}

TEST_CASE("re-expansion reproduces the training series", "[approximant][property]")
{
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> uA(0.2, 2.5), un(-1.5, 1.5), uc(0.5, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::vector<Factor> truth{{uA(rng), un(rng)}, {uA(rng) + 3.0, un(rng)}};
        SeriesInput s{binomial_product(truth, 2), Prefactor{uc(rng), 0.0}};
        const LargeXBehavior lx = large_x_behavior(FactorApproximant(*s.prefactor.amplitude, 0.0, truth));
        const BoundaryData bd{lx.amplitude, lx.exponent};
        const FactorApproximant fa = train(s, bd, 2, TrainOptions{16, 200, 1e-10, static_cast<std::uint64_t>(trial)});
        const auto got = taylor_coefficients(fa, 2);
        for (std::size_t m = 1; m <= 2; ++m)
            CHECK_THAT(got[m], WithinAbs(s.coeffs[m], 1e-10 * std::max(1.0, std::abs(s.coeffs[m]))));
        const LargeXBehavior b = large_x_behavior(fa);
        CHECK_THAT(b.amplitude, WithinRel(bd.amplitude, 1e-10));
        CHECK_THAT(b.exponent, WithinAbs(bd.exponent, 1e-10));
        CHECK(training_residual(fa, s, bd) < 1e-10);
    }
}

TEST_CASE("training failures", "[approximant]")
{
    SECTION("a_1 = 0 with a boundary condition")
    {
        SeriesInput s{{1.0, 0.0}, Prefactor{std::nullopt, 0.5}};
        CHECK_THROWS_AS(train(s, BoundaryData{1.0, 0.0}, 1), DegeneracyError);
        const auto n4 = series_coefficients(4.0, 0.5, 1.0, 1);
        CHECK_THROWS_AS(train(SeriesInput{n4, Prefactor{std::nullopt, 1.0}}, BoundaryData{1.0, 0.0}, 1),
                        DegeneracyError);
    }
    SECTION("only negative A solves the system")
    {
        CHECK_THROWS_AS(train(SeriesInput{{1.0, 1.0, 1.0}, {}}, std::nullopt, 1), ConstructionError);
    }
    SECTION("complex conjugate pair")
    {
        SeriesInput s{{1.0, 0.0, -1.0, 0.0, 1.0}, {}};
        CHECK_THROWS_AS(train(s, std::nullopt, 2), ConstructionError);
    }
    SECTION("too few conditions")
    {
        CHECK_THROWS_AS(train(SeriesInput{{1.0, 6.0, 12.0}, {}}, std::nullopt, 2), ConstructionError);
    }
    SECTION("a_0 must be 1")
    {
        CHECK_THROWS_AS(train(SeriesInput{{2.0, 6.0, 12.0}, {}}, std::nullopt, 1), DomainError);
    }
    SECTION("unknown amplitude needs a boundary")
    {
        CHECK_THROWS_AS(train(SeriesInput{{1.0, 6.0, 12.0}, Prefactor{std::nullopt, 0.0}}, std::nullopt, 1),
                        DomainError);
    }
    SECTION("no factors but a nonzero series")
    {
        CHECK_THROWS_AS(train(SeriesInput{{1.0, 0.5}, {}}, std::nullopt, 0), ConstructionError);
    }
}

TEST_CASE("training is deterministic for a seed", "[approximant]")
{
    SeriesInput s{binomial_product({{0.7, 1.3}, {2.1, -0.4}}, 4), {}};
    const FactorApproximant a = train(s, std::nullopt, 2, TrainOptions{16, 200, 1e-10, 99});
    const FactorApproximant b = train(s, std::nullopt, 2, TrainOptions{16, 200, 1e-10, 99});
    CHECK(to_text(a) == to_text(b));
}

TEST_CASE("text record round-trips exactly", "[approximant][property]")
{
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    std::uniform_real_distribution<double> e(-300.0, 300.0);
    for (int i = 0; i < 200; ++i) {
        std::vector<Factor> f(i % 4);
        for (Factor& x : f)
            x = {std::abs(u(rng)) * std::pow(10.0, e(rng) / 10.0), u(rng)};
        const FactorApproximant fa(std::abs(u(rng)) * std::pow(10.0, e(rng)), u(rng), f);
        const FactorApproximant back = from_text(to_text(fa));
        CHECK(back.amplitude() == fa.amplitude());
        CHECK(back.power() == fa.power());
        REQUIRE(back.factors().size() == f.size());
        for (std::size_t j = 0; j < f.size(); ++j) {
            CHECK(back.factors()[j].A == f[j].A);
            CHECK(back.factors()[j].n == f[j].n);
        }
    }
}

TEST_CASE("text record parse errors", "[approximant]")
{
    CHECK_THROWS_AS(from_text("nonsense\n"), ParseError);
    CHECK_THROWS_WITH(from_text("factor_approximant\namplitude 1\npower x\n"), ContainsSubstring("line 3"));
    CHECK_THROWS_AS(from_text("factor_approximant\namplitude 1\npower 0\nfactor 1\n"), ParseError);
}
