#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "singreg/errors.hpp"
#include "singreg/potentials.hpp"

using namespace singreg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("reduce", "[potentials]")
{
    CHECK_THAT(reduce({1.0, 1.0, 1.0}), WithinRel(1.0, 1e-15));
    CHECK_THAT(reduce({2.0, 1.0, 1.0}), WithinRel(0.5, 1e-15));
    CHECK_THAT(reduce({1.0, 4.0, 4.0}), WithinRel(0.25, 1e-15));
    CHECK_THROWS_AS(reduce({0.0, 1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(reduce({1.0, -1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(reduce({1.0, 1.0, 0.0}), DomainError);
}

TEST_CASE("reduce scales inversely with sigma", "[potentials][property]")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 200; ++i) {
        const PhysicalParams p{u(rng), u(rng), u(rng)};
        const double a = u(rng);
        CHECK_THAT(reduce({p.sigma * a, p.epsilon, p.mass}), WithinRel(reduce(p) / a, 1e-13));
    }
}

TEST_CASE("Lennard-Jones values", "[potentials]")
{
    const PotentialSpec lj = PotentialSpec::lennard_jones();
    CHECK(lj.evaluate(1.0) == 0.0);
    CHECK_THAT(lj.evaluate(std::pow(2.0, 1.0 / 6.0)), WithinAbs(-1.0, 1e-14));
    CHECK_THAT(lj.evaluate(0.5), WithinRel(16128.0, 1e-15));
    CHECK_THROWS_AS(lj.evaluate(0.0), DomainError);
    CHECK_THROWS_AS(lj.evaluate(-1.0), DomainError);
    CHECK(lj.n() == 12.0);
}

TEST_CASE("Lennard-Jones shape", "[potentials][property]")
{
    const PotentialSpec lj = PotentialSpec::lennard_jones();
    CHECK(lj.evaluate(1e-3) > 1e30);
    CHECK(lj.evaluate(1e3) < 0.0);
    CHECK(lj.evaluate(1e3) > -1e-17);
    // one sign change, at x = 1
    int changes = 0;
    double prev = lj.evaluate(0.1);
    for (int i = 1; i <= 4000; ++i) {
        const double v = lj.evaluate(0.1 + i * 1e-3 * 2.4);
        if ((v > 0.0) != (prev > 0.0))
            ++changes;
        prev = v;
    }
    CHECK(changes == 1);
    CHECK(lj.evaluate(1.0 - 1e-12) > 0.0);
    CHECK(lj.evaluate(1.0 + 1e-12) < 0.0);
}

TEST_CASE("s(x)", "[potentials]")
{
    const PotentialSpec lj = PotentialSpec::lennard_jones();
    CHECK(s_of_x(lj, 0.0) == 2.0);
    CHECK(s_of_x(lj, 1.0) == 0.0);
    CHECK_THROWS_AS(s_of_x(lj, -0.1), DomainError);
    for (double n : {3.0, 4.0, 6.5, 12.0}) {
        const PotentialSpec p = PotentialSpec::power_law(n);
        for (double x : {0.0, 1e-3, 0.7, 1.0, 13.0})
            CHECK_THAT(s_of_x(p, x), WithinRel(1.0, 1e-14));
    }
}

TEST_CASE("s^2 x^-n = |v| and sign agreement", "[potentials][property]")
{
    const PotentialSpec lj = PotentialSpec::lennard_jones();
    const PotentialSpec p7 = PotentialSpec::power_law(7.3);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> logx(std::log(0.05), std::log(20.0));
    for (int i = 0; i < 500; ++i) {
        const double x = std::exp(logx(rng));
        for (const PotentialSpec* p : {&lj, &p7}) {
            const double v = p->evaluate(x);
            const double s = s_of_x(*p, x);
            CHECK_THAT(s * s * std::pow(x, -p->n()), WithinRel(std::abs(v), 1e-12));
            if (v != 0.0)
                CHECK((s > 0.0) == (v > 0.0));
        }
    }
}

TEST_CASE("power law", "[potentials]")
{
    const PotentialSpec p = PotentialSpec::power_law(6.0);
    CHECK_THAT(p.evaluate(2.0), WithinRel(1.0 / 64.0, 1e-15));
    CHECK(p.s0() == 1.0);
    CHECK_THROWS_AS(PotentialSpec::power_law(2.0), DomainError);
    CHECK_THROWS_AS(PotentialSpec::power_law(1.5), DomainError);
    CHECK(PotentialSpec::power_law(6.0).warnings().empty());
    CHECK(PotentialSpec::power_law(3.0).warnings().size() == 1);
    CHECK(PotentialSpec::power_law(2.5).warnings().size() == 1);
}

TEST_CASE("slow variation", "[potentials]")
{
    const Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(800, 1e-3, 0.8);

    const SlowVariationReport flat = slow_variation_check(PotentialSpec::power_law(9.0), grid);
    CHECK(flat.max_ratio == 0.0);
    CHECK((flat.ratio == 0.0).all());

    const PotentialSpec lj = PotentialSpec::lennard_jones();
    Eigen::ArrayXd half(1);
    half << 0.5;
    // |d(4(1-x^6))/dx| / |d(x^-12)/dx| = 24 x^5 / (12 x^-13) = 2 x^18
    CHECK_THAT(slow_variation_check(lj, half).ratio[0], WithinRel(24.0 * 0.03125 / (12.0 * 8192.0), 1e-12));

    const SlowVariationReport r = slow_variation_check(lj, grid);
    CHECK_THAT(r.max_ratio, WithinRel(2.0 * std::pow(0.8, 18.0), 1e-10));
    CHECK(r.argmax == 0.8);
    const SlowVariationReport r7 = slow_variation_check(lj, Eigen::ArrayXd::LinSpaced(700, 1e-3, 0.7));
    CHECK(r7.max_ratio < 0.01);
}

TEST_CASE("Richardson limit is exact for quadratics", "[potentials]")
{
    auto f = [](double h) { return 3.0 - 2.0 * h + 5.0 * h * h; };
    CHECK_THAT(richardson_limit(f(0.1), f(0.05), f(0.025)), WithinAbs(3.0, 1e-13));
}

namespace {

PotentialSpec lj_table(double lo, double hi, int points)
{
    std::vector<double> x, v;
    for (int i = 0; i < points; ++i) {
        const double xi = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
        x.push_back(xi);
        v.push_back(lennard_jones(xi));
    }
    return PotentialSpec::tabulated(x, v, 12.0);
}

} // namespace

TEST_CASE("tabulated potential", "[potentials]")
{
    const PotentialSpec t = lj_table(1e-3, 10.0, 400);
    CHECK(t.kind() == PotentialKind::Tabulated);
    CHECK(t.n() == 12.0);
    CHECK_THAT(t.s0(), WithinRel(2.0, 1e-8));
    for (double x : {0.01, 0.37, 0.9, 1.3, 2.0, 7.7}) {
        const double exact = lennard_jones(x);
        CHECK_THAT(t.evaluate(x), WithinAbs(exact, 1e-4 * std::max(1.0, std::abs(exact))));
    }
    // nodes are reproduced exactly
    CHECK(t.evaluate(t.table_x()[17]) == t.table_v()[17]);
    CHECK_THROWS_AS(t.evaluate(5e-4), DomainError);
    CHECK_THROWS_AS(t.evaluate(11.0), DomainError);
}

TEST_CASE("tabulated potential rejects bad tables", "[potentials]")
{
    CHECK_THROWS_AS(PotentialSpec::tabulated({0.1, 0.05}, {1.0, 2.0}, 12.0), DomainError);
    CHECK_THROWS_AS(PotentialSpec::tabulated({0.001, 0.1}, {1.0, 2.0}, 2.0), DomainError);
    // s(0) needs samples down to 2.5e-3
    CHECK_THROWS_AS(lj_table(0.05, 10.0, 50), DomainError);
    // attractive core
    std::vector<double> x{1e-3, 1e-2, 1e-1, 1.0};
    std::vector<double> v{-1e36, -1e24, -1e12, -1.0};
    CHECK_THROWS_AS(PotentialSpec::tabulated(x, v, 12.0), DomainError);
}
