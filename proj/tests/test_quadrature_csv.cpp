#include <catch_amalgamated.hpp>

#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "singreg/csv.hpp"
#include "singreg/errors.hpp"
#include "singreg/quadrature.hpp"

using namespace singreg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("quadrature on smooth integrands", "[quadrature]")
{
    CHECK_THAT(integrate_adaptive([](double x) { return std::exp(-x); }, 1e-3, 40.0).value,
               WithinRel(std::exp(-1e-3) - std::exp(-40.0), 1e-12));
    CHECK_THAT(integrate_adaptive([](double x) { return 1.0 / x; }, 1e-6, 1e3).value,
               WithinRel(std::log(1e9), 1e-12));
    CHECK_THAT(integrate_adaptive([](double x) { return std::pow(x, -10.0); }, 0.01, 50.0).value,
               WithinRel((std::pow(0.01, -9.0) - std::pow(50.0, -9.0)) / 9.0, 1e-12));
    CHECK_THAT(integrate_adaptive([](double x) { return std::sin(x); }, 1.0, 1.0 + M_PI).value,
               WithinAbs(std::cos(1.0) - std::cos(1.0 + M_PI), 1e-13));
}

TEST_CASE("quadrature of a sharp peak", "[quadrature]")
{
    auto peak = [](double x) { return std::exp(-std::pow((x - 3.0) / 0.05, 2.0)); };
    CHECK_THAT(integrate_adaptive(peak, 0.5, 10.0).value, WithinRel(std::sqrt(M_PI) * 0.05, 1e-10));
}

TEST_CASE("quadrature failures", "[quadrature]")
{
    QuadratureOptions tight;
    tight.max_intervals = 20;
    CHECK_THROWS_AS(integrate_adaptive([](double x) { return std::sin(1.0 / x); }, 1e-4, 1.0, tight), NumericError);
    CHECK_THROWS_AS(integrate_adaptive([](double x) { return x; }, 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(integrate_adaptive([](double x) { return x; }, 0.0, 1.0), DomainError);
}

TEST_CASE("format_double round-trips", "[csv][property]")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> ex(-300, 300);
    for (int i = 0; i < 2000; ++i) {
        const double v = std::ldexp(mant(rng), ex(rng));
        const std::string s = format_double(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == v);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("grids", "[csv]")
{
    const Eigen::ArrayXd lin = make_grid(0.5, 2.0, 4, false);
    REQUIRE(lin.size() == 4);
    CHECK(lin[0] == 0.5);
    CHECK(lin[1] == 1.0);
    CHECK(lin[3] == 2.0);
    const Eigen::ArrayXd lg = make_grid(0.3, 10.0, 500, true);
    CHECK(lg[0] == 0.3);
    CHECK(lg[499] == 10.0);
    CHECK_THAT(lg[250] / lg[249], WithinRel(lg[2] / lg[1], 1e-12));
    CHECK_THROWS_AS(make_grid(0.0, 1.0, 4, false), DomainError);
    CHECK_THROWS_AS(make_grid(1.0, 1.0, 4, false), DomainError);
    CHECK_THROWS_AS(make_grid(0.1, 1.0, 1, false), DomainError);
}

TEST_CASE("parallel_map is independent of thread count", "[csv]")
{
    const Eigen::ArrayXd x = make_grid(0.1, 10.0, 1001, true);
    auto f = [](double v) { return std::sin(v) * std::exp(-v) + std::log(v); };
    const Eigen::ArrayXd one = parallel_map(x, f, 1);
    for (unsigned t : {2u, 3u, 8u, 64u})
        CHECK((parallel_map(x, f, t) == one).all());
    CHECK_THROWS_AS(parallel_map(x, [](double v) -> double { if (v > 5.0) throw NumericError("bad"); return v; }, 4),
                    NumericError);
}

TEST_CASE("write_csv", "[csv]")
{
    Eigen::ArrayXd a(2), b(2);
    a << 1.0, 0.25;
    b << -2.0, 0.001;
    std::ostringstream out;
    write_csv(out, {"x", "g"}, {a, b});
    CHECK(out.str() == "x,g\n1,-2\n0.25,0.001\n");
}
