#include <catch_amalgamated.hpp>

#include <sstream>

#include "singreg/errors.hpp"
#include "singreg/materials.hpp"

using namespace singreg;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("built-in materials", "[materials]")
{
    const MaterialRegistry r = MaterialRegistry::with_builtins();
    CHECK(r.size() == 6);
    CHECK(r.lookup("he3").lambda == 0.494);
    CHECK(r.lookup("he4").lambda == 0.430);
    CHECK(r.lookup("he6").lambda == 0.347);
    CHECK(r.lookup("h_pol").lambda == 0.740);
    CHECK(r.lookup("d_pol").lambda == 0.523);
    CHECK(r.lookup("t_pol").lambda == 0.428);
    for (const Material& m : r.all())
        CHECK(m.potential.kind() == PotentialKind::LennardJones);
}

TEST_CASE("ordering and round trips", "[materials]")
{
    const MaterialRegistry r = MaterialRegistry::with_builtins();
    const auto all = r.all();
    const std::vector<std::string> ids{"d_pol", "h_pol", "he3", "he4", "he6", "t_pol"};
    REQUIRE(all.size() == ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        CHECK(all[i].id == ids[i]);
        const Material& back = r.lookup(all[i].id);
        CHECK(back.lambda == all[i].lambda);
        CHECK(back.display_name == all[i].display_name);
    }
}

TEST_CASE("unknown ids", "[materials]")
{
    const MaterialRegistry r = MaterialRegistry::with_builtins();
    CHECK_THROWS_AS(r.lookup("xx"), NotFoundError);
    CHECK_THROWS_WITH(r.lookup("xx"), ContainsSubstring("unknown material") && ContainsSubstring("he4"));
}

TEST_CASE("registration", "[materials]")
{
    MaterialRegistry r = MaterialRegistry::with_builtins();
    r.add({"ne20", "Neon-20", reduce({2.0, 1.0, 1.0}), PotentialSpec::lennard_jones()});
    CHECK(r.size() == 7);
    CHECK(r.lookup("ne20").lambda == 0.5);
    CHECK_THROWS_AS(r.add({"he4", "again", 0.4, PotentialSpec::lennard_jones()}), DomainError);
    CHECK_THROWS_AS(r.add({"bad", "bad", 0.0, PotentialSpec::lennard_jones()}), DomainError);
    CHECK(r.size() == 7);
}

TEST_CASE("registry files", "[materials]")
{
    MaterialRegistry r = MaterialRegistry::with_builtins();
    std::istringstream in("# custom\n\nkr,Krypton,0.1,lj,12\np8,soft,0.9,power,8\n");
    r.load(in);
    CHECK(r.size() == 8);
    CHECK(r.lookup("p8").potential.kind() == PotentialKind::PowerLaw);
    CHECK(r.lookup("p8").potential.n() == 8.0);

    for (const char* bad : {"x,y\n", "a,b,zero,lj,12\n", "a,b,0.5,morse,12\n", "a,b,-1,lj,12\n",
                            "a,b,0.5,power,1\n", "a,b,0.5,lj,12,extra\n"}) {
        MaterialRegistry fresh;
        std::istringstream bad_in(std::string("# header\n") + bad);
        CHECK_THROWS_AS(fresh.load(bad_in, "custom.txt"), ParseError);
    }
    MaterialRegistry fresh;
    std::istringstream bad_in("ok,Ok,0.5,lj,12\n\nbroken\n");
    CHECK_THROWS_WITH(fresh.load(bad_in, "custom.txt"), ContainsSubstring("custom.txt:3:"));

    CHECK_THROWS_AS(r.load_file("/nonexistent/registry.txt"), IoError);
}
