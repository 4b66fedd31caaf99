#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <nehari/grid.hpp>
#include <nehari/weights.hpp>

#include "oracles.hpp"

using namespace nehari;
using Catch::Matchers::WithinRel;

TEST_CASE("grid geometry is exact for small and reference sizes", "[grid]") {
    const Grid g3 = build_grid(3);
    REQUIRE(g3.h == 0.5);
    REQUIRE(g3.nodes == std::vector<double>{-0.5, 0.0, 0.5});
    REQUIRE(g3.quad_weights == std::vector<double>(3, 0.5));

    const Grid g = build_grid(255);
    REQUIRE(g.h == 2.0 / 256.0);
    REQUIRE(g.nodes.front() == -1.0 + g.h);
    REQUIRE(g.nodes.back() == 1.0 - g.h);
    // the grid is symmetric about 0 bit-for-bit
    for (int i = 0; i < 255; ++i) REQUIRE(g.nodes[i] == -g.nodes[254 - i]);
    REQUIRE(g.nodes[127] == 0.0);
}

TEST_CASE("grid rejects fewer than three nodes", "[grid]") {
    REQUIRE_THROWS_AS(build_grid(2), config_error);
    REQUIRE_THROWS_AS(build_grid(0), config_error);
}

TEST_CASE("weighted sums and norms on constants are exact", "[grid]") {
    const Grid g = build_grid(255);
    const GridFunction one = constant_function(g, 1.0);
    // 255 * (2/256) = 1.9921875, exact in binary
    REQUIRE(lp_weighted_sum(one, 1.0) == 1.9921875);
    REQUIRE(lp_weighted_sum(one, 7.0) == 1.9921875);
    REQUIRE_THAT(lp_weighted_norm(one, 2.0), WithinRel(std::sqrt(1.9921875), 1e-15));

    GridFunction w = constant_function(g, -1.0);
    REQUIRE_THROWS_AS(lp_weighted_sum(w, 1.5), config_error);  // fractional power, negative base
    REQUIRE(lp_weighted_sum(w, 2.0) == 1.9921875);             // integer power is fine
}

TEST_CASE("positive part and size checks", "[grid]") {
    const Grid g = build_grid(5);
    GridFunction w = make_function(g, {1.0, -2.0, 0.0, 3.5, -0.25});
    const GridFunction wp = positive_part(w);
    REQUIRE(wp.values == std::vector<double>{1.0, 0.0, 0.0, 3.5, 0.0});
    REQUIRE(w.values[1] == -2.0);  // input untouched

    REQUIRE_THROWS_AS(make_function(g, {1.0, 2.0}), config_error);
}

TEST_CASE("weight specs evaluate their closed forms at the nodes", "[weights]") {
    const Grid g = build_grid(31);
    const GridFunction c = load_weight(g, "constant 2.5");
    for (double v : c.values) REQUIRE(v == 2.5);

    const GridFunction cs = load_weight(g, "cos 1");
    for (int i = 0; i < g.num_nodes; ++i)
        REQUIRE(cs.values[i] == std::cos(std::numbers::pi * g.nodes[i]));
    REQUIRE(cs.values[15] == 1.0);  // center node x = 0

    const GridFunction gs = load_weight(g, "gauss 0.25 0.5");
    for (int i = 0; i < g.num_nodes; ++i) {
        const double z = (g.nodes[i] - 0.25) / 0.5;
        REQUIRE(gs.values[i] == std::exp(-z * z));
    }

    REQUIRE_THROWS_AS(load_weight(g, "triangle 1"), config_error);
    REQUIRE_THROWS_AS(load_weight(g, "constant"), config_error);
    REQUIRE_THROWS_AS(load_weight(g, "constant abc"), config_error);
    REQUIRE_THROWS_AS(load_weight(g, "gauss 0 0"), config_error);
    REQUIRE_THROWS_AS(load_weight(g, ""), config_error);
}

TEST_CASE("function CSV round-trips bit-exactly through the csv spec", "[weights]") {
    const Grid g = build_grid(64);
    std::mt19937_64 rng(7);
    std::vector<double> vals(64);
    for (double& v : vals) v = -1.0 + 2.0 * oracle::u01(rng);
    const GridFunction w = make_function(g, vals);

    namespace fs = std::filesystem;
    const fs::path dir = "tmp_grid_csv";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string path = (dir / "w.csv").string();
    write_function_csv(path, w);

    const GridFunction back = load_weight(g, "csv " + path);
    REQUIRE(back.values == w.values);
    fs::remove_all(dir);
}

TEST_CASE("weight tables interpolate linearly and validate their input", "[weights]") {
    WeightTable t{{-1.0, 0.0, 1.0}, {2.0, 4.0, 0.0}};
    REQUIRE(t.eval(-1.0) == 2.0);
    REQUIRE(t.eval(0.0) == 4.0);
    REQUIRE(t.eval(1.0) == 0.0);
    REQUIRE_THAT(t.eval(-0.5), WithinRel(3.0, 1e-15));
    REQUIRE_THAT(t.eval(0.25), WithinRel(3.0, 1e-15));

    namespace fs = std::filesystem;
    const fs::path dir = "tmp_grid_table";
    fs::remove_all(dir);
    fs::create_directories(dir);

    auto write = [&](const char* name, const char* body) {
        std::ofstream out(dir / name);
        out << body;
        return (dir / name).string();
    };
    const Grid g = build_grid(5);
    // header allowed, values recovered at the knots
    const std::string ok = write("ok.csv", "x,v\n-1,1\n0,2\n1,3\n");
    const GridFunction w = load_weight(g, "csv " + ok);
    REQUIRE(w.values[2] == 2.0);

    REQUIRE_THROWS_AS(load_weight_table(write("short.csv", "x,v\n0,1\n")), config_error);
    REQUIRE_THROWS_AS(load_weight_table(write("dup.csv", "-1,1\n-1,2\n1,3\n")), config_error);
    REQUIRE_THROWS_AS(load_weight_table(write("range.csv", "-0.5,1\n0.5,2\n")), config_error);
    REQUIRE_THROWS_AS(load_weight_table(write("cols.csv", "-1,1,9\n1,2,9\n")), config_error);
    REQUIRE_THROWS_AS(load_weight_table((dir / "missing.csv").string()), config_error);
    fs::remove_all(dir);
}

TEST_CASE("weight pair admissibility", "[weights]") {
    const Grid g = build_grid(31);
    REQUIRE_NOTHROW(make_weights(g, "constant 1", "cos 1"));
    // cos(2 pi x) = -1 at the node x = 1/2, so it fails the positivity check
    REQUIRE_THROWS_AS(make_weights(g, "cos 2", "constant 1"), config_error);
    REQUIRE_THROWS_AS(make_weights(g, "constant -1", "constant 1"), config_error);
    REQUIRE_THROWS_AS(make_weights(g, "constant 1", "constant -2"), config_error);
    REQUIRE_THROWS_AS(make_weights(g, "constant 1", "constant 0"), config_error);
}
