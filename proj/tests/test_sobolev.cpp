#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include <nehari/grid.hpp>
#include <nehari/sobolev.hpp>

#include "oracles.hpp"

using namespace nehari;
using Catch::Matchers::WithinRel;

TEST_CASE("embedding constant minimises the Rayleigh quotient", "[sobolev]") {
    const Grid g = build_grid(31);
    const ProblemParams par;
    const SobolevEstimate est = sobolev_estimate(g, par);

    REQUIRE(est.converged);
    REQUIRE(est.s_value > 0.0);
    // the minimizer is kept on the unit critical sphere
    REQUIRE_THAT(critical_norm(est.minimizer, par), WithinRel(1.0, 1e-10));
    // the reported value is the honestly recomputed quotient of the minimizer
    REQUIRE_THAT(rayleigh_quotient(est.minimizer, par), WithinRel(est.s_value, 1e-12));
    REQUIRE(est.effective() < est.s_value);
    REQUIRE_THAT(est.effective(), WithinRel(est.s_value * (1.0 - est.margin), 1e-15));

    // the hat start cannot beat the minimum it descended from
    GridFunction hat{&g, std::vector<double>(31)};
    for (int i = 0; i < 31; ++i) hat.values[i] = 1.0 - std::abs(g.nodes[i]);
    REQUIRE(rayleigh_quotient(hat, par) >= est.s_value);
}

TEST_CASE("effective constant bounds the quotient over random directions", "[sobolev]") {
    // P(w) >= s_used ||w||_{p*}^p must hold for every direction; the margin
    // absorbs the fact that the minimisation only ever overestimates
    const Grid g = build_grid(31);
    const ProblemParams par;
    const SobolevEstimate est = sobolev_estimate(g, par);
    const double s_used = est.effective();

    std::mt19937_64 rng(42);
    int violations = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> vals(31);
        for (double& v : vals) v = -1.0 + 2.0 * oracle::u01(rng);
        const GridFunction w = make_function(g, vals);
        const double lhs = seminorm_p(w, par);
        const double rhs = s_used * std::pow(critical_norm(w, par), par.p);
        if (!(lhs >= rhs * (1.0 - 1e-12))) ++violations;
    }
    REQUIRE(violations == 0);
}

TEST_CASE("embedding estimate is bitwise deterministic", "[sobolev]") {
    const Grid g = build_grid(31);
    const ProblemParams par;
    const SobolevEstimate a = sobolev_estimate(g, par);
    const SobolevEstimate b = sobolev_estimate(g, par);
    REQUIRE(a.s_value == b.s_value);
    REQUIRE(a.minimizer.values == b.minimizer.values);
    REQUIRE(a.iterations == b.iterations);

    const SobolevEstimate c = sobolev_estimate(g, par, {}, 4);
    REQUIRE(a.s_value == c.s_value);
    REQUIRE(a.minimizer.values == c.minimizer.values);
}

TEST_CASE("iteration budget is honoured and reported", "[sobolev]") {
    const Grid g = build_grid(31);
    const ProblemParams par;
    SobolevConfig cfg;
    cfg.max_iters = 3;
    const SobolevEstimate est = sobolev_estimate(g, par, cfg);
    REQUIRE_FALSE(est.converged);
    REQUIRE(est.iterations == 3);
    REQUIRE(est.s_value > 0.0);
}

TEST_CASE("rayleigh quotient rejects the zero function", "[sobolev]") {
    const Grid g = build_grid(5);
    const ProblemParams par;
    REQUIRE_THROWS_AS(rayleigh_quotient(constant_function(g, 0.0), par), config_error);
}
