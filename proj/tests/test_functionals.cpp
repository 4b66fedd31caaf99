#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include <nehari/functionals.hpp>
#include <nehari/grid.hpp>
#include <nehari/params.hpp>
#include <nehari/weights.hpp>

#include "oracles.hpp"

using namespace nehari;
using Catch::Matchers::WithinRel;

namespace {

ProblemParams reference_params(double lambda = 0.0) {
    ProblemParams par;  // s = 0.4, p = 2, q = 0.5, r = 3
    par.lambda = lambda;
    return par;
}

}  // namespace

TEST_CASE("exterior kernel weight matches the closed form and quadrature", "[functionals]") {
    // closed form at ps = 0.8: (1/ps)((1+x)^{-ps} + (1-x)^{-ps})
    REQUIRE(exterior_kernel_weight(0.0, 0.8) == 2.5);
    REQUIRE_THAT(exterior_kernel_weight(0.5, 0.8),
                 WithinRel(3.080102884238392526, 1e-14));
    REQUIRE_THAT(exterior_kernel_weight(0.9375, 0.8),
                 WithinRel(12.22338840664829490, 1e-14));

    // independent check of the formula itself: log-substituted adaptive
    // quadrature of the two exterior tails
    for (double x : {0.0, 0.3, -0.3, 0.77, -0.77, 0.9921875}) {
        REQUIRE_THAT(exterior_kernel_weight(x, 0.8),
                     WithinRel(oracle::kappa_quadrature(x, 0.8), 1e-10));
    }
}

TEST_CASE("seminorm of the hat function on three nodes", "[functionals]") {
    const Grid g = build_grid(3);
    const ProblemParams par = reference_params();
    const GridFunction w = make_function(g, {0.5, 1.0, 0.5});
    // frozen high-precision evaluation of the N = 3 double sum
    const double expected = 4.9106020054153204021;
    REQUIRE_THAT(seminorm_p(w, par), WithinRel(expected, 1e-14));
    REQUIRE_THAT(oracle::brute_seminorm(w.values, par.p, par.ps()), WithinRel(expected, 1e-14));
}

TEST_CASE("seminorm agrees with the O(N^2) brute force", "[functionals]") {
    const Grid g = build_grid(64);
    std::mt19937_64 rng(11);
    std::vector<double> vals(64);
    for (double& v : vals) v = -1.0 + 2.0 * oracle::u01(rng);
    const GridFunction w = make_function(g, vals);

    ProblemParams par = reference_params();
    REQUIRE_THAT(seminorm_p(w, par), WithinRel(oracle::brute_seminorm(vals, par.p, par.ps()), 1e-12));

    par.p = 2.6;  // exercises the general |d|^p path instead of d*d
    par.s = 0.3;
    REQUIRE_THAT(seminorm_p(w, par), WithinRel(oracle::brute_seminorm(vals, par.p, par.ps()), 1e-12));
}

TEST_CASE("seminorm and gradient are bitwise deterministic across threads", "[functionals]") {
    const Grid g = build_grid(101);
    std::mt19937_64 rng(3);
    std::vector<double> vals(101);
    for (double& v : vals) v = -1.0 + 2.0 * oracle::u01(rng);
    const GridFunction w = make_function(g, vals);
    const ProblemParams par = reference_params();

    const double p1 = seminorm_p(w, par, 1);
    const double p3 = seminorm_p(w, par, 3);
    const double p8 = seminorm_p(w, par, 8);
    REQUIRE(p1 == p3);
    REQUIRE(p1 == p8);

    const auto g1 = seminorm_gradient(w, par, 1);
    const auto g4 = seminorm_gradient(w, par, 4);
    REQUIRE(g1 == g4);
}

TEST_CASE("singular and superlinear integrals on simple data", "[functionals]") {
    const Grid g = build_grid(255);
    const WeightPair wt = make_weights(g, "constant 1", "cos 1");
    const ProblemParams par = reference_params(0.1);
    const GridFunction one = constant_function(g, 1.0);

    const FunctionalTriple f = functional_triple(one, wt, par);
    REQUIRE(f.a_integral == 1.9921875);  // sum of h over 255 nodes, exact
    // sum_i h cos(pi x_i) telescopes to exactly h on the symmetric grid
    REQUIRE_THAT(f.b_integral, WithinRel(g.h, 1e-13));

    // negative parts do not contribute to A or B, but do change the seminorm
    GridFunction mixed = make_function(g, std::vector<double>(255, 1.0));
    for (int i = 0; i < 255; i += 2) mixed.values[i] = -0.5;
    const FunctionalTriple fm = functional_triple(mixed, wt, par);
    const FunctionalTriple fp = functional_triple(positive_part(mixed), wt, par);
    REQUIRE(fm.a_integral == fp.a_integral);
    REQUIRE(fm.b_integral == fp.b_integral);
    REQUIRE(fm.seminorm_p > fp.seminorm_p);
}

TEST_CASE("first variation pairs with w to the Euler identity", "[functionals]") {
    // <J'(w), w> = P - A - lambda B for every positive w: the p-homogeneous
    // seminorm pairs to P, the two potentials pair to their own integrals
    const Grid g = build_grid(63);
    const WeightPair wt = make_weights(g, "constant 1", "cos 1");
    const ProblemParams par = reference_params(0.7);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> vals = oracle::random_bump(63, rng);
        for (double& v : vals) v += 0.05;  // strictly positive, above the floor
        const GridFunction w = make_function(g, vals);
        const FunctionalTriple f = functional_triple(w, wt, par);
        const FirstVariation fv = first_variation(w, wt, par);
        const double expected = f.seminorm_p - f.a_integral - par.lambda * f.b_integral;
        REQUIRE_THAT(pairing(fv.gradient, w), WithinRel(expected, 1e-11));
    }
}

TEST_CASE("first variation matches finite differences of the energy", "[functionals]") {
    const Grid g = build_grid(33);
    const WeightPair wt = make_weights(g, "constant 1", "cos 1");
    const ProblemParams par = reference_params(0.4);
    std::mt19937_64 rng(17);

    auto J = [&](const std::vector<double>& vals) {
        return energy(make_function(g, vals), wt, par);
    };

    for (int trial = 0; trial < 4; ++trial) {
        std::vector<double> vals = oracle::random_bump(33, rng);
        for (double& v : vals) v += 0.5;  // keep w + h v far from the singularity
        const GridFunction w = make_function(g, vals);
        const FirstVariation fv = first_variation(w, wt, par);
        for (int k = 0; k < 3; ++k) {
            std::vector<double> dir(33);
            for (double& d : dir) d = -1.0 + 2.0 * oracle::u01(rng);
            const double fd = oracle::fd_directional(J, vals, dir, 1e-6);
            const double an = pairing(fv.gradient, make_function(g, dir));
            REQUIRE_THAT(an, WithinRel(fd, 1e-6));
        }
    }
}

TEST_CASE("weight norms use the conjugate embedding exponents", "[functionals]") {
    const Grid g = build_grid(255);
    const WeightPair wt = make_weights(g, "constant 1", "cos 1");
    const ProblemParams par = reference_params();
    const WeightNorms n = weight_norms(wt, par);
    // p* = 10: m_a = 10/9.5, m_b = 10/6
    REQUIRE_THAT(n.m_a, WithinRel(10.0 / 9.5, 1e-15));
    REQUIRE_THAT(n.m_b, WithinRel(5.0 / 3.0, 1e-15));
    // (sum h)^{1/m_a} = 1.9921875^{0.95}, frozen high-precision value
    REQUIRE_THAT(n.norm_a, WithinRel(1.9247028980959708045, 1e-14));
    REQUIRE(n.norm_b > 0.0);

    const GridFunction one = constant_function(g, 1.0);
    REQUIRE_THAT(critical_norm(one, par), WithinRel(1.0713540632732282849, 1e-14));

    // r too close to p* - 1 makes m_b blow up
    ProblemParams bad = par;
    bad.r = 9.5;
    REQUIRE_THROWS_AS(bad.validate(false), config_error);
}

TEST_CASE("energy splits into the three functional terms", "[functionals]") {
    const Grid g = build_grid(63);
    const WeightPair wt = make_weights(g, "constant 1", "cos 1");
    const ProblemParams par = reference_params(0.9);
    std::mt19937_64 rng(23);
    std::vector<double> vals = oracle::random_bump(63, rng);
    const GridFunction w = make_function(g, vals);
    const FunctionalTriple f = functional_triple(w, wt, par);
    const double expected = f.seminorm_p / par.p - f.a_integral / (1.0 - par.q) -
                            par.lambda * f.b_integral / (par.r + 1.0);
    REQUIRE(energy(f, par) == expected);
    REQUIRE(energy(w, wt, par) == expected);
}
