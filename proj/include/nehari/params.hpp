#pragma once

#include <string>

#include "errors.hpp"

namespace nehari {

// Exponents of the one-dimensional singular problem on (-1,1):
//
//   (-Delta)_p^s w = a(x) w^{-q} + lambda b(x) w^r,   w > 0 in (-1,1),
//   w = 0 on the whole exterior.
//
// The admissible window q < p-1 < r < p_star-1 with p*s < 1 is exactly where
// the fiber maps have the two-root structure the solver relies on.
struct ProblemParams {
    double s = 0.4;       // differentiability order, 0 < s < 1
    double p = 2.0;       // integrability exponent, p > 1, p*s < 1
    double q = 0.5;       // singular exponent, 0 < q < 1, q < p-1
    double r = 3.0;       // superlinear exponent, p-1 < r < p_star()-1
    double lambda = 0.0;  // weight of the superlinear term, > 0 where required

    double ps() const { return p * s; }

    // critical exponent p/(1 - p*s) for n = 1
    double p_star() const { return p / (1.0 - p * s); }

    // Throws config_error naming the violated constraint. lambda is only
    // checked when the caller actually consumes it.
    void validate(bool need_lambda = false) const {
        auto fail = [](const char* constraint) {
            throw config_error(std::string("parameter constraint violated: ") + constraint);
        };
        if (!(s > 0.0 && s < 1.0)) fail("0 < s < 1");
        if (!(p > 1.0)) fail("p > 1");
        if (!(p * s < 1.0)) fail("p*s < 1");
        if (!(q > 0.0 && q < 1.0)) fail("0 < q < 1");
        if (!(q < p - 1.0)) fail("q < p - 1");
        if (!(r > p - 1.0)) fail("r > p - 1");
        if (!(r < p_star() - 1.0)) fail("r < p_star - 1");
        if (need_lambda && !(lambda > 0.0)) fail("lambda > 0");
    }
};

}
