#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "errors.hpp"
#include "functionals.hpp"
#include "params.hpp"

namespace nehari {

// Fiber map of a direction w, as scalar functions of the ray parameter t > 0,
// entirely determined by the triple (P, A, B) = (||w||^p, A(w), B(w)):
//   phi(t)  = t^p/p P - t^{1-q}/(1-q) A - lambda t^{r+1}/(r+1) B
//   phi'(t) = t^{p-1} P - t^{-q} A - lambda t^r B = t^r psi(t)
//   psi(t)  = t^{p-1-r} P - t^{-r-q} A - lambda B

inline double phi(const FunctionalTriple& f, const ProblemParams& par, double t) {
    if (!(t > 0.0)) throw config_error("fiber map requires t > 0");
    return std::pow(t, par.p) / par.p * f.seminorm_p -
           std::pow(t, 1.0 - par.q) / (1.0 - par.q) * f.a_integral -
           par.lambda * std::pow(t, par.r + 1.0) / (par.r + 1.0) * f.b_integral;
}

inline double phi_prime(const FunctionalTriple& f, const ProblemParams& par, double t) {
    if (!(t > 0.0)) throw config_error("fiber map requires t > 0");
    return std::pow(t, par.p - 1.0) * f.seminorm_p - std::pow(t, -par.q) * f.a_integral -
           par.lambda * std::pow(t, par.r) * f.b_integral;
}

inline double phi_second(const FunctionalTriple& f, const ProblemParams& par, double t) {
    if (!(t > 0.0)) throw config_error("fiber map requires t > 0");
    return (par.p - 1.0) * std::pow(t, par.p - 2.0) * f.seminorm_p +
           par.q * std::pow(t, -par.q - 1.0) * f.a_integral -
           par.r * par.lambda * std::pow(t, par.r - 1.0) * f.b_integral;
}

inline double psi(const FunctionalTriple& f, const ProblemParams& par, double t) {
    if (!(t > 0.0)) throw config_error("fiber map requires t > 0");
    return std::pow(t, par.p - 1.0 - par.r) * f.seminorm_p -
           std::pow(t, -par.r - par.q) * f.a_integral - par.lambda * f.b_integral;
}

// Magnitude scale of psi's three terms at t; "psi is zero to eps relative"
// means |psi(t)| <= eps * psi_scale(t).
inline double psi_scale(const FunctionalTriple& f, const ProblemParams& par, double t) {
    return std::pow(t, par.p - 1.0 - par.r) * f.seminorm_p +
           std::pow(t, -par.r - par.q) * std::abs(f.a_integral) +
           std::abs(par.lambda * f.b_integral);
}

// Argmax of psi: t_max = ((r+q) A / ((r-p+1) P))^{1/(p-1+q)}. psi increases
// strictly before it and decreases strictly after it.
inline double t_max(const FunctionalTriple& f, const ProblemParams& par) {
    if (!(f.seminorm_p > 0.0)) throw config_error("t_max requires a nonzero direction");
    if (!(f.a_integral > 0.0)) throw config_error("t_max requires a-integral > 0");
    return std::pow((par.r + par.q) * f.a_integral / ((par.r - par.p + 1.0) * f.seminorm_p),
                    1.0 / (par.p - 1.0 + par.q));
}

enum class FiberCase { OneRoot, TwoRoots };

struct FiberRoots {
    FiberCase kind = FiberCase::OneRoot;
    double t_max = 0.0;
    double psi_at_tmax = 0.0;
    double t1 = 0.0;  // local min of phi along the ray; always present
    double t2 = 0.0;  // local max; only meaningful for TwoRoots
};

namespace detail {

// Bisection on psi over a bracket with psi(neg_end) < 0 < psi(pos_end),
// run to 1e-12 relative width (or the floating floor of the bracket).
inline double bisect_psi(const FunctionalTriple& f, const ProblemParams& par, double neg_end,
                         double pos_end) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (neg_end + pos_end);
        if (mid == neg_end || mid == pos_end) break;
        const double v = psi(f, par, mid);
        if (v == 0.0) return mid;
        (v < 0.0 ? neg_end : pos_end) = mid;
        if (std::abs(pos_end - neg_end) <= 1e-12 * mid) break;
    }
    return 0.5 * (neg_end + pos_end);
}

}  // namespace detail

// Roots of psi, i.e. Nehari crossings of the ray t*w. Requires lambda below
// the direction's admissible threshold, which is exactly psi(t_max) > 0.
// B > 0: two roots t1 < t_max < t2. B <= 0: one root t1 < t_max (after the
// max, psi stays above its limit -lambda B >= 0).
inline FiberRoots fiber_roots(const FunctionalTriple& f, const ProblemParams& par) {
    par.validate(true);
    FiberRoots out;
    out.t_max = t_max(f, par);
    out.psi_at_tmax = psi(f, par, out.t_max);
    if (!(out.psi_at_tmax > 0.0))
        throw out_of_range_error(
            "psi(t_max) <= 0: lambda is at or above the admissible threshold for this "
            "direction, no ray crossing exists");

    // expand brackets geometrically from t_max, factor 10 per step, returning
    // the tight sign-change bracket. The far root scales like
    // (P / (lambda B))^{1/(r-p+1)}, which for r close to p-1 is enormous yet
    // still representable, so the walk is bounded only by the double range.
    auto expand = [&](double factor, const char* which) {
        double prev = out.t_max;
        double t = prev * factor;
        while (std::isfinite(t) && t > 0.0 && t < 1e295) {
            if (psi(f, par, t) < 0.0) return std::pair<double, double>{t, prev};
            prev = t;
            t *= factor;
        }
        throw convergence_error(std::string("bracket expansion for ") + which +
                                " left the representable range");
    };
    {
        const auto [neg, pos] = expand(0.1, "t1");
        out.t1 = detail::bisect_psi(f, par, neg, pos);
    }
    if (f.b_integral > 0.0) {
        out.kind = FiberCase::TwoRoots;
        const auto [neg, pos] = expand(10.0, "t2");
        out.t2 = detail::bisect_psi(f, par, neg, pos);
    } else {
        out.kind = FiberCase::OneRoot;
    }
    return out;
}

enum class NehariClass { Plus, Minus, Zero, Off };

inline const char* to_string(NehariClass c) {
    switch (c) {
        case NehariClass::Plus: return "plus";
        case NehariClass::Minus: return "minus";
        case NehariClass::Zero: return "zero";
        default: return "off";
    }
}

// Manifold membership is |P - A - lambda B| <= 1e-8 P; on the manifold the
// branch is the sign of D = (p-1+q) P - lambda (r+q) B (which equals
// phi''(1) there), with a Zero band of 1e-10 P.
inline NehariClass nehari_classify(const FunctionalTriple& f, const ProblemParams& par) {
    const double P = f.seminorm_p;
    if (std::abs(P - f.a_integral - par.lambda * f.b_integral) > 1e-8 * P) return NehariClass::Off;
    const double d = (par.p - 1.0 + par.q) * P - par.lambda * (par.r + par.q) * f.b_integral;
    const double band = 1e-10 * P;
    if (d > band) return NehariClass::Plus;
    if (d < -band) return NehariClass::Minus;
    return NehariClass::Zero;
}

// Coercivity minorant on the manifold: J(w) >= rho(||w||) with
// rho(t) = alpha t^p - beta t^{1-q}, minimised at t_min with value rho_min.
struct CoercivityBound {
    double p = 0.0;
    double q = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double t_min = 0.0;
    double rho_min = 0.0;

    double rho(double t) const {
        return alpha * std::pow(t, p) - beta * std::pow(t, 1.0 - q);
    }
};

inline CoercivityBound coercivity_bound(const ProblemParams& par, double norm_a,
                                        double sobolev_s) {
    if (!(norm_a > 0.0 && sobolev_s > 0.0))
        throw config_error("coercivity bound requires positive norm_a and S");
    CoercivityBound c;
    c.p = par.p;
    c.q = par.q;
    c.alpha = 1.0 / par.p - 1.0 / (par.r + 1.0);
    c.beta = (1.0 / (1.0 - par.q) - 1.0 / (par.r + 1.0)) * norm_a *
             std::pow(sobolev_s, -(1.0 - par.q) / par.p);
    const double pm1q = par.p - 1.0 + par.q;
    c.t_min = std::pow(c.beta * (1.0 - par.q) / (par.p * c.alpha), 1.0 / pm1q);
    c.rho_min = -(pm1q / par.p) * std::pow(c.beta, par.p / pm1q) *
                std::pow((1.0 - par.q) / (par.p * c.alpha), (1.0 - par.q) / pm1q);
    return c;
}

}
