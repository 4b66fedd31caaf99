#pragma once

#include <cmath>

#include "errors.hpp"
#include "functionals.hpp"
#include "grid.hpp"
#include "params.hpp"

namespace nehari {

// Closed-form constants of the two-solution theory. Exponents like
// (r-p+1)/(p-1+q) amplify rounding when r-p+1 is small, so everything here
// is evaluated in long double and rounded once at the end; the consistency
// identities (E(Lambda) = 0, A_Lambda = A_0) then hold far inside the 1e-12
// relative target.

namespace detail {

struct ThresholdExponents {
    long double p, q, r, pm1q, rq, rp1;
    explicit ThresholdExponents(const ProblemParams& par)
        : p(par.p),
          q(par.q),
          r(par.r),
          pm1q(p - 1.0L + q),
          rq(r + q),
          rp1(r - p + 1.0L) {}
};

inline void require_positive_inputs(const WeightNorms& norms, double sobolev_s) {
    if (!(norms.norm_a > 0.0 && norms.norm_b > 0.0))
        throw config_error("threshold constants require positive weight norms");
    if (!(sobolev_s > 0.0)) throw config_error("threshold constants require S > 0");
}

}  // namespace detail

// Extremal lambda below which both branch solutions exist:
// Lambda = ((p-1+q)/(r+q)) ((r-p+1)/(r+q))^{(r-p+1)/(p-1+q)}
//          * (1/||b||) * (S^{(r+q)} / ||a||^{r-p+1})^{1/(p-1+q)}.
inline double lambda_star(const ProblemParams& par, const WeightNorms& norms, double sobolev_s) {
    par.validate(false);
    detail::require_positive_inputs(norms, sobolev_s);
    const detail::ThresholdExponents e(par);
    const long double v = (e.pm1q / e.rq) * std::pow(e.rp1 / e.rq, e.rp1 / e.pm1q) /
                          static_cast<long double>(norms.norm_b) *
                          std::pow(static_cast<long double>(sobolev_s), e.rq / e.pm1q) /
                          std::pow(static_cast<long double>(norms.norm_a), e.rp1 / e.pm1q);
    return static_cast<double>(v);
}

// E(lambda): affine and strictly decreasing in lambda, positive exactly for
// lambda < Lambda, zero at Lambda. The positive part lower-bounds
// psi_w(t_max) / ||w||^{r+1} uniformly over directions.
inline double e_lambda(double lambda, const ProblemParams& par, const WeightNorms& norms,
                       double sobolev_s) {
    par.validate(false);
    detail::require_positive_inputs(norms, sobolev_s);
    if (!(lambda >= 0.0)) throw config_error("e_lambda requires lambda >= 0");
    const detail::ThresholdExponents e(par);
    const long double root_s = std::pow(static_cast<long double>(sobolev_s), 1.0L / e.p);
    const long double k1 = (e.pm1q / e.rq) * std::pow(e.rp1 / e.rq, e.rp1 / e.pm1q);
    const long double first =
        k1 * std::pow(std::pow(root_s, 1.0L - e.q) / static_cast<long double>(norms.norm_a),
                      e.rp1 / e.pm1q);
    const long double second = static_cast<long double>(lambda) *
                               static_cast<long double>(norms.norm_b) *
                               std::pow(root_s, -(e.r + 1.0L));
    return static_cast<double>(first - second);
}

// Norm gap radii: every minus-branch point has ||W|| > A_lambda and every
// plus-branch point has ||w|| < A_0; A_lambda > A_0 exactly for
// lambda < Lambda, with equality at Lambda.
struct GapRadii {
    double a_lambda = 0.0;
    double a_zero = 0.0;
};

inline GapRadii gap_radii(double lambda, const ProblemParams& par, const WeightNorms& norms,
                          double sobolev_s) {
    par.validate(false);
    detail::require_positive_inputs(norms, sobolev_s);
    if (!(lambda > 0.0)) throw config_error("gap radii require lambda > 0");
    const detail::ThresholdExponents e(par);
    const long double root_s = std::pow(static_cast<long double>(sobolev_s), 1.0L / e.p);
    GapRadii g;
    g.a_lambda = static_cast<double>(
        std::pow(e.pm1q / (static_cast<long double>(lambda) * e.rq *
                           static_cast<long double>(norms.norm_b)) *
                     std::pow(root_s, e.r + 1.0L),
                 1.0L / e.rp1));
    g.a_zero = static_cast<double>(
        std::pow(e.rq / e.rp1 * static_cast<long double>(norms.norm_a) *
                     std::pow(root_s, -(1.0L - e.q)),
                 1.0L / e.pm1q));
    return g;
}

// Prefactor of the near-degenerate blow-up bound at r = p-1+eps:
// C_eps = (1 + (p-1+q)/eps)^{1/(p-1+q)} ||a||^{1/(p-1+q)} S^{-(1-q)/(p(p-1+q))},
// so that the minus-branch norm exceeds C_eps (Lambda/lambda)^{1/eps}.
inline double blowup_constant(double eps, const ProblemParams& par, double norm_a,
                              double sobolev_s) {
    if (!(eps > 0.0)) throw config_error("blowup constant requires eps > 0");
    if (!(par.p - 1.0 + eps < par.p_star() - 1.0))
        throw config_error("blowup constant requires eps < p_star - p");
    if (!(norm_a > 0.0 && sobolev_s > 0.0))
        throw config_error("blowup constant requires positive norm_a and S");
    const long double p = par.p, q = par.q;
    const long double pm1q = p - 1.0L + q;
    const long double v = std::pow(1.0L + pm1q / static_cast<long double>(eps), 1.0L / pm1q) *
                          std::pow(static_cast<long double>(norm_a), 1.0L / pm1q) *
                          std::pow(static_cast<long double>(sobolev_s),
                                   -(1.0L - q) / (p * pm1q));
    return static_cast<double>(v);
}

// Normalisation u = mu w with mu = lambda^{1/(r-p+1)} moves lambda from the
// superlinear term onto the singular one, whose coefficient becomes
// lambda^{(p-1+q)/(r-p+1)}; residuals scale by mu^{p-1} nodewise.
struct LambdaNormalization {
    GridFunction u;
    double mu = 0.0;
    double a_coefficient = 0.0;
    double mu_exponent = 0.0;
    double a_coefficient_exponent = 0.0;
};

inline LambdaNormalization q_lambda_transform(const GridFunction& w, double lambda,
                                              const ProblemParams& par) {
    par.validate(false);
    if (!(lambda > 0.0)) throw config_error("lambda normalisation requires lambda > 0");
    LambdaNormalization out;
    out.mu_exponent = 1.0 / (par.r - par.p + 1.0);
    out.a_coefficient_exponent = (par.p - 1.0 + par.q) / (par.r - par.p + 1.0);
    out.mu = std::pow(lambda, out.mu_exponent);
    out.a_coefficient = std::pow(lambda, out.a_coefficient_exponent);
    out.u = GridFunction{w.grid, w.values};
    for (double& v : out.u.values) v *= out.mu;
    return out;
}

}
