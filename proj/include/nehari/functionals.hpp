#pragma once

#include <cmath>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "params.hpp"
#include "summation.hpp"
#include "weights.hpp"

namespace nehari {

// Integral of the kernel |x-y|^{-(1+ps)} over the exterior R \ (-1,1):
// (1/ps) * ((1+x)^{-ps} + (1-x)^{-ps}).
inline double exterior_kernel_weight(double x, double ps) {
    if (!(ps > 0.0 && ps < 1.0)) throw config_error("exterior kernel requires 0 < p*s < 1");
    if (!(x > -1.0 && x < 1.0)) throw config_error("exterior kernel requires |x| < 1");
    return (std::pow(1.0 + x, -ps) + std::pow(1.0 - x, -ps)) / ps;
}

namespace detail {

// Precomputed pieces of the discrete Gagliardo form on a uniform grid. The
// pair kernel depends on |i-j| only: kern[d] = h^2 (d h)^{-(1+ps)}.
struct KernelTable {
    double h = 0.0;
    double p = 2.0;
    bool p_is_two = true;
    std::vector<double> kern;   // index by |i-j|, entry 0 unused
    std::vector<double> kappa;  // exterior weight at each node
};

inline KernelTable make_kernel_table(const Grid& g, const ProblemParams& par) {
    KernelTable t;
    t.h = g.h;
    t.p = par.p;
    t.p_is_two = par.p == 2.0;
    const double ps = par.ps();
    t.kern.resize(g.num_nodes);
    for (int d = 1; d < g.num_nodes; ++d)
        t.kern[d] = g.h * g.h * std::pow(d * g.h, -(1.0 + ps));
    t.kappa.resize(g.num_nodes);
    for (int i = 0; i < g.num_nodes; ++i)
        t.kappa[i] = exterior_kernel_weight(g.nodes[i], ps);
    return t;
}

inline double abs_pow(const KernelTable& t, double d) {
    return t.p_is_two ? d * d : std::pow(std::abs(d), t.p);
}

// |d|^{p-2} d, with the 0^{negative} pitfall for p < 2 removed at d = 0
inline double signed_pow(const KernelTable& t, double d) {
    if (t.p_is_two) return d;
    if (d == 0.0) return 0.0;
    const double m = std::pow(std::abs(d), t.p - 1.0);
    return d > 0.0 ? m : -m;
}

}  // namespace detail

// ||w||_h^p: the double collocation sum over distinct node pairs plus the
// analytic exterior contribution, counted once for each of Omega x COmega
// and COmega x Omega (hence the factor 2). Exactly p-homogeneous.
inline double seminorm_p(const GridFunction& w, const ProblemParams& par, int threads = 1) {
    const Grid& g = *w.grid;
    const int n = g.num_nodes;
    const detail::KernelTable t = detail::make_kernel_table(g, par);
    std::vector<double> row(n);
    parallel_rows(n, threads, [&](int i) {
        const double wi = w.values[i];
        CompensatedSum acc;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            acc.add(t.kern[std::abs(i - j)] * detail::abs_pow(t, wi - w.values[j]));
        }
        acc.add(2.0 * t.h * detail::abs_pow(t, wi) * t.kappa[i]);
        row[i] = acc.value();
    });
    CompensatedSum total;
    for (int i = 0; i < n; ++i) total.add(row[i]);
    return total.value();
}

// Gradient of (1/p)||w||_h^p with respect to the nodal values:
//   2 Sum_{j != i} h^2 |w_i-w_j|^{p-2}(w_i-w_j) |x_i-x_j|^{-(1+ps)}
//   + 2 h |w_i|^{p-2} w_i kappa_ext(x_i).
inline std::vector<double> seminorm_gradient(const GridFunction& w, const ProblemParams& par,
                                             int threads = 1) {
    const Grid& g = *w.grid;
    const int n = g.num_nodes;
    const detail::KernelTable t = detail::make_kernel_table(g, par);
    std::vector<double> grad(n);
    parallel_rows(n, threads, [&](int i) {
        const double wi = w.values[i];
        CompensatedSum acc;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            acc.add(2.0 * t.kern[std::abs(i - j)] * detail::signed_pow(t, wi - w.values[j]));
        }
        acc.add(2.0 * t.h * detail::signed_pow(t, wi) * t.kappa[i]);
        grad[i] = acc.value();
    });
    return grad;
}

// The three scalars every fiber-map question reduces to.
struct FunctionalTriple {
    double seminorm_p = 0.0;  // ||w||_h^p
    double a_integral = 0.0;  // Sum h a_i (w_i)_+^{1-q}
    double b_integral = 0.0;  // Sum h b_i (w_i)_+^{r+1}
};

inline FunctionalTriple functional_triple(const GridFunction& w, const WeightPair& wt,
                                          const ProblemParams& par, int threads = 1) {
    FunctionalTriple f;
    f.seminorm_p = seminorm_p(w, par, threads);
    const double h = w.grid->h;
    CompensatedSum a_acc, b_acc;
    for (int i = 0; i < w.size(); ++i) {
        const double wp = std::max(w.values[i], 0.0);
        a_acc.add(h * wt.a.values[i] * std::pow(wp, 1.0 - par.q));
        b_acc.add(h * wt.b.values[i] * std::pow(wp, par.r + 1.0));
    }
    f.a_integral = a_acc.value();
    f.b_integral = b_acc.value();
    return f;
}

// J_lambda(w) = (1/p)||w||^p - (1/(1-q)) A - (lambda/(r+1)) B
inline double energy(const FunctionalTriple& f, const ProblemParams& par) {
    return f.seminorm_p / par.p - f.a_integral / (1.0 - par.q) -
           par.lambda * f.b_integral / (par.r + 1.0);
}

inline double energy(const GridFunction& w, const WeightPair& wt, const ProblemParams& par,
                     int threads = 1) {
    return energy(functional_triple(w, wt, par, threads), par);
}

// Gradient of the energy. The singular term is floored at
// delta = 1e-8 * max(1, ||w||_inf); nodes with w_i <= 0 feel neither the
// singular nor the superlinear force (both act on the positive part only).
struct FirstVariation {
    std::vector<double> gradient;
    double delta = 0.0;     // floor actually used
    int floored_nodes = 0;  // nodes with w_i < delta, sign included
};

inline FirstVariation first_variation(const GridFunction& w, const WeightPair& wt,
                                      const ProblemParams& par, int threads = 1) {
    FirstVariation out;
    double winf = 0.0;
    for (double v : w.values) winf = std::max(winf, std::abs(v));
    out.delta = 1e-8 * std::max(1.0, winf);
    for (double v : w.values)
        if (v < out.delta) ++out.floored_nodes;

    out.gradient = seminorm_gradient(w, par, threads);
    const double h = w.grid->h;
    for (int i = 0; i < w.size(); ++i) {
        const double wi = w.values[i];
        if (wi > 0.0) {
            out.gradient[i] -= h * wt.a.values[i] * std::pow(std::max(wi, out.delta), -par.q);
            out.gradient[i] -= par.lambda * h * wt.b.values[i] * std::pow(wi, par.r);
        }
    }
    return out;
}

// Discrete duality pairing <g, v>: the plain dot product, so pairing with the
// first variation is exactly the directional derivative of the energy.
inline double pairing(const std::vector<double>& gradient, const GridFunction& v) {
    CompensatedSum acc;
    for (size_t i = 0; i < gradient.size(); ++i) acc.add(gradient[i] * v.values[i]);
    return acc.value();
}

// Weight norms in the exponents conjugate to the critical embedding:
// m_a = p*/(p*-1+q), m_b = p*/(p*-1-r).
struct WeightNorms {
    double m_a = 0.0;
    double m_b = 0.0;
    double norm_a = 0.0;
    double norm_b = 0.0;
};

inline WeightNorms weight_norms(const WeightPair& wt, const ProblemParams& par) {
    const double pstar = par.p_star();
    WeightNorms n;
    n.m_a = pstar / (pstar - 1.0 + par.q);
    n.m_b = pstar / (pstar - 1.0 - par.r);
    if (!(n.m_b > 0.0)) throw config_error("weight norm m_b requires r < p_star - 1");
    n.norm_a = lp_weighted_norm(wt.a, n.m_a);
    n.norm_b = lp_weighted_norm(wt.b, n.m_b);
    return n;
}

// (Sum h |w_i|^{p*})^{1/p*}
inline double critical_norm(const GridFunction& w, const ProblemParams& par) {
    return lp_weighted_norm(w, par.p_star());
}

}
