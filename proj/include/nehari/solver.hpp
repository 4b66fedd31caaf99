#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "fiber.hpp"
#include "functionals.hpp"
#include "grid.hpp"
#include "params.hpp"
#include "summation.hpp"
#include "thresholds.hpp"
#include "weights.hpp"

namespace nehari {

enum class Branch { Plus, Minus };

inline const char* to_string(Branch b) { return b == Branch::Plus ? "plus" : "minus"; }

struct SolveConfig {
    int max_iters = 20000;
    double step0 = 0.25;         // first relative step along the descent direction
    double armijo_shrink = 0.5;  // backtracking factor
    double armijo_c = 1e-4;      // sufficient-decrease constant
    double grad_tol = 1e-8;      // tangential residual tolerance
    std::uint64_t seed = 42;
    int num_starts = 4;
};

// A point t*w on the chosen branch together with the homogeneity-scaled
// triple (t^p P, t^{1-q} A, t^{r+1} B) of the direction it came from.
struct ProjectedPoint {
    double t = 0.0;
    GridFunction w;
    FunctionalTriple triple;
};

// True when the ray of this triple crosses the requested branch: positive
// direction content, psi(t_max) > 0, and B > 0 when the minus root is wanted.
inline bool projectable(const FunctionalTriple& f, Branch br, const ProblemParams& par) {
    if (!(f.seminorm_p > 0.0) || !(f.a_integral > 0.0)) return false;
    if (br == Branch::Minus && !(f.b_integral > 0.0)) return false;
    return psi(f, par, t_max(f, par)) > 0.0;
}

inline ProjectedPoint project_with_triple(const FunctionalTriple& f, const GridFunction& dir,
                                          Branch br, const ProblemParams& par) {
    if (br == Branch::Minus && !(f.b_integral > 0.0))
        throw infeasible_error("minus-branch projection requires b-integral > 0");
    const FiberRoots roots = fiber_roots(f, par);
    ProjectedPoint out;
    out.t = br == Branch::Plus ? roots.t1 : roots.t2;
    out.w = GridFunction{dir.grid, dir.values};
    for (double& v : out.w.values) v *= out.t;
    out.triple.seminorm_p = std::pow(out.t, par.p) * f.seminorm_p;
    out.triple.a_integral = std::pow(out.t, 1.0 - par.q) * f.a_integral;
    out.triple.b_integral = std::pow(out.t, par.r + 1.0) * f.b_integral;
    return out;
}

inline ProjectedPoint project_to_nehari(const GridFunction& w, Branch br, const WeightPair& wt,
                                        const ProblemParams& par, int threads = 1) {
    return project_with_triple(functional_triple(w, wt, par, threads), w, br, par);
}

struct SolutionReport {
    Branch branch = Branch::Plus;
    GridFunction w;
    FunctionalTriple triple;
    double energy = 0.0;
    double residual = 0.0;       // tangential gradient norm / ||w||^{p-1}
    double residual_full = 0.0;  // full gradient norm / ||w||^{p-1}
    int iterations = 0;
    bool converged = false;
    int floor_violations = 0;  // nodes below the singularity floor
    double delta = 0.0;        // floor at the solution
    int start_index = 0;
    double min_projected_energy = 0.0;  // lowest energy seen on the manifold, all starts
    std::vector<double> energy_trace;   // accepted energies of the winning start
};

// Full residual ||grad J||_2 / ||w||^{p-1}; on the manifold the ray component
// of the gradient vanishes by the Nehari identity, so for converged solutions
// this tracks the tangential residual.
struct ResidualInfo {
    double value = 0.0;
    double delta = 0.0;
    int floored_nodes = 0;
};

inline ResidualInfo residual_norm(const GridFunction& w, const WeightPair& wt,
                                  const ProblemParams& par, int threads = 1) {
    const FirstVariation fv = first_variation(w, wt, par, threads);
    CompensatedSum g2;
    for (double v : fv.gradient) g2.add(v * v);
    const double P = seminorm_p(w, par, threads);
    const double denom = P > 0.0 ? std::pow(P, (par.p - 1.0) / par.p) : 1.0;
    return ResidualInfo{std::sqrt(g2.value()) / denom, fv.delta, fv.floored_nodes};
}

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
    // top 53 bits; the standard library distributions are not pinned across
    // implementations, the raw generator is
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Mixture of three positive bumps with random centers, widths, amplitudes.
inline GridFunction random_bump_mixture(const Grid& g, std::mt19937_64& rng) {
    GridFunction f{&g, std::vector<double>(g.num_nodes, 0.0)};
    for (int b = 0; b < 3; ++b) {
        const double c = -0.8 + 1.6 * uniform01(rng);
        const double width = 0.05 + 0.30 * uniform01(rng);
        const double amp = 0.5 + uniform01(rng);
        for (int i = 0; i < g.num_nodes; ++i) {
            const double z = (g.nodes[i] - c) / width;
            f.values[i] += amp * std::exp(-z * z);
        }
    }
    return f;
}

struct TangentialState {
    std::vector<double> gt;
    double gt_norm2 = 0.0;
    double residual = 0.0;
    double delta = 0.0;
    int floored = 0;
};

inline TangentialState tangential_gradient(const ProjectedPoint& cur, const WeightPair& wt,
                                           const ProblemParams& par, int threads) {
    const FirstVariation fv = first_variation(cur.w, wt, par, threads);
    const int n = cur.w.size();
    CompensatedSum gw, ww;
    for (int i = 0; i < n; ++i) {
        gw.add(fv.gradient[i] * cur.w.values[i]);
        ww.add(cur.w.values[i] * cur.w.values[i]);
    }
    const double coef = ww.value() > 0.0 ? gw.value() / ww.value() : 0.0;
    TangentialState st;
    st.gt.resize(n);
    CompensatedSum g2;
    for (int i = 0; i < n; ++i) {
        st.gt[i] = fv.gradient[i] - coef * cur.w.values[i];
        g2.add(st.gt[i] * st.gt[i]);
    }
    st.gt_norm2 = g2.value();
    st.residual = std::sqrt(st.gt_norm2) /
                  std::pow(cur.triple.seminorm_p, (par.p - 1.0) / par.p);
    st.delta = fv.delta;
    st.floored = fv.floored_nodes;
    return st;
}

struct StartOutcome {
    ProjectedPoint cur;
    double energy = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    double min_energy = 0.0;
    std::vector<double> trace;
};

// One projection attempt for a line-search trial. Returns false when the
// trial direction misses the branch or the bracket expansion gives up.
inline bool try_project(const GridFunction& trial, Branch br, const WeightPair& wt,
                        const ProblemParams& par, int threads, ProjectedPoint& out) {
    const FunctionalTriple f = functional_triple(trial, wt, par, threads);
    if (!projectable(f, br, par)) return false;
    try {
        out = project_with_triple(f, trial, br, par);
    } catch (const convergence_error&) {
        return false;
    }
    return true;
}

// Dense LU with partial pivoting, solving A x = b in place (b becomes x).
// Serial on purpose: the polish must be bit-identical for any thread count.
inline bool lu_solve(std::vector<double>& A, std::vector<double>& b, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(A[static_cast<std::size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            const double v = std::abs(A[static_cast<std::size_t>(r) * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (!(best > 0.0)) return false;
        if (piv != col) {
            for (int c = col; c < n; ++c)
                std::swap(A[static_cast<std::size_t>(col) * n + c],
                          A[static_cast<std::size_t>(piv) * n + c]);
            std::swap(b[col], b[piv]);
        }
        const double d = A[static_cast<std::size_t>(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double f = A[static_cast<std::size_t>(r) * n + col] / d;
            if (f == 0.0) continue;
            for (int c = col + 1; c < n; ++c)
                A[static_cast<std::size_t>(r) * n + c] -=
                    f * A[static_cast<std::size_t>(col) * n + c];
            b[r] -= f * b[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A[static_cast<std::size_t>(r) * n + c] * b[c];
        b[r] = s / A[static_cast<std::size_t>(r) * n + r];
    }
    return true;
}

// Jacobian of the first variation at a strictly positive w (p >= 2 only:
// |d|^{p-2} stays bounded). Row-major n x n.
inline std::vector<double> first_variation_jacobian(const GridFunction& w, const WeightPair& wt,
                                                    const ProblemParams& par, double delta) {
    const Grid& g = *w.grid;
    const int n = g.num_nodes;
    const KernelTable tab = make_kernel_table(g, par);
    const double pm1 = par.p - 1.0;
    auto hfac = [&](double d) {
        return tab.p_is_two ? 1.0 : std::pow(std::abs(d), par.p - 2.0);
    };
    std::vector<double> H(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double wi = w.values[i];
        double diag = 2.0 * pm1 * tab.h * tab.kappa[i] * hfac(wi);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double cpl =
                2.0 * pm1 * tab.kern[std::abs(i - j)] * hfac(wi - w.values[j]);
            H[static_cast<std::size_t>(i) * n + j] = -cpl;
            diag += cpl;
        }
        if (wi > delta)
            diag += par.q * tab.h * wt.a.values[i] * std::pow(wi, -par.q - 1.0);
        if (wi > 0.0)
            diag -= par.lambda * par.r * tab.h * wt.b.values[i] * std::pow(wi, par.r - 1.0);
        H[static_cast<std::size_t>(i) * n + i] = diag;
    }
    return H;
}

// Damped Newton on the full first-order system g(w) = 0, entered once the
// projected descent is inside the basin. Steps are accepted only while the
// gradient norm strictly decreases and w stays nodewise positive; if the
// endpoint no longer classifies on the requested branch the polish is
// discarded. Quadratic convergence takes the residual far below what any
// energy-based line search can certify in double precision.
inline void newton_polish(StartOutcome& o, TangentialState& st, Branch br, const WeightPair& wt,
                          const ProblemParams& par, int threads, double grad_tol) {
    const int n = o.cur.w.size();
    const ProjectedPoint snapshot = o.cur;
    const double snap_energy = o.energy;

    const double pfac = (par.p - 1.0) / par.p;
    const double target = std::max(1e-14, 1e-3 * grad_tol);
    bool moved = false;
    for (int step = 0; step < 30; ++step) {
        const FirstVariation fv = first_variation(o.cur.w, wt, par, threads);
        CompensatedSum g2c;
        for (double v : fv.gradient) g2c.add(v * v);
        const double g2 = g2c.value();
        if (std::sqrt(g2) / std::pow(o.cur.triple.seminorm_p, pfac) <= target) break;

        std::vector<double> H = first_variation_jacobian(o.cur.w, wt, par, fv.delta);
        std::vector<double> step_w(fv.gradient);
        for (double& v : step_w) v = -v;
        if (!lu_solve(H, step_w, n)) break;

        bool accepted = false;
        double s = 1.0;
        GridFunction cand{o.cur.w.grid, std::vector<double>(n)};
        for (int k = 0; k < 12; ++k) {
            bool positive = true;
            for (int i = 0; i < n; ++i) {
                cand.values[i] = o.cur.w.values[i] + s * step_w[i];
                if (!(cand.values[i] > 0.0)) {
                    positive = false;
                    break;
                }
            }
            if (positive) {
                const FirstVariation fv_new = first_variation(cand, wt, par, threads);
                CompensatedSum gn;
                for (double v : fv_new.gradient) gn.add(v * v);
                if (gn.value() < g2) {
                    o.cur.w.values = cand.values;
                    o.cur.t = 1.0;
                    o.cur.triple = functional_triple(o.cur.w, wt, par, threads);
                    accepted = true;
                    moved = true;
                    break;
                }
            }
            s *= 0.5;
        }
        if (!accepted) break;
    }

    if (moved) {
        const NehariClass want = br == Branch::Plus ? NehariClass::Plus : NehariClass::Minus;
        if (nehari_classify(o.cur.triple, par) != want) {
            o.cur = snapshot;
            o.energy = snap_energy;
        } else {
            o.energy = energy(o.cur.triple, par);
            o.trace.push_back(o.energy);
            o.min_energy = std::min(o.min_energy, o.energy);
        }
        st = tangential_gradient(o.cur, wt, par, threads);
    }
}

// Projected descent on one branch from one start: remove the ray component
// of the gradient, backtrack on J(project(w - alpha gt)), and stop at the
// requested tangential residual. Two wrinkles keep the final accuracy honest
// in double precision. First, once the Armijo decrease falls below what the
// energy evaluation can certify (about 1e-16 relative), the acceptance test
// switches to a strict decrease of the tangential residual, which comes from
// fresh gradients and resolves far smaller changes. Second, for p >= 2 the
// descent hands over to newton_polish once inside the basin. Every
// successful projection is logged for the coercivity floor check.
inline StartOutcome run_start(const GridFunction& start, Branch br, const WeightPair& wt,
                              const ProblemParams& par, const SolveConfig& cfg, int threads) {
    StartOutcome o;
    o.cur = project_to_nehari(start, br, wt, par, threads);
    o.energy = energy(o.cur.triple, par);
    o.min_energy = o.energy;
    o.trace.push_back(o.energy);

    TangentialState st = tangential_gradient(o.cur, wt, par, threads);
    double prev_alpha = -1.0;
    int used = 0;

    const auto descend = [&](double stop_tol, int budget) {
        GridFunction trial{o.cur.w.grid, std::vector<double>(o.cur.w.size())};
        ProjectedPoint next;
        for (int k = 0; k < budget; ++k) {
            if (st.residual <= stop_tol) return;
            ++used;

            double alpha0;
            if (prev_alpha > 0.0) {
                alpha0 = prev_alpha * 2.0;
            } else {
                CompensatedSum w2;
                for (double v : o.cur.w.values) w2.add(v * v);
                alpha0 = cfg.step0 * std::sqrt(w2.value() / st.gt_norm2);
            }

            bool accepted = false;
            double alpha = alpha0;
            for (int bt = 0; bt < 80; ++bt) {
                for (int i = 0; i < trial.size(); ++i)
                    trial.values[i] = o.cur.w.values[i] - alpha * st.gt[i];
                if (try_project(trial, br, wt, par, threads, next)) {
                    const double e_next = energy(next.triple, par);
                    if (std::isfinite(e_next)) {
                        o.min_energy = std::min(o.min_energy, e_next);
                        if (e_next <= o.energy - cfg.armijo_c * alpha * st.gt_norm2) {
                            o.cur = std::move(next);
                            o.energy = e_next;
                            o.trace.push_back(e_next);
                            st = tangential_gradient(o.cur, wt, par, threads);
                            prev_alpha = alpha;
                            accepted = true;
                            break;
                        }
                    }
                }
                alpha *= cfg.armijo_shrink;
                if (!(alpha > 1e-18 * alpha0)) break;
            }

            if (!accepted) {
                // energy can no longer certify decrease; descend on the residual
                alpha = prev_alpha > 0.0 ? prev_alpha : alpha0;
                for (int bt = 0; bt < 40; ++bt) {
                    for (int i = 0; i < trial.size(); ++i)
                        trial.values[i] = o.cur.w.values[i] - alpha * st.gt[i];
                    if (try_project(trial, br, wt, par, threads, next)) {
                        const double e_next = energy(next.triple, par);
                        const TangentialState st_next =
                            tangential_gradient(next, wt, par, threads);
                        if (std::isfinite(e_next) &&
                            st_next.residual <= (1.0 - 1e-3) * st.residual) {
                            o.min_energy = std::min(o.min_energy, e_next);
                            o.cur = std::move(next);
                            o.energy = e_next;
                            o.trace.push_back(e_next);
                            st = st_next;
                            prev_alpha = alpha;
                            accepted = true;
                            break;
                        }
                    }
                    alpha *= cfg.armijo_shrink;
                    if (!(alpha > 0.0)) break;
                }
            }

            if (!accepted) return;  // stalled in both merit functions
        }
    };

    const bool can_polish = par.p >= 2.0 && o.cur.w.size() <= 2048;
    const double entry_tol = can_polish ? std::max(cfg.grad_tol, 1e-4) : cfg.grad_tol;
    descend(entry_tol, cfg.max_iters);
    if (can_polish && st.residual <= 1e-3)
        newton_polish(o, st, br, wt, par, threads, cfg.grad_tol);
    if (st.residual > cfg.grad_tol && used < cfg.max_iters)
        descend(cfg.grad_tol, cfg.max_iters - used);

    o.residual = st.residual;
    o.converged = st.residual <= cfg.grad_tol;
    o.iterations = used;
    return o;
}

}  // namespace detail

// Multi-start constrained minimisation over one branch. Starts are drawn
// up front from one seeded stream (minus-branch candidates rejection-sampled
// on B > 0, capped at 1000 attempts), each start is iterated independently,
// and the lowest final energy wins; ties within 1e-12 relative go to the
// lowest start index. Deterministic for a fixed config and seed; the thread
// count never changes any result bit.
inline SolutionReport minimize_branch(const Grid& g, const WeightPair& wt,
                                      const ProblemParams& par, Branch br,
                                      const SolveConfig& cfg, int threads = 1) {
    par.validate(true);
    if (cfg.num_starts < 1) throw config_error("solver requires num_starts >= 1");

    std::mt19937_64 rng(cfg.seed);
    std::vector<GridFunction> starts;
    starts.reserve(cfg.num_starts);
    int attempts = 0;
    while (static_cast<int>(starts.size()) < cfg.num_starts) {
        if (++attempts > 1000)
            throw convergence_error(
                "no admissible start for the minus branch after 1000 attempts (b-integral "
                "never positive)");
        GridFunction cand = detail::random_bump_mixture(g, rng);
        if (br == Branch::Minus &&
            !(functional_triple(cand, wt, par, threads).b_integral > 0.0))
            continue;
        starts.push_back(std::move(cand));
    }

    std::vector<detail::StartOutcome> outcomes;
    outcomes.reserve(starts.size());
    for (const GridFunction& s : starts)
        outcomes.push_back(detail::run_start(s, br, wt, par, cfg, threads));

    int best = 0;
    for (int k = 1; k < static_cast<int>(outcomes.size()); ++k) {
        const double eb = outcomes[best].energy;
        if (outcomes[k].energy < eb &&
            eb - outcomes[k].energy > 1e-12 * std::abs(eb))
            best = k;
    }

    double min_energy = outcomes[0].min_energy;
    for (const auto& o : outcomes) min_energy = std::min(min_energy, o.min_energy);

    detail::StartOutcome& win = outcomes[best];
    SolutionReport rep;
    rep.branch = br;
    rep.w = std::move(win.cur.w);
    rep.triple = win.cur.triple;
    rep.energy = win.energy;
    rep.residual = win.residual;
    rep.iterations = win.iterations;
    rep.converged = win.converged;
    rep.start_index = best;
    rep.min_projected_energy = min_energy;
    rep.energy_trace = std::move(win.trace);

    const ResidualInfo ri = residual_norm(rep.w, wt, par, threads);
    rep.residual_full = ri.value;
    rep.delta = ri.delta;
    rep.floor_violations = ri.floored_nodes;
    return rep;
}

// Norm-gap verification for a computed pair: the minus solution must sit
// outside the A_lambda sphere, the plus solution inside the A_0 sphere, with
// A_lambda > A_0 strictly between them.
struct GapReport {
    double norm_plus = 0.0;
    double norm_minus = 0.0;
    double a_lambda = 0.0;
    double a_zero = 0.0;
    bool ordering_ok = false;
    double energy_plus = 0.0;
    double energy_minus = 0.0;
};

inline GapReport verify_solution_pair(const SolutionReport& plus, const SolutionReport& minus,
                                      const ProblemParams& par, const WeightNorms& norms,
                                      double sobolev_s_used) {
    const GapRadii radii = gap_radii(par.lambda, par, norms, sobolev_s_used);
    GapReport g;
    g.norm_plus = std::pow(plus.triple.seminorm_p, 1.0 / par.p);
    g.norm_minus = std::pow(minus.triple.seminorm_p, 1.0 / par.p);
    g.a_lambda = radii.a_lambda;
    g.a_zero = radii.a_zero;
    g.energy_plus = plus.energy;
    g.energy_minus = minus.energy;
    g.ordering_ok = g.norm_minus > g.a_lambda && g.a_lambda > g.a_zero && g.a_zero > g.norm_plus;
    return g;
}

// Near-degenerate sweep r = p-1+eps at lambda = theta * Lambda(eps). Rows
// are fully independent: every row reseeds its own starts from the same
// config seed, so removing one row never changes another.
struct SweepRow {
    double epsilon = 0.0;
    double lambda = 0.0;
    double norm_w = 0.0;
    double c_eps = 0.0;
    double bound = 0.0;  // c_eps * (1/theta)^{1/eps}
    bool satisfied = false;
    bool converged = false;
};

inline std::vector<SweepRow> blowup_sweep(const Grid& g, const WeightPair& wt,
                                          const ProblemParams& base,
                                          const std::vector<double>& epsilons, double theta,
                                          double sobolev_s_used, const SolveConfig& cfg,
                                          int threads = 1) {
    if (!(theta > 0.0 && theta < 1.0)) throw config_error("sweep requires 0 < theta < 1");
    if (epsilons.empty()) throw config_error("sweep requires at least one eps");
    std::vector<SweepRow> rows;
    rows.reserve(epsilons.size());
    for (const double eps : epsilons) {
        ProblemParams par = base;
        par.r = par.p - 1.0 + eps;
        par.lambda = 0.0;
        par.validate(false);
        const WeightNorms norms = weight_norms(wt, par);
        par.lambda = theta * lambda_star(par, norms, sobolev_s_used);

        const SolutionReport minus = minimize_branch(g, wt, par, Branch::Minus, cfg, threads);

        SweepRow row;
        row.epsilon = eps;
        row.lambda = par.lambda;
        row.norm_w = std::pow(minus.triple.seminorm_p, 1.0 / par.p);
        row.c_eps = blowup_constant(eps, par, norms.norm_a, sobolev_s_used);
        row.bound = row.c_eps * std::pow(1.0 / theta, 1.0 / eps);
        row.satisfied = row.norm_w > row.bound;
        row.converged = minus.converged;
        rows.push_back(row);
    }
    return rows;
}

}
