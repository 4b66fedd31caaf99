#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "fiber.hpp"
#include "functionals.hpp"
#include "grid.hpp"
#include "json_writer.hpp"
#include "params.hpp"
#include "sobolev.hpp"
#include "solver.hpp"
#include "thresholds.hpp"
#include "version.hpp"
#include "weights.hpp"

namespace nehari {

// Everything the commands share: grid, weights, weight norms, the embedding
// constant actually used in inequalities, and the resolved lambda. The grid
// lives behind a stable pointer because grid functions point back into it.
struct RunContext {
    std::unique_ptr<Grid> grid;
    WeightPair weights;
    WeightNorms norms;
    SobolevEstimate sobolev;
    bool sobolev_overridden = false;
    double s_used = 0.0;
    double lambda_star_h = 0.0;
    double lambda = 0.0;
};

inline RunContext make_context(const RunConfig& cfg, int threads) {
    cfg.params.validate(false);
    RunContext ctx;
    ctx.grid = std::make_unique<Grid>(build_grid(cfg.num_nodes));
    ctx.weights = make_weights(*ctx.grid, cfg.weight_a, cfg.weight_b);
    ctx.norms = weight_norms(ctx.weights, cfg.params);
    if (cfg.s_override) {
        ctx.sobolev.s_value = *cfg.s_override;
        ctx.sobolev.margin = cfg.sobolev.margin;
        ctx.sobolev.converged = true;
        ctx.sobolev_overridden = true;
    } else {
        ctx.sobolev = sobolev_estimate(*ctx.grid, cfg.params, cfg.sobolev, threads);
    }
    ctx.s_used = ctx.sobolev.effective();
    ctx.lambda_star_h = lambda_star(cfg.params, ctx.norms, ctx.s_used);
    ctx.lambda = cfg.lambda_policy == "fraction" ? cfg.lambda_value * ctx.lambda_star_h
                                                 : cfg.lambda_value;
    return ctx;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw config_error("cannot write output file: " + (dir / name).string());
    return f;
}

inline void embed_header(JsonWriter& jw, const RunConfig& cfg, const RunContext& ctx) {
    jw.kv("version", version);
    jw.key("config").begin_object();
    for (const auto& [k, v] : cfg.resolved()) jw.kv(k, v);
    jw.end_object();
    jw.key("grid").begin_object();
    jw.kv("num_nodes", ctx.grid->num_nodes);
    jw.kv("h", ctx.grid->h);
    jw.end_object();
    jw.key("sobolev").begin_object();
    jw.kv("s_value", ctx.sobolev.s_value);
    jw.kv("margin", ctx.sobolev.margin);
    jw.kv("s_used", ctx.s_used);
    jw.kv("overridden", ctx.sobolev_overridden);
    jw.kv("converged", ctx.sobolev.converged);
    jw.kv("iterations", ctx.sobolev.iterations);
    jw.end_object();
}

inline void embed_norms(JsonWriter& jw, const WeightNorms& norms) {
    jw.key("norms").begin_object();
    jw.kv("m_a", norms.m_a);
    jw.kv("m_b", norms.m_b);
    jw.kv("norm_a", norms.norm_a);
    jw.kv("norm_b", norms.norm_b);
    jw.end_object();
}

inline void embed_solution(JsonWriter& jw, const char* name, const SolutionReport& rep,
                           const ProblemParams& par) {
    jw.key(name).begin_object();
    jw.kv("branch", to_string(rep.branch));
    jw.kv("energy", rep.energy);
    jw.kv("norm", std::pow(rep.triple.seminorm_p, 1.0 / par.p));
    jw.kv("residual", rep.residual);
    jw.kv("residual_full", rep.residual_full);
    jw.kv("iterations", rep.iterations);
    jw.kv("converged", rep.converged);
    jw.kv("start_index", rep.start_index);
    jw.kv("floor_violations", rep.floor_violations);
    jw.kv("delta", rep.delta);
    jw.kv("min_projected_energy", rep.min_projected_energy);
    jw.key("triple").begin_object();
    jw.kv("seminorm_p", rep.triple.seminorm_p);
    jw.kv("a_integral", rep.triple.a_integral);
    jw.kv("b_integral", rep.triple.b_integral);
    jw.end_object();
    jw.kv("nehari_class", to_string(nehari_classify(rep.triple, par)));
    jw.end_object();
}

}  // namespace detail

// Threshold constants of the configured problem: the existence threshold,
// the extremal slack at the resolved lambda, the norm-gap radii, the
// coercivity minorant, and the lambda-normalisation exponents.
inline int cmd_thresholds(const RunConfig& cfg, const std::string& out_dir, int threads) {
    const RunContext ctx = make_context(cfg, threads);
    std::ofstream f = detail::open_output(out_dir, "thresholds.json");
    JsonWriter jw(f);
    jw.begin_object();
    detail::embed_header(jw, cfg, ctx);
    detail::embed_norms(jw, ctx.norms);
    jw.kv("lambda_star", ctx.lambda_star_h);
    jw.kv("lambda", ctx.lambda);
    jw.kv("in_theorem_range", ctx.lambda > 0.0 && ctx.lambda < ctx.lambda_star_h);
    jw.kv("e_lambda", e_lambda(ctx.lambda, cfg.params, ctx.norms, ctx.s_used));
    const GapRadii radii = gap_radii(ctx.lambda, cfg.params, ctx.norms, ctx.s_used);
    jw.key("gap").begin_object();
    jw.kv("a_lambda", radii.a_lambda);
    jw.kv("a_zero", radii.a_zero);
    jw.end_object();
    const CoercivityBound cb = coercivity_bound(cfg.params, ctx.norms.norm_a, ctx.s_used);
    jw.key("coercivity").begin_object();
    jw.kv("alpha", cb.alpha);
    jw.kv("beta", cb.beta);
    jw.kv("t_min", cb.t_min);
    jw.kv("rho_min", cb.rho_min);
    jw.end_object();
    const double rp1 = cfg.params.r - cfg.params.p + 1.0;
    jw.key("lambda_normalization").begin_object();
    jw.kv("mu_exponent", 1.0 / rp1);
    jw.kv("a_coefficient_exponent", (cfg.params.p - 1.0 + cfg.params.q) / rp1);
    jw.kv("mu", std::pow(ctx.lambda, 1.0 / rp1));
    jw.kv("a_coefficient", std::pow(ctx.lambda, (cfg.params.p - 1.0 + cfg.params.q) / rp1));
    jw.end_object();
    jw.end_object();
    jw.finish();
    return 0;
}

// Estimate of the critical-embedding constant together with its minimiser.
inline int cmd_sobolev(const RunConfig& cfg, const std::string& out_dir, int threads) {
    const RunContext ctx = make_context(cfg, threads);
    std::ofstream f = detail::open_output(out_dir, "sobolev.json");
    JsonWriter jw(f);
    jw.begin_object();
    detail::embed_header(jw, cfg, ctx);
    jw.end_object();
    jw.finish();
    if (cfg.write_csv && !ctx.sobolev_overridden) {
        std::ofstream c = detail::open_output(out_dir, "sobolev_minimizer.csv");
        write_function_csv(c, ctx.sobolev.minimizer);
    }
    return ctx.sobolev.converged ? 0 : 4;
}

// Fiber map along one direction: stationary values, curvatures, and a
// log-spaced curve with the exact stationary points spliced in.
inline int cmd_fiber(const RunConfig& cfg, const std::string& out_dir, int threads) {
    const RunContext ctx = make_context(cfg, threads);
    ProblemParams par = cfg.params;
    par.lambda = ctx.lambda;
    par.validate(true);

    const GridFunction dir = load_weight(*ctx.grid, cfg.fiber_direction);
    const FunctionalTriple triple = functional_triple(dir, ctx.weights, par, threads);
    if (!(triple.a_integral > 0.0))
        throw config_error("fiber direction must have a nontrivial positive part");
    const FiberRoots roots = fiber_roots(triple, par);
    const bool two = roots.kind == FiberCase::TwoRoots;

    std::ofstream f = detail::open_output(out_dir, "fiber.json");
    JsonWriter jw(f);
    jw.begin_object();
    detail::embed_header(jw, cfg, ctx);
    jw.kv("lambda", ctx.lambda);
    jw.kv("lambda_star", ctx.lambda_star_h);
    jw.key("triple").begin_object();
    jw.kv("seminorm_p", triple.seminorm_p);
    jw.kv("a_integral", triple.a_integral);
    jw.kv("b_integral", triple.b_integral);
    jw.end_object();
    jw.kv("case", two ? "two_roots" : "one_root");
    jw.kv("t_max", roots.t_max);
    jw.kv("psi_at_tmax", roots.psi_at_tmax);
    jw.kv("t1", roots.t1);
    jw.kv("phi_t1", phi(triple, par, roots.t1));
    jw.kv("phi_second_t1", phi_second(triple, par, roots.t1));
    if (two) {
        jw.kv("t2", roots.t2);
        jw.kv("phi_t2", phi(triple, par, roots.t2));
        jw.kv("phi_second_t2", phi_second(triple, par, roots.t2));
    } else {
        jw.kv_null("t2");
        jw.kv_null("phi_t2");
        jw.kv_null("phi_second_t2");
    }
    jw.end_object();
    jw.finish();

    if (cfg.write_csv) {
        const int samples = 1000;
        const double lo = roots.t1 / 100.0;
        const double hi = (two ? roots.t2 : roots.t_max) * 100.0;
        std::vector<double> ts(samples);
        const double ratio = hi / lo;
        for (int k = 0; k < samples; ++k)
            ts[k] = lo * std::pow(ratio, static_cast<double>(k) / (samples - 1));
        // splice the exact stationary points over their nearest grid samples
        auto splice = [&](double target) {
            const double pos = std::log(target / lo) / std::log(ratio) * (samples - 1);
            int k = static_cast<int>(std::lround(pos));
            if (k < 0) k = 0;
            if (k >= samples) k = samples - 1;
            ts[k] = target;
        };
        splice(roots.t1);
        splice(roots.t_max);
        if (two) splice(roots.t2);

        std::ofstream c = detail::open_output(out_dir, "fiber_curve.csv");
        c << "t,phi,dphi,d2phi,psi\n";
        for (const double t : ts)
            c << detail::format_double(t) << ',' << detail::format_double(phi(triple, par, t))
              << ',' << detail::format_double(phi_prime(triple, par, t)) << ','
              << detail::format_double(phi_second(triple, par, t)) << ','
              << detail::format_double(psi(triple, par, t)) << '\n';
    }
    return 0;
}

// Two-branch constrained minimisation at the resolved lambda, the norm-gap
// verification, and the coercivity floor over everything the solver saw.
inline int cmd_solve(const RunConfig& cfg, const std::string& out_dir, int threads) {
    const RunContext ctx = make_context(cfg, threads);
    if (!(ctx.lambda < ctx.lambda_star_h))
        throw out_of_range_error(
            "resolved lambda is not below the existence threshold; the two-branch solve "
            "is only defined for lambda in (0, lambda_star)");
    ProblemParams par = cfg.params;
    par.lambda = ctx.lambda;
    par.validate(true);

    const SolutionReport plus = minimize_branch(*ctx.grid, ctx.weights, par, Branch::Plus,
                                                cfg.solve, threads);
    const SolutionReport minus = minimize_branch(*ctx.grid, ctx.weights, par, Branch::Minus,
                                                 cfg.solve, threads);
    const GapReport gap = verify_solution_pair(plus, minus, par, ctx.norms, ctx.s_used);
    const CoercivityBound cb = coercivity_bound(par, ctx.norms.norm_a, ctx.s_used);
    const double min_observed = std::min(plus.min_projected_energy, minus.min_projected_energy);

    std::ofstream f = detail::open_output(out_dir, "gap.json");
    JsonWriter jw(f);
    jw.begin_object();
    detail::embed_header(jw, cfg, ctx);
    detail::embed_norms(jw, ctx.norms);
    jw.kv("lambda", ctx.lambda);
    jw.kv("lambda_star", ctx.lambda_star_h);
    detail::embed_solution(jw, "plus", plus, par);
    detail::embed_solution(jw, "minus", minus, par);
    jw.key("gap").begin_object();
    jw.kv("norm_plus", gap.norm_plus);
    jw.kv("norm_minus", gap.norm_minus);
    jw.kv("a_lambda", gap.a_lambda);
    jw.kv("a_zero", gap.a_zero);
    jw.kv("ordering_ok", gap.ordering_ok);
    jw.end_object();
    jw.key("coercivity").begin_object();
    jw.kv("alpha", cb.alpha);
    jw.kv("beta", cb.beta);
    jw.kv("t_min", cb.t_min);
    jw.kv("rho_min", cb.rho_min);
    jw.kv("min_observed_energy", min_observed);
    jw.kv("floor_ok", min_observed >= cb.rho_min);
    jw.end_object();
    jw.end_object();
    jw.finish();

    if (cfg.write_csv) {
        std::ofstream cp = detail::open_output(out_dir, "solution_plus.csv");
        write_function_csv(cp, plus.w);
        std::ofstream cm = detail::open_output(out_dir, "solution_minus.csv");
        write_function_csv(cm, minus.w);
    }
    return plus.converged && minus.converged ? 0 : 4;
}

// Minus-branch norms as r approaches p-1: one row per eps, each run
// independent, with the lower bound the norms must clear.
inline int cmd_sweep_blowup(const RunConfig& cfg, const std::string& out_dir, int threads) {
    const RunContext ctx = make_context(cfg, threads);
    const std::vector<SweepRow> rows =
        blowup_sweep(*ctx.grid, ctx.weights, cfg.params, cfg.sweep_epsilons, cfg.sweep_theta,
                     ctx.s_used, cfg.solve, threads);

    std::ofstream f = detail::open_output(out_dir, "sweep_blowup.json");
    JsonWriter jw(f);
    jw.begin_object();
    detail::embed_header(jw, cfg, ctx);
    jw.kv("theta", cfg.sweep_theta);
    jw.key("rows").begin_array();
    for (const SweepRow& row : rows) {
        jw.begin_object();
        jw.kv("epsilon", row.epsilon);
        jw.kv("lambda", row.lambda);
        jw.kv("norm_w", row.norm_w);
        jw.kv("c_eps", row.c_eps);
        jw.kv("bound", row.bound);
        jw.kv("satisfied", row.satisfied);
        jw.kv("converged", row.converged);
        jw.end_object();
    }
    jw.end_array();
    jw.end_object();
    jw.finish();

    if (cfg.write_csv) {
        std::ofstream c = detail::open_output(out_dir, "sweep_blowup.csv");
        c << "epsilon,lambda,norm_W,C_eps,bound,satisfied,converged\n";
        for (const SweepRow& row : rows)
            c << detail::format_double(row.epsilon) << ',' << detail::format_double(row.lambda)
              << ',' << detail::format_double(row.norm_w) << ','
              << detail::format_double(row.c_eps) << ',' << detail::format_double(row.bound)
              << ',' << (row.satisfied ? 1 : 0) << ',' << (row.converged ? 1 : 0) << '\n';
    }
    for (const SweepRow& row : rows)
        if (!row.converged) return 4;
    return 0;
}

}
