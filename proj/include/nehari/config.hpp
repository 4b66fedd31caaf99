#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "params.hpp"
#include "sobolev.hpp"
#include "solver.hpp"
#include "weights.hpp"

namespace nehari {

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline long long parse_int(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw config_error("expected an integer for " + what + ", got '" + s + "'");
    }
    if (pos != s.size())
        throw config_error("expected an integer for " + what + ", got '" + s + "'");
    return v;
}

inline std::uint64_t parse_uint64(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &pos);
    } catch (const std::exception&) {
        throw config_error("expected an unsigned integer for " + what + ", got '" + s + "'");
    }
    if (pos != s.size() || s.find('-') != std::string::npos)
        throw config_error("expected an unsigned integer for " + what + ", got '" + s + "'");
    return v;
}

inline double parse_double_or_fail(const std::string& s, const std::string& what) {
    return parse_double(s, what);
}

inline bool parse_bool(const std::string& s, const std::string& what) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw config_error("expected true/false for " + what + ", got '" + s + "'");
}

}  // namespace detail

// Everything a run needs, filled from a flat `section.key = value` file.
// Unknown keys are errors: a typo must never silently fall back to a default.
struct RunConfig {
    ProblemParams params;
    int num_nodes = 255;
    std::string weight_a = "constant 1";
    std::string weight_b = "cos 1";
    std::string lambda_policy = "fraction";  // fraction of the threshold, or absolute
    double lambda_value = 0.5;
    SolveConfig solve;
    SobolevConfig sobolev;
    std::optional<double> s_override;  // skip the constant estimate, use this value
    std::string fiber_direction = "gauss 0 0.25";
    std::vector<double> sweep_epsilons = {0.5, 0.25, 0.125};
    double sweep_theta = 0.5;
    std::string output_dir = "out";
    bool write_csv = true;

    void apply(const std::string& key, const std::string& value) {
        using detail::parse_bool;
        using detail::parse_double_or_fail;
        using detail::parse_int;
        using detail::parse_uint64;
        if (key == "params.s") params.s = parse_double_or_fail(value, key);
        else if (key == "params.p") params.p = parse_double_or_fail(value, key);
        else if (key == "params.q") params.q = parse_double_or_fail(value, key);
        else if (key == "params.r") params.r = parse_double_or_fail(value, key);
        else if (key == "grid.num_nodes") {
            const long long n = parse_int(value, key);
            if (n < 3 || n > 1000000) throw config_error("grid.num_nodes must be in [3, 1000000]");
            num_nodes = static_cast<int>(n);
        } else if (key == "weights.a") weight_a = value;
        else if (key == "weights.b") weight_b = value;
        else if (key == "lambda.policy") {
            if (value != "fraction" && value != "absolute")
                throw config_error("lambda.policy must be 'fraction' or 'absolute'");
            lambda_policy = value;
        } else if (key == "lambda.value") {
            lambda_value = parse_double_or_fail(value, key);
            if (!(lambda_value > 0.0)) throw config_error("lambda.value must be > 0");
        } else if (key == "solver.max_iters") {
            const long long n = parse_int(value, key);
            if (n < 1) throw config_error("solver.max_iters must be >= 1");
            solve.max_iters = static_cast<int>(n);
        } else if (key == "solver.step0") solve.step0 = parse_double_or_fail(value, key);
        else if (key == "solver.armijo_shrink") {
            solve.armijo_shrink = parse_double_or_fail(value, key);
            if (!(solve.armijo_shrink > 0.0 && solve.armijo_shrink < 1.0))
                throw config_error("solver.armijo_shrink must be in (0, 1)");
        } else if (key == "solver.armijo_c") solve.armijo_c = parse_double_or_fail(value, key);
        else if (key == "solver.grad_tol") {
            solve.grad_tol = parse_double_or_fail(value, key);
            if (!(solve.grad_tol > 0.0)) throw config_error("solver.grad_tol must be > 0");
        } else if (key == "solver.seed") solve.seed = parse_uint64(value, key);
        else if (key == "solver.num_starts") {
            const long long n = parse_int(value, key);
            if (n < 1 || n > 64) throw config_error("solver.num_starts must be in [1, 64]");
            solve.num_starts = static_cast<int>(n);
        } else if (key == "sobolev.max_iters") {
            const long long n = parse_int(value, key);
            if (n < 1) throw config_error("sobolev.max_iters must be >= 1");
            sobolev.max_iters = static_cast<int>(n);
        } else if (key == "sobolev.tol") sobolev.tol = parse_double_or_fail(value, key);
        else if (key == "sobolev.margin") {
            sobolev.margin = parse_double_or_fail(value, key);
            if (!(sobolev.margin >= 0.0 && sobolev.margin < 1.0))
                throw config_error("sobolev.margin must be in [0, 1)");
        } else if (key == "sobolev.s_override") {
            const double v = parse_double_or_fail(value, key);
            if (!(v > 0.0)) throw config_error("sobolev.s_override must be > 0");
            s_override = v;
        } else if (key == "fiber.direction") fiber_direction = value;
        else if (key == "sweep.epsilons") {
            std::vector<double> eps;
            for (const std::string& tok : detail::split_ws(value))
                eps.push_back(parse_double_or_fail(tok, key));
            if (eps.empty()) throw config_error("sweep.epsilons must list at least one value");
            for (double e : eps)
                if (!(e > 0.0)) throw config_error("sweep.epsilons entries must be > 0");
            sweep_epsilons = std::move(eps);
        } else if (key == "sweep.theta") {
            sweep_theta = parse_double_or_fail(value, key);
            if (!(sweep_theta > 0.0 && sweep_theta < 1.0))
                throw config_error("sweep.theta must be in (0, 1)");
        } else if (key == "output.dir") output_dir = value;
        else if (key == "output.write_csv") write_csv = parse_bool(value, key);
        else throw config_error("unknown config key: " + key);
    }

    // Canonical key/value listing of the effective configuration, embedded in
    // every JSON report. Covers every key the parser accepts, in a fixed
    // order, so two runs produce byte-identical embeddings exactly when their
    // effective configs match. The thread count is deliberately absent: it
    // must never influence results.
    std::vector<std::pair<std::string, std::string>> resolved() const {
        using detail::format_double;
        std::vector<std::pair<std::string, std::string>> out;
        out.emplace_back("params.s", format_double(params.s));
        out.emplace_back("params.p", format_double(params.p));
        out.emplace_back("params.q", format_double(params.q));
        out.emplace_back("params.r", format_double(params.r));
        out.emplace_back("grid.num_nodes", std::to_string(num_nodes));
        out.emplace_back("weights.a", weight_a);
        out.emplace_back("weights.b", weight_b);
        out.emplace_back("lambda.policy", lambda_policy);
        out.emplace_back("lambda.value", format_double(lambda_value));
        out.emplace_back("solver.max_iters", std::to_string(solve.max_iters));
        out.emplace_back("solver.step0", format_double(solve.step0));
        out.emplace_back("solver.armijo_shrink", format_double(solve.armijo_shrink));
        out.emplace_back("solver.armijo_c", format_double(solve.armijo_c));
        out.emplace_back("solver.grad_tol", format_double(solve.grad_tol));
        out.emplace_back("solver.seed", std::to_string(solve.seed));
        out.emplace_back("solver.num_starts", std::to_string(solve.num_starts));
        out.emplace_back("sobolev.max_iters", std::to_string(sobolev.max_iters));
        out.emplace_back("sobolev.tol", format_double(sobolev.tol));
        out.emplace_back("sobolev.margin", format_double(sobolev.margin));
        out.emplace_back("sobolev.s_override",
                         s_override ? format_double(*s_override) : std::string("none"));
        out.emplace_back("fiber.direction", fiber_direction);
        std::string eps;
        for (std::size_t i = 0; i < sweep_epsilons.size(); ++i) {
            if (i) eps += ' ';
            eps += format_double(sweep_epsilons[i]);
        }
        out.emplace_back("sweep.epsilons", eps);
        out.emplace_back("sweep.theta", format_double(sweep_theta));
        out.emplace_back("output.dir", output_dir);
        out.emplace_back("output.write_csv", write_csv ? "true" : "false");
        return out;
    }
};

inline RunConfig parse_run_config(std::istream& in, const std::string& origin) {
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error(origin + ":" + std::to_string(lineno) +
                               ": expected 'key = value', got '" + t + "'");
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string value = detail::trim(t.substr(eq + 1));
        if (key.empty())
            throw config_error(origin + ":" + std::to_string(lineno) + ": empty key");
        try {
            cfg.apply(key, value);
        } catch (const config_error& e) {
            throw config_error(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    return parse_run_config(in, path);
}

}
