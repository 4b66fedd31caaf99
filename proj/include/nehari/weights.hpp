#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"

namespace nehari {

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || !std::isfinite(v))
        throw config_error("cannot parse number '" + s + "' in " + what);
    return v;
}

// 17 significant digits: every finite double round-trips exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

// Tabulated weight: strictly increasing x covering all of [-1,1], values
// finite, evaluated by linear interpolation (exact at the knots).
struct WeightTable {
    std::vector<double> x;
    std::vector<double> value;

    double eval(double xq) const {
        const auto it = std::lower_bound(x.begin(), x.end(), xq);
        const size_t k = static_cast<size_t>(it - x.begin());
        if (it != x.end() && *it == xq) return value[k];
        const double x0 = x[k - 1], x1 = x[k];
        const double t = (xq - x0) / (x1 - x0);
        return value[k - 1] + t * (value[k] - value[k - 1]);
    }
};

inline WeightTable load_weight_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open weight CSV '" + path + "'");
    WeightTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        auto tok = detail::split_ws(line);
        if (tok.empty()) continue;
        if (first) {
            first = false;
            // header lines are allowed; skip if the first token is not numeric
            char* end = nullptr;
            std::strtod(tok[0].c_str(), &end);
            if (end == tok[0].c_str()) continue;
        }
        if (tok.size() != 2) throw config_error("weight CSV '" + path + "': expected two columns");
        t.x.push_back(detail::parse_double(tok[0], path));
        t.value.push_back(detail::parse_double(tok[1], path));
    }
    if (t.x.size() < 2) throw config_error("weight CSV '" + path + "': needs at least two rows");
    for (size_t i = 1; i < t.x.size(); ++i)
        if (!(t.x[i] > t.x[i - 1]))
            throw config_error("weight CSV '" + path + "': x must be strictly increasing");
    if (!(t.x.front() <= -1.0 && t.x.back() >= 1.0))
        throw config_error("weight CSV '" + path + "': x range must cover [-1,1]");
    return t;
}

// Weight specifications, one per line of config:
//   constant <c>
//   cos <k>                  cos(k*pi*x)
//   gauss <c> <sigma>        exp(-((x-c)/sigma)^2)
//   csv <path>               tabulated (x,value), linear interpolation
inline GridFunction load_weight(const Grid& g, const std::string& spec) {
    const auto tok = detail::split_ws(spec);
    if (tok.empty()) throw config_error("empty weight spec");
    std::vector<double> v(g.num_nodes);
    if (tok[0] == "constant") {
        if (tok.size() != 2) throw config_error("weight spec 'constant' takes one value");
        const double c = detail::parse_double(tok[1], "constant weight");
        std::fill(v.begin(), v.end(), c);
    } else if (tok[0] == "cos") {
        if (tok.size() != 2) throw config_error("weight spec 'cos' takes one frequency");
        const double k = detail::parse_double(tok[1], "cos weight");
        for (int i = 0; i < g.num_nodes; ++i) v[i] = std::cos(k * std::numbers::pi * g.nodes[i]);
    } else if (tok[0] == "gauss") {
        if (tok.size() != 3) throw config_error("weight spec 'gauss' takes center and width");
        const double c = detail::parse_double(tok[1], "gauss weight");
        const double sigma = detail::parse_double(tok[2], "gauss weight");
        if (!(sigma > 0.0)) throw config_error("gauss weight requires sigma > 0");
        for (int i = 0; i < g.num_nodes; ++i) {
            const double z = (g.nodes[i] - c) / sigma;
            v[i] = std::exp(-z * z);
        }
    } else if (tok[0] == "csv") {
        if (tok.size() != 2) throw config_error("weight spec 'csv' takes one path");
        const WeightTable t = load_weight_table(tok[1]);
        for (int i = 0; i < g.num_nodes; ++i) v[i] = t.eval(g.nodes[i]);
    } else {
        throw config_error("unknown weight spec name '" + tok[0] + "'");
    }
    for (double x : v)
        if (!std::isfinite(x)) throw config_error("weight spec '" + spec + "' produced non-finite values");
    return GridFunction{&g, std::move(v)};
}

// a multiplies the singular term and must be strictly positive on the grid;
// b multiplies the superlinear term, may change sign, but must be positive
// somewhere or the minus branch is empty.
struct WeightPair {
    GridFunction a;
    GridFunction b;
};

inline WeightPair make_weights(const Grid& g, const std::string& spec_a, const std::string& spec_b) {
    WeightPair w{load_weight(g, spec_a), load_weight(g, spec_b)};
    for (double v : w.a.values)
        if (!(v > 0.0)) throw config_error("weight a must be strictly positive on the grid");
    if (*std::max_element(w.b.values.begin(), w.b.values.end()) <= 0.0)
        throw config_error("weight b must attain a strictly positive value");
    return w;
}

// Writes a grid function as a weight-compatible CSV: explicit zero rows at
// the boundary so the table covers [-1,1], nodal rows in between. Loading it
// back through the csv weight spec reproduces the nodal values bit-exactly.
inline void write_function_csv(std::ostream& out, const GridFunction& w) {
    out << "x,w\n";
    out << "-1,0\n";
    for (int i = 0; i < w.size(); ++i)
        out << detail::format_double(w.grid->nodes[i]) << ',' << detail::format_double(w.values[i])
            << '\n';
    out << "1,0\n";
}

inline void write_function_csv(const std::string& path, const GridFunction& w) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot write CSV '" + path + "'");
    write_function_csv(out, w);
}

}
