#pragma once

#include <stdexcept>
#include <string>

namespace nehari {

// Invalid parameters, weights, grids, or run configuration. CLI exit code 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Inputs are well formed but outside the regime the two-solution theory
// covers (e.g. lambda at or above the extremal threshold). CLI exit code 3.
struct out_of_range_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iteration failed to reach its tolerance or to find an admissible
// starting point. CLI exit code 4.
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A requested operation is undefined for the given function, e.g. projecting
// onto the minus branch when the superlinear integral is not positive.
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}
