#pragma once

#include <cmath>

namespace nehari {

// Neumaier variant of compensated summation. Terms added in a fixed order
// produce a bit-identical result, which is what makes the threaded double
// sums reproducible: each row is accumulated in index order and rows are
// combined in index order, independent of how rows were scheduled.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            carry += (sum - t) + x;
        else
            carry += (x - t) + sum;
        sum = t;
    }

    double value() const { return sum + carry; }
};

}
