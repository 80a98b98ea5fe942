// Compensated (Kahan) accumulator for long scalar sums.

#pragma once

namespace fkmc {

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }

    double value() const { return sum; }
};

} // namespace fkmc
