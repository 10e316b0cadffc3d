#pragma once

#include <cmath>
#include <vector>

namespace lgs {

// log(sum_i exp(v_i)) with max subtraction.
inline double logsumexp(const std::vector<double>& v) {
    double m = -HUGE_VAL;
    for (double x : v)
        if (x > m) m = x;
    if (m == -HUGE_VAL) return -HUGE_VAL;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace lgs
