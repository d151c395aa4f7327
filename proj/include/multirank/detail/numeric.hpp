#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace multirank::detail {

// Neumaier-compensated sum; error stays O(eps) independent of length.
inline double compensated_sum(std::span<const double> v) {
    double sum = 0.0, c = 0.0;
    for (double x : v) {
        double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    return sum + c;
}

inline double l1_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::fabs(x);
    return s;
}

inline double l1_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
    return s;
}

inline void scale(std::span<double> v, double factor) {
    for (double& x : v) x *= factor;
}

}  // namespace multirank::detail
