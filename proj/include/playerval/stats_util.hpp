#pragma once

#include <cstddef>
#include <span>

namespace playerval {

inline double mean_of(std::span<const double> v) {
    double sum = 0.0;
    for (const double x : v) sum += x;
    return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

// Population variance (divide by count), two-pass for stability.
inline double population_variance(std::span<const double> v) {
    if (v.empty()) return 0.0;
    const double m = mean_of(v);
    double acc = 0.0;
    for (const double x : v) {
        const double d = x - m;
        acc += d * d;
    }
    return acc / static_cast<double>(v.size());
}

} // namespace playerval
