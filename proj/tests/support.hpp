#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace testing {

struct Estimate {
    double value;
    double se;
};

// Mean of g(x) over the sample with its standard error.
template <class G>
Estimate mean_of(std::span<const double> xs, G g) {
    double s = 0.0, s2 = 0.0;
    for (double x : xs) {
        const double y = g(x);
        s += y;
        s2 += y * y;
    }
    const double n = static_cast<double>(xs.size());
    const double m = s / n;
    return {m, std::sqrt(std::max(0.0, s2 / n - m * m) / n)};
}

inline Estimate mean_of(std::span<const double> xs) {
    return mean_of(xs, [](double x) { return x; });
}

// Third central moment; SE from its influence function (x - m)^3 - 3 m2 (x - m).
inline Estimate third_central(std::span<const double> xs) {
    const double m = mean_of(xs).value;
    const double m2 = mean_of(xs, [m](double x) { return (x - m) * (x - m); }).value;
    const double m3 = mean_of(xs, [m](double x) { return (x - m) * (x - m) * (x - m); }).value;
    const auto infl = mean_of(xs, [m, m2](double x) {
        const double d = x - m;
        return d * d * d - 3.0 * m2 * d;
    });
    return {m3, infl.se};
}

inline Estimate variance_of(std::span<const double> xs) {
    const double m = mean_of(xs).value;
    return mean_of(xs, [m](double x) { return (x - m) * (x - m); });
}

// Mean of a serially dependent series with a batch-means standard error.
inline Estimate batch_mean(std::span<const double> xs, std::size_t batches) {
    const std::size_t len = xs.size() / batches;
    std::vector<double> means(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += xs[b * len + i];
        means[b] = s / static_cast<double>(len);
    }
    return mean_of(means);
}

// Asymptotic 1% critical value of the one-sample KS statistic.
inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

// Two-sample version for equal sizes.
inline double ks2_critical_1pct(std::size_t n) {
    return 1.6276 * std::sqrt(2.0 / static_cast<double>(n));
}

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double Phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Composite Simpson rule with an even number of panels; used as an
// independent quadrature oracle.
template <class F>
double simpson(F f, double a, double b, std::size_t panels) {
    if (panels % 2) ++panels;
    const double h = (b - a) / static_cast<double>(panels);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < panels; ++i)
        s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

inline std::vector<double> sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace testing
