#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace edgelab {

double normal_pdf(double x) noexcept;
/// Phi(x) via erfc; accurate in both tails.
double normal_cdf(double x) noexcept;
double normal_quantile(double p);

/// Neumaier-compensated running sum. Order dependent, so reductions must feed
/// it in a fixed (replicate-index) order.
class CompensatedSum {
public:
    void add(double x) noexcept;
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

/// Sample mean and its standard error (sd / sqrt(N)).
MeanSe mean_se(std::span<const double> xs);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

struct QuadratureConfig {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    std::size_t max_intervals = 20000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t intervals = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
/// Throws AccuracyError carrying the achieved estimate when the tolerance is
/// not met within `max_intervals` subdivisions.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureConfig& cfg = {});

/// Same, split at the given interior break points (sorted or not).
QuadratureResult integrate_split(const std::function<double(double)>& f, double a, double b,
                                 std::span<const double> breaks,
                                 const QuadratureConfig& cfg = {});

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
GaussRule gauss_legendre(std::size_t n);

}  // namespace edgelab
