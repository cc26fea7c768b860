#pragma once

#include "edgelab/numerics.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace edgelab {

using CdfFn = std::function<double(double)>;
using CfFn = std::function<std::complex<double>(double)>;

/// sup_x |F_N(x) - F(x)| over a sorted sample. The candidates are the two
/// one-sided jumps at every order statistic plus `refine` equally spaced
/// interior points per gap, which matters only for non-monotone targets.
/// Throws ContractError when the sample is empty or unsorted.
double kolmogorov_distance(std::span<const double> sorted, const CdfFn& target,
                           std::size_t refine = 8);

/// Integral over [lo, hi] of |F_N - F|, i.e. W1 in one dimension. Throws
/// CoverageError unless the range holds the sample and the target's
/// 1e-8 .. 1 - 1e-8 quantiles.
double wasserstein1_cdf(std::span<const double> sorted, const CdfFn& target, double lo,
                        double hi);

/// Mean |a_(i) - b_(i)| over order statistics. ContractError on length mismatch.
double wasserstein1_samples(std::span<const double> a, std::span<const double> b);

struct EmpiricalCf {
    std::vector<std::complex<double>> values;
    std::vector<double> moduli;
    /// 1/sqrt(N), a uniform bound on the standard error of each value.
    double error_bar = 0.0;
};

EmpiricalCf empirical_cf(std::span<const double> sample, std::span<const double> xi_grid,
                         std::size_t workers = 1);

struct CfScan {
    double sup_modulus = 0.0;
    double argmax_xi = 0.0;
    std::vector<double> grid;
    std::vector<double> moduli;
};

/// Largest empirical-CF modulus on a uniform grid of `grid_size` points over
/// [a, b]. ParameterError unless 0 < a < b and grid_size >= 64.
CfScan cf_sup_scan(std::span<const double> sample, double a, double b, std::size_t grid_size,
                   std::size_t workers = 1);

/// The tail integral over a <= |xi| <= b of e^{-i xi x} cf(xi) (1 - |xi|/b) / xi.
/// For a cf with cf(-xi) = conj cf(xi) it equals i times the returned value
/// 2 * int_a^b Im(e^{-i xi x} cf(xi)) (1 - xi/b) / xi dxi.
double berry_esseen_tail(const CfFn& cf, double a, double b, double x,
                         const QuadratureConfig& quad = {1e-8, 0.0, 50000});

struct BerryEsseenCharacteristic {
    double value = 0.0;
    double argmin_b = 0.0;
    /// sup_x |tail| + 1/b for each b in the grid.
    std::vector<double> per_b;
};

/// min over b of (max over x of |tail(a, b, x)| + 1/b).
BerryEsseenCharacteristic berry_esseen_characteristic(const CfFn& cf, double a,
                                                      std::span<const double> b_grid,
                                                      std::span<const double> x_grid,
                                                      std::size_t workers = 1);

/// b = 2^j a for j = 0..10.
std::vector<double> default_b_grid(double a);
/// 129 equally spaced points over [-8s, 8s].
std::vector<double> default_x_grid(double s);

enum class MetricTarget { edgeworth, surrogate, gaussian };
std::string to_string(MetricTarget t);

struct MetricReport {
    double kolmogorov = 0.0;
    double wasserstein1 = 0.0;
    std::size_t n = 0;
    std::size_t N = 0;
    MetricTarget target = MetricTarget::gaussian;
    std::string seed_path;
    std::optional<CfScan> cf_scan;
};

}  // namespace edgelab
