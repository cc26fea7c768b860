#pragma once

#include "edgelab/rng.hpp"

#include <cstddef>
#include <span>

namespace edgelab {

/// Monte Carlo estimates of s_n^2 = E S_n^2 / n and kappa_n^3 = E S_n^3 / n^{3/2}.
struct CumulantEstimate {
    double s2 = 0.0;
    double k3 = 0.0;
    double se_s2 = 0.0;
    double se_k3 = 0.0;
    /// Long-run variance diagnostic; estimate_cumulants leaves it NaN.
    double lrv = 0.0;
    double se_lrv = 0.0;
    std::size_t N = 0;
    std::size_t n = 0;
    /// All replicates equal: s2 carries no information.
    bool degenerate = false;
};

/// Raw second and third sample moments of the replicates T = S_n / sqrt(n).
/// Throws SampleSizeError for fewer than 100 replicates.
CumulantEstimate estimate_cumulants(std::span<const double> sums, std::size_t n);

struct ExactCumulants {
    double s2 = 0.0;
    double k3 = 0.0;
};

/// Exhaustive enumeration over all atom tuples of n i.i.d. draws.
/// Limits: n <= 12, at most 4 atoms, atoms^n <= 1e7 (CapacityError otherwise).
ExactCumulants exact_cumulants_discrete(const DistSpec& spec, std::size_t n);

struct LongRunVariance {
    double value = 0.0;
    double se = 0.0;
    bool negative = false;
};

/// Bartlett lag-window estimate gamma_0 + 2 sum_{k<=B} (1 - k/(B+1)) gamma_k.
/// The result is never clamped; `negative` marks a negative estimate.
LongRunVariance longrun_variance(std::span<const double> path, std::size_t bandwidth);

/// Default bandwidth ceil(len^{1/3}).
std::size_t default_bandwidth(std::size_t length);

}  // namespace edgelab
