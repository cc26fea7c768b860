#pragma once

#include "edgelab/edgeworth.hpp"
#include "edgelab/models.hpp"
#include "edgelab/moments.hpp"

#include <cstddef>
#include <span>

namespace edgelab {

/// European put on P = exp(S_n / sqrt(n) + drift) with initial price 1 and
/// horizon cfg.n.
struct PricingProblem {
    double K = 1.0;
    ModelConfig cfg;
    double drift = 0.0;
};

struct PriceEstimate {
    double price = 0.0;
    double se = 0.0;
};

struct DriftEstimate {
    double drift = 0.0;
    double se = 0.0;
};

/// sqrt(n) mu_f: the deterministic part of sum f(Y_k) / sqrt(n) that the
/// centred sums leave out. Zero when the centering is analytically zero;
/// otherwise mu_f comes from the configured value or an N-draw estimate.
DriftEstimate estimate_drift(ModelConfig& cfg, std::size_t N, const StreamKey& key,
                             std::size_t workers = 1);

/// Mean payoff over given replicates T = S_n / sqrt(n), with its SE.
PriceEstimate price_put_from_sums(std::span<const double> sums, double K, double drift);

/// Mean of max(K - exp(T + drift), 0) over N replicates T = S_n / sqrt(n).
/// SampleSizeError for N < 1e4.
PriceEstimate price_put_mc(const PricingProblem& prob, std::size_t N, const StreamKey& key,
                           std::size_t workers = 1);

/// Put integrated against the one-term expansion with s = sqrt(s2).
double price_put_edgeworth(const CumulantEstimate& cumulants, double drift, double K,
                           EdgeworthMode mode);

/// Closed form K Phi(-d2) - exp(drift + s^2/2) Phi(-d1),
/// d2 = (drift - ln K)/s, d1 = d2 + s.
double price_put_gaussian_oracle(double s, double K, double drift);

}  // namespace edgelab
