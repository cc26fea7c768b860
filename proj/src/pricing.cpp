#include "edgelab/pricing.hpp"

#include "edgelab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace edgelab {

DriftEstimate estimate_drift(ModelConfig& cfg, std::size_t N, const StreamKey& key,
                             std::size_t workers) {
    const double rn = std::sqrt(static_cast<double>(cfg.n));
    if (!cfg.transform.centering) {
        if (auto mu = analytic_centering(cfg)) return {rn * *mu, 0.0};
        estimate_centering(cfg, N, key, workers);
    }
    return {rn * *cfg.transform.centering, rn * cfg.transform.centering_se};
}

PriceEstimate price_put_mc(const PricingProblem& prob, std::size_t N, const StreamKey& key,
                           std::size_t workers) {
    if (N < 10000) throw SampleSizeError("price_put_mc: need N >= 1e4");
    if (!(prob.K > 0.0)) throw ParameterError("price_put_mc: K must be > 0");
    const auto sums = simulate_normalized_sums(prob.cfg, N, key, workers);
    return price_put_from_sums(sums, prob.K, prob.drift);
}

PriceEstimate price_put_from_sums(std::span<const double> sums, double K, double drift) {
    if (!(K > 0.0)) throw ParameterError("price_put: K must be > 0");
    std::vector<double> pay(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i)
        pay[i] = std::max(K - std::exp(sums[i] + drift), 0.0);
    const auto ms = mean_se(pay);
    return {ms.mean, ms.se};
}

double price_put_edgeworth(const CumulantEstimate& cumulants, double drift, double K,
                           EdgeworthMode mode) {
    if (!(cumulants.s2 > 0.0)) throw ParameterError("price_put_edgeworth: s2 must be > 0");
    const EdgeworthApprox approx(std::sqrt(cumulants.s2), cumulants.k3, mode);
    return expectation(approx, Payoff::put(K, drift));
}

double price_put_gaussian_oracle(double s, double K, double drift) {
    if (!(s > 0.0)) throw ParameterError("price_put_gaussian_oracle: s must be > 0");
    if (!(K > 0.0)) throw ParameterError("price_put_gaussian_oracle: K must be > 0");
    const double d2 = (drift - std::log(K)) / s;
    const double d1 = d2 + s;
    return K * normal_cdf(-d2) - std::exp(drift + 0.5 * s * s) * normal_cdf(-d1);
}

}  // namespace edgelab
