#include "edgelab/moments.hpp"

#include "edgelab/errors.hpp"
#include "edgelab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace edgelab {

CumulantEstimate estimate_cumulants(std::span<const double> sums, std::size_t n) {
    if (sums.size() < 100)
        throw SampleSizeError("estimate_cumulants: need N >= 100, got " +
                              std::to_string(sums.size()));
    std::vector<double> t2(sums.size()), t3(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) {
        t2[i] = sums[i] * sums[i];
        t3[i] = t2[i] * sums[i];
    }
    const auto m2 = mean_se(t2);
    const auto m3 = mean_se(t3);
    CumulantEstimate est;
    est.s2 = m2.mean;
    est.k3 = m3.mean;
    est.se_s2 = m2.se;
    est.se_k3 = m3.se;
    est.N = sums.size();
    est.n = n;
    est.lrv = std::nan("");
    est.se_lrv = std::nan("");
    est.degenerate = std::all_of(sums.begin(), sums.end(), [&](double x) { return x == sums[0]; });
    return est;
}

ExactCumulants exact_cumulants_discrete(const DistSpec& spec, std::size_t n) {
    if (!spec.is_discrete()) throw ParameterError("exact_cumulants_discrete: law must be discrete");
    spec.validate();
    if (n < 1 || n > 12) throw CapacityError("exact_cumulants_discrete: need 1 <= n <= 12");
    const auto atoms = spec.atoms();
    if (atoms.size() > 4) throw CapacityError("exact_cumulants_discrete: more than 4 atoms");
    double states = std::pow(static_cast<double>(atoms.size()), static_cast<double>(n));
    if (states > 1e7)
        throw CapacityError("exact_cumulants_discrete: state space of " +
                            std::to_string(static_cast<long long>(states)) + " tuples exceeds 1e7");

    // Odometer over atom indices.
    std::vector<std::size_t> idx(n, 0);
    CompensatedSum m2, m3;
    for (;;) {
        double s = 0.0, p = 1.0;
        for (auto i : idx) {
            s += atoms[i].x;
            p *= atoms[i].p;
        }
        m2.add(p * s * s);
        m3.add(p * s * s * s);
        std::size_t pos = 0;
        while (pos < n && ++idx[pos] == atoms.size()) idx[pos++] = 0;
        if (pos == n) break;
    }
    const double nn = static_cast<double>(n);
    return {m2.value() / nn, m3.value() / (nn * std::sqrt(nn))};
}

LongRunVariance longrun_variance(std::span<const double> path, std::size_t bandwidth) {
    const std::size_t len = path.size();
    if (bandwidth < 1 || 4 * bandwidth >= len)
        throw ParameterError("longrun_variance: need 1 <= B < length / 4");
    CompensatedSum s;
    for (double x : path) s.add(x);
    const double mean = s.value() / static_cast<double>(len);
    std::vector<double> c(len);
    for (std::size_t i = 0; i < len; ++i) c[i] = path[i] - mean;

    auto autocov = [&](std::size_t k) {
        CompensatedSum acc;
        for (std::size_t t = 0; t + k < len; ++t) acc.add(c[t] * c[t + k]);
        return acc.value() / static_cast<double>(len);
    };
    double value = autocov(0);
    const double b1 = static_cast<double>(bandwidth) + 1.0;
    for (std::size_t k = 1; k <= bandwidth; ++k)
        value += 2.0 * (1.0 - static_cast<double>(k) / b1) * autocov(k);

    LongRunVariance out;
    out.value = value;
    // Bartlett-window asymptotic variance (4/3)(B/len) lrv^2.
    out.se = std::abs(value) *
             std::sqrt(4.0 * static_cast<double>(bandwidth) / (3.0 * static_cast<double>(len)));
    out.negative = value < 0.0;
    return out;
}

std::size_t default_bandwidth(std::size_t length) {
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(length)))));
}

}  // namespace edgelab
