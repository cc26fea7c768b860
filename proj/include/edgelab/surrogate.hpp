#pragma once

#include "edgelab/rng.hpp"

#include <cstddef>
#include <memory>
#include <vector>

namespace edgelab {

enum class SkewSign { positive, negative, none };

/// L = Z + sign (G - alpha/beta), Z ~ N(0, sigma_z2), G ~ Gamma(alpha, beta)
/// (shape-rate), independent. Constructed so that Var L = s2 and the third
/// cumulant equals k3 exactly, under the shape relation alpha = s2 * beta.
class SurrogateLaw {
public:
    /// Solves beta = sqrt(2 s2 / |k3|), alpha = s2 beta, sigma_z2 = s2 - s2/beta.
    /// Throws ParameterError for s2 <= 0 and InfeasibleError (carrying the
    /// largest representable |k3| = 2 s2) when sigma_z2 would be negative.
    static SurrogateLaw from_cumulants(double s2, double k3);

    double sigma_z2() const noexcept { return sigma_z2_; }
    double gamma_shape() const noexcept { return shape_; }
    double gamma_rate() const noexcept { return rate_; }
    SkewSign sign() const noexcept { return sign_; }
    double target_s2() const noexcept { return target_s2_; }
    double target_k3() const noexcept { return target_k3_; }

    struct Cumulants {
        double variance;
        double k3;
    };
    /// Closed form (sigma_z2 + alpha/beta^2, +-2 alpha/beta^3).
    Cumulants cumulants() const noexcept;

    /// P(L <= x) to about 1e-10 absolute (mixture quadrature).
    double cdf(double x) const;

    std::vector<double> sample(const StreamKey& key, std::size_t count) const;

    /// Largest |k3| that a law with variance s2 can carry.
    static double max_abs_k3(double s2) noexcept { return 2.0 * s2; }

private:
    struct Table;
    SurrogateLaw() = default;
    void build_table();

    double sigma_z2_ = 0.0;
    double shape_ = 0.0;
    double rate_ = 0.0;
    SkewSign sign_ = SkewSign::none;
    double target_s2_ = 0.0;
    double target_k3_ = 0.0;
    std::shared_ptr<const Table> table_;
};

}  // namespace edgelab
