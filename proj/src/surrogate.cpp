#include "edgelab/surrogate.hpp"

#include "edgelab/errors.hpp"
#include "edgelab/numerics.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace edgelab {

namespace {

constexpr std::size_t kPointsPerPanel = 16;
constexpr std::size_t kMaxPanels = 4096;
constexpr double kTableTol = 1e-10;

}  // namespace

// Nodes g_j and weights w_j for F(x) = sum_j w_j Phi((x - sign (g_j - m)) / sigma).
// The Gamma variable is integrated in log scale, where its density is smooth
// for every shape, so composite Gauss-Legendre converges geometrically.
struct SurrogateLaw::Table {
    std::vector<double> nodes;
    std::vector<double> weights;
};

SurrogateLaw SurrogateLaw::from_cumulants(double s2, double k3) {
    if (!(s2 > 0.0) || !std::isfinite(s2))
        throw ParameterError("surrogate: s2 must be > 0");
    if (!std::isfinite(k3)) throw ParameterError("surrogate: k3 must be finite");
    SurrogateLaw law;
    law.target_s2_ = s2;
    law.target_k3_ = k3;
    if (k3 == 0.0) {
        law.sigma_z2_ = s2;
        law.sign_ = SkewSign::none;
        return law;
    }
    const double beta = std::sqrt(2.0 * s2 / std::abs(k3));
    const double sigma_z2 = s2 - s2 / beta;
    if (sigma_z2 < 0.0) {
        std::ostringstream os;
        os << "surrogate: |k3| = " << std::abs(k3) << " exceeds the maximal representable "
           << max_abs_k3(s2) << " for s2 = " << s2;
        throw InfeasibleError(max_abs_k3(s2), os.str());
    }
    law.rate_ = beta;
    law.shape_ = s2 * beta;
    law.sigma_z2_ = sigma_z2;
    law.sign_ = k3 > 0.0 ? SkewSign::positive : SkewSign::negative;
    law.build_table();
    return law;
}

SurrogateLaw::Cumulants SurrogateLaw::cumulants() const noexcept {
    if (sign_ == SkewSign::none) return {sigma_z2_, 0.0};
    const double var = sigma_z2_ + shape_ / (rate_ * rate_);
    const double k3 = 2.0 * shape_ / (rate_ * rate_ * rate_);
    return {var, sign_ == SkewSign::positive ? k3 : -k3};
}

void SurrogateLaw::build_table() {
    if (sigma_z2_ == 0.0) return;  // pure shifted Gamma: closed-form cdf
    const double lo = std::log(boost::math::gamma_p_inv(shape_, 1e-13) / rate_);
    const double hi = std::log(boost::math::gamma_q_inv(shape_, 1e-13) / rate_);
    const auto rule = gauss_legendre(kPointsPerPanel);
    const double lg = std::lgamma(shape_);

    auto make = [&](std::size_t panels) {
        auto t = std::make_shared<Table>();
        const double width = (hi - lo) / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p) {
            const double a = lo + width * static_cast<double>(p);
            for (std::size_t j = 0; j < kPointsPerPanel; ++j) {
                const double u = a + 0.5 * width * (rule.nodes[j] + 1.0);
                // g = e^u; dG = g f_G(g) du
                const double g = std::exp(u);
                t->nodes.push_back(g);
                t->weights.push_back(0.5 * width * rule.weights[j] *
                                     std::exp(shape_ * std::log(rate_ * g) - rate_ * g - lg));
            }
        }
        return std::shared_ptr<const Table>(t);
    };

    const double scale = std::sqrt(target_s2_);
    std::vector<double> probes;
    for (int k = -8; k <= 8; ++k) probes.push_back(0.5 * k * scale);

    std::size_t panels = 4;
    table_ = make(panels);
    for (;;) {
        const auto coarse = table_;
        const auto finer = make(2 * panels);
        double diff = 0.0;
        for (double x : probes) {
            table_ = coarse;
            const double f_coarse = cdf(x);
            table_ = finer;
            diff = std::max(diff, std::abs(cdf(x) - f_coarse));
        }
        panels *= 2;
        if (diff < kTableTol) break;
        if (panels >= kMaxPanels)
            throw AccuracyError(cdf(0.0), diff, "surrogate: cdf table did not converge");
    }
}

double SurrogateLaw::cdf(double x) const {
    if (sign_ == SkewSign::none) return normal_cdf(x / std::sqrt(sigma_z2_));
    const double m = shape_ / rate_;
    const bool pos = sign_ == SkewSign::positive;
    // P(sign (G - m) <= y)
    auto shifted_gamma_cdf = [&](double y) {
        if (pos) {
            const double g = y + m;
            return g <= 0.0 ? 0.0 : boost::math::gamma_p(shape_, rate_ * g);
        }
        const double g = m - y;
        return g <= 0.0 ? 1.0 : boost::math::gamma_q(shape_, rate_ * g);
    };
    if (sigma_z2_ == 0.0) return shifted_gamma_cdf(x);

    const double inv_sigma = 1.0 / std::sqrt(sigma_z2_);
    CompensatedSum acc;
    const auto& t = *table_;
    for (std::size_t j = 0; j < t.nodes.size(); ++j) {
        const double shift = pos ? t.nodes[j] - m : m - t.nodes[j];
        acc.add(t.weights[j] * normal_cdf((x - shift) * inv_sigma));
    }
    return std::clamp(acc.value(), 0.0, 1.0);
}

std::vector<double> SurrogateLaw::sample(const StreamKey& key, std::size_t count) const {
    RandomStream rng(key);
    std::vector<double> out(count);
    const double sigma = std::sqrt(sigma_z2_);
    const double m = rate_ > 0.0 ? shape_ / rate_ : 0.0;
    for (auto& x : out) {
        double v = sigma * rng.normal();
        if (sign_ != SkewSign::none) {
            const double g = rng.gamma(shape_) / rate_ - m;
            v += sign_ == SkewSign::positive ? g : -g;
        }
        x = v;
    }
    return out;
}

}  // namespace edgelab
