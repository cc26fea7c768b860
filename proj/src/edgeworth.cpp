#include "edgelab/edgeworth.hpp"

#include "edgelab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace edgelab {

namespace {
// max over |u| <= 5 of |u^3 - 3u| is 110 (at u = 5).
constexpr double kMonotoneBound = 1.0 / 110.0;
}  // namespace

EdgeworthApprox::EdgeworthApprox(double s, double k3, EdgeworthMode mode)
    : s_(s), k3_(k3), mode_(mode) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ParameterError("edgeworth: s must be > 0");
    if (!std::isfinite(k3)) throw ParameterError("edgeworth: k3 must be finite");
    c_ = mode == EdgeworthMode::literal ? k3 : k3 / (6.0 * s * s * s);
}

double EdgeworthApprox::cdf(double x) const noexcept {
    const double u = x / s_;
    return normal_cdf(u) + c_ * (1.0 - u * u) * normal_pdf(u);
}

double EdgeworthApprox::density(double x) const noexcept {
    const double u = x / s_;
    return normal_pdf(u) * (1.0 + c_ * (u * u * u - 3.0 * u)) / s_;
}

bool EdgeworthApprox::monotone() const noexcept { return std::abs(c_) <= kMonotoneBound; }

Payoff Payoff::constant(double c) {
    return {[c](double) { return c; }, {}};
}

Payoff Payoff::monomial(int power) {
    return {[power](double x) { return std::pow(x, power); }, {}};
}

Payoff Payoff::put(double strike, double drift) {
    if (!(strike > 0.0)) throw ParameterError("put: strike must be > 0");
    return {[strike, drift](double x) { return std::max(strike - std::exp(x + drift), 0.0); },
            {std::log(strike) - drift}};
}

double expectation(const EdgeworthApprox& a, const Payoff& payoff, const QuadratureConfig& quad) {
    double reach = 0.0;
    for (double k : payoff.kinks) reach = std::max(reach, std::abs(k));
    const double half = 10.0 * a.s() + reach;
    auto integrand = [&](double x) { return payoff.fn(x) * a.density(x); };
    // The density is concentrated on a few multiples of s; break there too so
    // wide ranges do not hide the mass from the first Kronrod panel.
    std::vector<double> breaks = payoff.kinks;
    for (double m : {-5.0, -2.0, 0.0, 2.0, 5.0}) breaks.push_back(m * a.s());
    return integrate_split(integrand, -half, half, breaks, quad).value;
}

}  // namespace edgelab
