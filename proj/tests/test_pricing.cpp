#include "edgelab/errors.hpp"
#include "edgelab/moments.hpp"
#include "edgelab/pricing.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace edgelab;

namespace {

// V = s exactly with normal innovations: S_n / sqrt(n) ~ N(0, s^2).
ModelConfig gaussian_model(double s, std::size_t n) {
    ModelConfig cfg;
    GarchSpec g;
    g.g = {{s * s, 0.0}};
    cfg.family = g;
    cfg.n = n;
    return cfg;
}

// E max(K - exp(Z + drift), 0), Z ~ N(0, s^2), by Simpson over z.
double oracle_put(double s, double K, double drift) {
    return testing::simpson(
        [&](double z) { return std::max(K - std::exp(s * z + drift), 0.0) * testing::phi(z); },
        -12.0, 12.0, 2000000);
}

}  // namespace

TEST_CASE("Gaussian closed form against quadrature") {
    for (double K : {0.9, 1.0, 1.1}) {
        CAPTURE(K);
        CHECK(std::abs(price_put_gaussian_oracle(0.2, K, -0.02) - oracle_put(0.2, K, -0.02)) < 1e-8);
    }
    CHECK(price_put_gaussian_oracle(1e-8, std::exp(-0.3), -0.3) < 1e-8);
    CHECK(price_put_gaussian_oracle(0.2, 1e9, 0.0) / 1e9 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS_AS(price_put_gaussian_oracle(0.0, 1.0, 0.0), ParameterError);
}

TEST_CASE("Edgeworth price without skewness is the closed form") {
    CumulantEstimate c;
    c.s2 = 0.04;
    c.k3 = 0.0;
    for (double K : {0.5, 0.9, 1.0, 1.1, 2.0})
        CHECK(std::abs(price_put_edgeworth(c, -0.02, K, EdgeworthMode::classical) -
                       price_put_gaussian_oracle(0.2, K, -0.02)) < 1e-6);
    c.s2 = 0.0;
    CHECK_THROWS_AS(price_put_edgeworth(c, 0.0, 1.0, EdgeworthMode::classical), ParameterError);
}

TEST_CASE("deep in-the-money Edgeworth put") {
    // E e^X under the expansion is e^{s^2/2} (1 + c s^3).
    CumulantEstimate c;
    c.s2 = 0.09;
    c.k3 = 0.01;
    const double drift = -0.05, s = 0.3;
    const double K = std::exp(drift) * 1e6;
    for (auto mode : {EdgeworthMode::classical, EdgeworthMode::literal}) {
        const EdgeworthApprox a(s, c.k3, mode);
        const double mean = std::exp(drift + 0.5 * s * s) * (1.0 + a.coefficient() * s * s * s);
        CHECK(std::abs(price_put_edgeworth(c, drift, K, mode) - (K - mean)) < 1e-4 * K);
    }
}

TEST_CASE("Monte Carlo put limits") {
    PricingProblem prob{1e-6, gaussian_model(0.2, 4), -0.02};
    CHECK(price_put_mc(prob, 10000, StreamKey(1)).price == 0.0);
    CHECK_THROWS_AS(price_put_mc(prob, 100, StreamKey(1)), SampleSizeError);

    // f == 0: deterministic price.
    auto flat = gaussian_model(0.2, 4);
    flat.transform.variant = PolynomialTransform{{0.0}};
    flat.transform.centering = 0.0;
    const PricingProblem det{1.1, flat, -0.02};
    const auto p = price_put_mc(det, 10000, StreamKey(2));
    CHECK(p.price == doctest::Approx(1.1 - std::exp(-0.02)).epsilon(1e-14));
    CHECK(p.se < 1e-15);
}

TEST_CASE("Monte Carlo matches the Gaussian closed form") {
    const double s = 0.2;
    for (double K : {0.9, 1.0, 1.1}) {
        const PricingProblem prob{K, gaussian_model(s, 4), -s * s / 2.0};
        const auto p = price_put_mc(prob, 200000, StreamKey(3, {std::uint32_t(K * 10)}), 0);
        CAPTURE(K);
        CHECK(std::abs(p.price - price_put_gaussian_oracle(s, K, -s * s / 2.0)) < 3.0 * p.se);
    }
}

TEST_CASE("drift from the centering") {
    auto cfg = gaussian_model(1.0, 16);
    CHECK(estimate_drift(cfg, 10000, StreamKey(4)).drift == 0.0);
    cfg.transform.variant = CompensatorTransform{2};
    const auto d = estimate_drift(cfg, 100000, StreamKey(5), 0);
    // mu_f = -E Y^2 / (2 sqrt n) = -1/8, drift = sqrt(n) mu_f = -1/2.
    CHECK(std::abs(d.drift + 0.5) < 3.0 * d.se);
}

TEST_CASE("pricers are monotone and 1-Lipschitz in the strike") {
    ModelConfig cfg;
    GarchSpec g;
    g.g = {{0.1, 0.1}};
    g.c = {{0.8, 0.0}};
    cfg.family = g;
    cfg.innovation = CenteredExponential{1.0};
    cfg.n = 64;
    const auto sums = simulate_normalized_sums(cfg, 50000, StreamKey(6), 0);
    const auto est = estimate_cumulants(sums, cfg.n);
    const double s = std::sqrt(est.s2);
    double pm = 0.0, pe = 0.0, pg = 0.0, prevK = 0.0;
    double mean_price = 0.0;
    for (double x : sums) mean_price += std::exp(x);
    mean_price /= double(sums.size());
    for (double K = 0.2; K <= 3.0; K += 0.1) {
        const auto mc = price_put_from_sums(sums, K, 0.0);
        const double ed = price_put_edgeworth(est, 0.0, K, EdgeworthMode::classical);
        const double ga = price_put_gaussian_oracle(s, K, 0.0);
        CAPTURE(K);
        CHECK(mc.price >= pm);
        CHECK(ed >= pe - 1e-12);
        CHECK(ga >= pg);
        if (prevK > 0.0) {
            CHECK(mc.price - pm <= K - prevK + 1e-12);
            CHECK(ed - pe <= K - prevK + 1e-9);
            CHECK(ga - pg <= K - prevK + 1e-12);
        }
        CHECK(mc.price >= std::max(K - mean_price, 0.0) - 3.0 * mc.se);
        pm = mc.price;
        pe = ed;
        pg = ga;
        prevK = K;
    }
}

TEST_CASE("Edgeworth price is at least as close to Monte Carlo as the Gaussian one") {
    ModelConfig cfg;
    GarchSpec g;
    g.g = {{0.1, 0.1}};
    g.c = {{0.8, 0.0}};
    cfg.family = g;
    cfg.innovation = CenteredExponential{1.0};
    cfg.n = 256;
    const auto sums = simulate_normalized_sums(cfg, 100000, StreamKey(7), 0);
    const auto est = estimate_cumulants(sums, cfg.n);
    for (double K : {0.8, 1.0, 1.25}) {
        const auto mc = price_put_from_sums(sums, K, 0.0);
        const double ed = price_put_edgeworth(est, 0.0, K, EdgeworthMode::classical);
        const double ga = price_put_gaussian_oracle(std::sqrt(est.s2), K, 0.0);
        CAPTURE(K);
        CHECK(std::abs(ed - mc.price) <= std::abs(ga - mc.price) + 3.0 * mc.se);
    }
}
