#include "edgelab/errors.hpp"
#include "edgelab/metrics.hpp"
#include "edgelab/surrogate.hpp"
#include "support.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

using namespace edgelab;

namespace {

// P(L <= x) = E P(sign (G - m) <= x - sigma Z), integrated over z with
// Gauss-Kronrod and split where the shifted Gamma cdf leaves its flat part;
// independent of the library's tabulated mixture.
double oracle_cdf(const SurrogateLaw& law, double x) {
    const double a = law.gamma_shape(), b = law.gamma_rate(), m = a / b;
    const double sz = std::sqrt(law.sigma_z2());
    const bool pos = law.sign() == SkewSign::positive;
    auto h = [&](double z) {
        const double y = x - sz * z;
        const double g = pos ? y + m : m - y;
        const double c = g <= 0.0 ? 0.0 : boost::math::gamma_p(a, b * g);
        return testing::phi(z) * (pos ? c : 1.0 - c);
    };
    const double kink = pos ? (x + m) / sz : (x - m) / sz;
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    double total = 0.0;
    double lo = -40.0;
    for (double hi : {std::clamp(kink, -40.0, 40.0), 40.0}) {
        if (hi > lo) total += GK::integrate(h, lo, hi, 12, 1e-12);
        lo = std::max(lo, hi);
    }
    return total;
}

}  // namespace

TEST_CASE("zero skewness is Gaussian") {
    const auto law = SurrogateLaw::from_cumulants(1.0, 0.0);
    CHECK(law.sign() == SkewSign::none);
    CHECK(law.sigma_z2() == 1.0);
    CHECK(law.cdf(0.0) == 0.5);
    CHECK(law.cdf(1.0) == doctest::Approx(testing::Phi(1.0)).epsilon(1e-14));
    CHECK(law.cumulants().variance == 1.0);
    CHECK(law.cumulants().k3 == 0.0);
}

TEST_CASE("closed-form solve") {
    const auto law = SurrogateLaw::from_cumulants(1.0, 0.02);
    CHECK(law.gamma_rate() == doctest::Approx(10.0));
    CHECK(law.gamma_shape() == doctest::Approx(10.0));
    CHECK(law.sigma_z2() == doctest::Approx(0.9));
    CHECK(law.sign() == SkewSign::positive);
    CHECK(law.cumulants().variance == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(law.cumulants().k3 == doctest::Approx(0.02).epsilon(1e-12));
    const auto neg = SurrogateLaw::from_cumulants(4.0, -0.5);
    CHECK(neg.sign() == SkewSign::negative);
    CHECK(neg.cumulants().variance == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(neg.cumulants().k3 == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("infeasible skewness reports the bound") {
    try {
        SurrogateLaw::from_cumulants(1.0, 3.0);
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        CHECK(e.max_abs_k3() == doctest::Approx(2.0));
    }
    CHECK_THROWS_AS(SurrogateLaw::from_cumulants(0.0, 0.0), ParameterError);
    CHECK_NOTHROW(SurrogateLaw::from_cumulants(1.0, 2.0));
    CHECK(SurrogateLaw::max_abs_k3(3.0) == 6.0);
}

TEST_CASE("round trip over random feasible pairs") {
    RandomStream rng(StreamKey(1));
    for (int i = 0; i < 1000; ++i) {
        const double s2 = std::exp(4.0 * rng.uniform() - 2.0);
        const double k3 = (2.0 * rng.uniform() - 1.0) * 2.0 * s2;
        const auto c = SurrogateLaw::from_cumulants(s2, k3).cumulants();
        REQUIRE(std::abs(c.variance - s2) <= 1e-12 * s2);
        REQUIRE(std::abs(c.k3 - k3) <= 1e-12 * std::abs(k3));
    }
}

TEST_CASE("sample moments") {
    const auto g = SurrogateLaw::from_cumulants(1.0, 0.0).sample(StreamKey(2), 1000000);
    const auto v = testing::variance_of(g);
    CHECK(std::abs(v.value - 1.0) < 3.0 * v.se);
    for (double k3 : {0.02, -0.02}) {
        CAPTURE(k3);
        const auto x = SurrogateLaw::from_cumulants(1.0, k3).sample(StreamKey(3, {k3 > 0}), 10000000);
        const auto m3 = testing::third_central(x);
        CHECK(std::abs(m3.value - k3) < 3.0 * m3.se);
    }
}

TEST_CASE("cdf against an independent quadrature") {
    for (auto [s2, k3] : {std::pair{1.0, 0.02}, {1.0, 0.6}, {2.0, -1.5}, {0.5, 0.99}, {1.0, 1.99}}) {
        CAPTURE(s2);
        CAPTURE(k3);
        const auto law = SurrogateLaw::from_cumulants(s2, k3);
        for (double x : {-3.0, -1.0, -0.2, 0.0, 0.5, 1.5, 4.0})
            CHECK(std::abs(law.cdf(x) - oracle_cdf(law, x)) < 1e-9);
    }
}

TEST_CASE("cdf against the empirical cdf") {
    const auto law = SurrogateLaw::from_cumulants(1.0, 0.02);
    const auto x = law.sample(StreamKey(4), 10000000);
    double below = 0.0;
    for (double v : x) below += v <= 0.0;
    CHECK(std::abs(below / double(x.size()) - law.cdf(0.0)) < 4e-4);
}

TEST_CASE("sampler and cdf agree in the KS sense") {
    for (double k3 : {0.3, -1.2}) {
        const auto law = SurrogateLaw::from_cumulants(1.0, k3);
        const auto s = testing::sorted(law.sample(StreamKey(5, {k3 > 0}), 100000));
        CHECK(kolmogorov_distance(s, [&](double t) { return law.cdf(t); }, 0) <
              testing::ks_critical_1pct(s.size()));
    }
}

TEST_CASE("Gaussian limit as the skewness vanishes") {
    double prev = 1.0;
    for (double k3 : {0.5, 0.1, 0.02, 0.004}) {
        const auto law = SurrogateLaw::from_cumulants(1.0, k3);
        double sup = 0.0;
        for (double x = -6.0; x <= 6.0; x += 0.05) sup = std::max(sup, std::abs(law.cdf(x) - testing::Phi(x)));
        CHECK(sup < prev);
        prev = sup;
    }
    CHECK(prev < 1e-3);
}
