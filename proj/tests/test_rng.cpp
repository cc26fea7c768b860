#include "edgelab/errors.hpp"
#include "edgelab/metrics.hpp"
#include "edgelab/parallel.hpp"
#include "edgelab/rng.hpp"
#include "support.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

using namespace edgelab;
using testing::Estimate;

namespace {

std::vector<double> draws(const StreamKey& key, std::size_t n) {
    RandomStream rng(key);
    std::vector<double> out(n);
    for (auto& x : out) x = rng.uniform();
    return out;
}

}  // namespace

TEST_CASE("stream is a pure function of its key") {
    const StreamKey k(7, {1, 2, 3});
    CHECK(draws(k, 1000) == draws(StreamKey(7, {1, 2, 3}), 1000));
    CHECK(draws(k, 1000) != draws(StreamKey(7, {1, 2, 4}), 1000));
    CHECK(draws(StreamKey(7, {1}), 10) != draws(StreamKey(7, {1, 0}), 10));
    CHECK(draws(StreamKey(7), 10) != draws(StreamKey(8), 10));
    CHECK(k.child(9).to_string() == "7/1/2/3/9");
}

TEST_CASE("streams derived inside worker threads match the serial ones") {
    std::vector<std::vector<double>> serial(64), threaded(64);
    for (std::size_t r = 0; r < 64; ++r) serial[r] = draws(StreamKey(3).child(r), 100);
    parallel_for(64, 8, [&](std::size_t r) { threaded[r] = draws(StreamKey(3).child(r), 100); });
    CHECK(serial == threaded);
}

TEST_CASE("uniform lies in [0, 1) and uniform_open in (0, 1)") {
    RandomStream rng(StreamKey(1));
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        const double v = rng.uniform_open();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
    }
}

TEST_CASE("symmetric two-point sample mean") {
    RandomStream rng(StreamKey(11));
    const auto x = sample(rng, TwoPoint{0.5, -1.0, 1.0}, 1000000);
    CHECK(std::abs(testing::mean_of(x).value) < 4e-3);
}

TEST_CASE("centered exponential third central moment is 2") {
    RandomStream rng(StreamKey(12));
    const auto x = sample(rng, CenteredExponential{1.0}, 1000000);
    const Estimate m3 = testing::third_central(x);
    CHECK(std::abs(m3.value - 2.0) < 3.0 * m3.se);
    CHECK(std::abs(testing::mean_of(x).value) < 4.0 * testing::mean_of(x).se);
}

TEST_CASE("gamma(10, 10) mean and variance") {
    RandomStream rng(StreamKey(13));
    const auto x = sample(rng, GammaDist{10.0, 10.0}, 1000000);
    const Estimate m = testing::mean_of(x);
    const Estimate v = testing::variance_of(x);
    CHECK(std::abs(m.value - 1.0) < 3.0 * m.se);
    CHECK(std::abs(v.value - 0.1) < 3.0 * v.se);
}

TEST_CASE("gamma sampler passes KS against the regularized incomplete gamma") {
    for (double shape : {0.3, 1.0, 2.5, 40.0}) {
        CAPTURE(shape);
        RandomStream rng(StreamKey(14, {static_cast<std::uint32_t>(shape * 10)}));
        std::vector<double> x(100000);
        for (auto& g : x) g = rng.gamma(shape);
        const auto s = testing::sorted(x);
        const double d = kolmogorov_distance(
            s, [shape](double t) { return t <= 0.0 ? 0.0 : boost::math::gamma_p(shape, t); }, 0);
        CHECK(d < testing::ks_critical_1pct(x.size()));
    }
}

TEST_CASE("normal sampler passes KS") {
    RandomStream rng(StreamKey(15));
    std::vector<double> x(100000);
    for (auto& z : x) z = rng.normal();
    const auto s = testing::sorted(x);
    CHECK(kolmogorov_distance(s, testing::Phi, 0) < testing::ks_critical_1pct(x.size()));
}

TEST_CASE("closed-form moments match the laws") {
    const DistSpec u = Uniform{-1.0, 1.0};
    CHECK(u.raw_moment(2) == doctest::Approx(1.0 / 3.0));
    CHECK(u.raw_moment(4) == doctest::Approx(0.2));
    const DistSpec n = StandardNormal{};
    CHECK(n.raw_moment(4) == doctest::Approx(3.0));
    CHECK(n.raw_moment(3) == 0.0);
    const DistSpec e = CenteredExponential{1.0};
    CHECK(e.mean() == doctest::Approx(0.0));
    CHECK(e.raw_moment(2) == doctest::Approx(1.0));
    CHECK(e.raw_moment(3) == doctest::Approx(2.0));
    CHECK(e.raw_moment(4) == doctest::Approx(9.0));
    const DistSpec t = ThreePoint{1.0 / 3.0, 2.0 / 3.0, 2.0, -1.0, 0.0};
    CHECK(t.mean() == doctest::Approx(0.0));
    CHECK(t.raw_moment(2) == doctest::Approx(2.0));
    CHECK(t.raw_moment(3) == doctest::Approx(2.0));
    const DistSpec g = GammaDist{10.0, 10.0};
    CHECK(g.mean() == doctest::Approx(1.0));
    CHECK(g.variance() == doctest::Approx(0.1));
}

TEST_CASE("two-point probability refers to the upper atom") {
    const DistSpec d = TwoPoint{0.25, -1.0, 3.0};
    CHECK(d.mean() == doctest::Approx(0.25 * 3.0 - 0.75));
    const auto atoms = d.atoms();
    REQUIRE(atoms.size() == 2);
}

TEST_CASE("invalid laws are rejected") {
    CHECK_THROWS_AS(DistSpec(TwoPoint{1.5, -1.0, 1.0}).validate(), ParameterError);
    CHECK_THROWS_AS(DistSpec(ThreePoint{0.7, 0.6, 0.0, 1.0, 2.0}).validate(), ParameterError);
    CHECK_THROWS_AS(DistSpec(CenteredExponential{0.0}).validate(), ParameterError);
    CHECK_THROWS_AS(DistSpec(GammaDist{-1.0, 1.0}).validate(), ParameterError);
    CHECK_THROWS_AS(DistSpec(Uniform{1.0, 1.0}).validate(), ParameterError);
    CHECK_THROWS_AS(DistSpec(TwoPoint{}).pdf(0.0), ParameterError);
}
