#include "edgelab/diagnostics.hpp"
#include "edgelab/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>

using namespace edgelab;

namespace {

GarchSpec garch11(double w, double u, double b, double a) {
    GarchSpec g;
    g.g = {{w, u}};
    g.c = {{b, a}};
    return g;
}

ModelConfig model(FamilyVariant fam, DistSpec eps, std::size_t n = 1) {
    ModelConfig cfg;
    cfg.family = std::move(fam);
    cfg.innovation = eps;
    cfg.n = n;
    return cfg;
}

std::vector<std::size_t> lag_range(std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> out;
    for (std::size_t l = lo; l <= hi; ++l) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("memoryless GARCH has no dependence") {
    const auto cfg = model(garch11(1.0, 0.2, 0.0, 0.0), StandardNormal{});
    const auto lags = lag_range(1, 5);
    const auto prof = dependence_profile(cfg, 2.0, lags, 2000, StreamKey(1));
    for (double t : prof.theta_hat) CHECK(t == 0.0);
    CHECK(prof.degenerate);
    CHECK_FALSE(prof.fitted);
    CHECK_THROWS_AS(dependence_profile(cfg, 2.0, lags, 10, StreamKey(1)), SampleSizeError);
    CHECK_THROWS_AS(dependence_profile(cfg, 0.5, lags, 2000, StreamKey(1)), ParameterError);
}

TEST_CASE("geometric linear dependence matches the closed-form tail") {
    LinearSpec l;
    l.kernel = GeometricKernel{0.5};
    const auto cfg = model(l, StandardNormal{});
    const auto lags = lag_range(1, 4);
    const auto prof = dependence_profile(cfg, 2.0, lags, 50000, StreamKey(2), 0);
    for (std::size_t j = 0; j < lags.size(); ++j) {
        // sqrt(2 sum_{i >= l} 4^-i)
        const double expect = std::sqrt(2.0 * std::pow(4.0, -double(lags[j])) * 4.0 / 3.0);
        CAPTURE(lags[j]);
        CHECK(std::abs(prof.theta_hat[j] - expect) < 3.0 * prof.theta_se[j]);
    }
    CHECK(prof.theta_hat[0] == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(0.02));
    CHECK(prof.fitted);
    CHECK(prof.fit.slope == doctest::Approx(std::log(0.5)).epsilon(0.05));
}

TEST_CASE("GARCH dependence decays geometrically") {
    const auto cfg = model(garch11(0.1, 0.1, 0.8, 0.0), StandardNormal{});
    const auto lags = lag_range(1, 20);
    const auto prof = dependence_profile(cfg, 2.0, lags, 10000, StreamKey(3), 0);
    REQUIRE(prof.fitted);
    CHECK(prof.fit.slope < 0.0);
    CHECK(prof.fit.r2 > 0.9);
    CHECK(prof.theta_hat.back() < 0.02 * prof.theta_hat.front());
}

TEST_CASE("Holder bound dominates the transformed profile") {
    // f(y) = y^2 is in H(1, 1, 1); with p = 1 the bound uses L2 norms of Y.
    auto cfg = model(garch11(0.1, 0.1, 0.8, 0.0), StandardNormal{});
    cfg.transform.variant = PowerTransform{2.0, false};
    cfg.transform.holder = {1.0, 1.0, 1.0};
    const auto lags = lag_range(1, 8);
    const auto px = dependence_profile(cfg, 1.0, lags, 20000, StreamKey(4), 0);
    const auto py = dependence_profile(cfg, 2.0, lags, 20000, StreamKey(4), 0);
    // E Y^2 = 1 for this model.
    const auto bound = holder_dependence_bound(1.0, 1.0, 1.0, 1.0, 1.0, py.y_theta_hat);
    for (std::size_t j = 0; j < lags.size(); ++j) {
        CAPTURE(lags[j]);
        CHECK(px.theta_hat[j] <= bound[j] + 4.0 * std::hypot(px.theta_se[j], 3.0 * py.y_theta_se[j]));
    }
}

TEST_CASE("Holder bound arithmetic") {
    const std::vector<double> d{0.1, 0.0, 0.4};
    const auto lip = holder_dependence_bound(1.0, 0.0, 1.0, 1.0, 5.0, d);
    CHECK(lip[0] == doctest::Approx(0.3));
    CHECK(lip[1] == 0.0);
    CHECK(lip[2] == doctest::Approx(1.2));
    const std::vector<double> one{0.1};
    CHECK(holder_dependence_bound(1.0, 1.0, 1.0, 1.0, 2.0, one)[0] == doctest::Approx(0.5));
    CHECK_THROWS_AS(holder_dependence_bound(1.0, 0.0, 0.5, 1.0, 1.0, one), ParameterError);
}

TEST_CASE("gamma_c closed form and Monte Carlo") {
    CHECK(gamma_c(garch11(0.1, 0.0, 0.0, 0.0), StandardNormal{}, 2.0).value == 0.0);
    const auto spec = garch11(0.1, 0.1, 0.8, 0.1);
    const auto g = gamma_c(spec, StandardNormal{}, 2.0, NormMethod::analytic);
    CHECK(std::abs(g.value - std::sqrt(0.83)) < 1e-12);
    CHECK(g.value == doctest::Approx(0.91104).epsilon(1e-5));
    CHECK(garch_stationary(g));
    const auto q = gamma_c(spec, StandardNormal{}, 2.0, NormMethod::quadrature);
    CHECK(q.value == doctest::Approx(g.value).epsilon(1e-10));
    const auto mc = gamma_c(spec, StandardNormal{}, 2.0, NormMethod::monte_carlo, StreamKey(5));
    CHECK(std::abs(mc.value - g.value) < 3.0 * mc.se);

    const auto big = gamma_c(garch11(0.1, 0.1, 0.8, 0.5), StandardNormal{}, 2.0);
    CHECK(big.value == doctest::Approx(std::sqrt(2.19)));
    CHECK_FALSE(garch_stationary(big));

    // Non-integer order falls back to quadrature; compare with Monte Carlo.
    const auto frac = gamma_c(spec, CenteredExponential{1.0}, 2.5);
    CHECK(frac.method == NormMethod::quadrature);
    const auto frac_mc = gamma_c(spec, CenteredExponential{1.0}, 2.5, NormMethod::monte_carlo, StreamKey(6));
    CHECK(std::abs(frac.value - frac_mc.value) < 3.0 * frac_mc.se);
    CHECK_THROWS_AS(gamma_c(spec, StandardNormal{}, 2.5, NormMethod::analytic), ParameterError);
}

TEST_CASE("contraction coefficient of the iterated map") {
    IteratedSpec s;
    s.a = 0.5;
    s.c = 0.0;
    s.d = 0.0;
    auto c = contraction_coefficient(s, StandardNormal{}, 2.0, 0.1);
    CHECK(c.lq_norm == doctest::Approx(0.5));
    CHECK(c.smallball_sup == doctest::Approx(0.5));
    CHECK(c.pass);
    s.a = 0.3;
    s.c = 0.2;
    c = contraction_coefficient(s, StandardNormal{}, 3.0, 0.1);
    CHECK(c.lq_norm == doctest::Approx(0.5));
    s.a = 0.5;
    s.c = 0.0;
    s.d = 0.4;
    c = contraction_coefficient(s, Uniform{-1.0, 1.0}, 2.0, 0.1);
    CHECK(c.lq_norm == doctest::Approx(std::sqrt(0.25 + 0.2 + 0.16 / 3.0)).epsilon(1e-10));
    CHECK(c.smallball_sup == doctest::Approx(0.54));
    s.d = 1.0;
    CHECK_FALSE(contraction_coefficient(s, StandardNormal{}, 2.0, 0.1).pass);
}

TEST_CASE("small-ball condition on the innovation") {
    CHECK(small_ball_v1(StandardNormal{}));
    CHECK(small_ball_v1(CenteredExponential{1.0}));
    CHECK(small_ball_v1(Uniform{-1.0, 1.0}));
    CHECK_FALSE(small_ball_v1(Uniform{0.5, 1.0}));
    CHECK_FALSE(small_ball_v1(TwoPoint{0.5, -1.0, 1.0}));
    CHECK(small_ball_v1(ThreePoint{0.25, 0.5, -1.0, 0.0, 1.0}));
}

TEST_CASE("non-lattice check") {
    const auto cfg = model(garch11(0.1, 0.1, 0.8, 0.0), StandardNormal{});
    const std::vector<double> xi{0.0, 1.0, 2.0};
    const auto nl = nonlattice_check(cfg, xi, 4000, 0, StreamKey(7), 0);
    CHECK(nl.estimate[0] == doctest::Approx(1.0));
    CHECK(nl.pass);
    // Oracle: E exp(-V^2 / 2) over independent stationary draws.
    std::vector<double> v(4000);
    for (std::uint32_t o = 0; o < v.size(); ++o)
        v[o] = std::exp(-0.5 * std::pow(draw_stationary(cfg, StreamKey(8, {o})).v, 2));
    const auto oracle = testing::mean_of(v);
    CHECK(nl.estimate[1] < 1.0);
    CHECK(std::abs(nl.estimate[1] - oracle.value) < 4.0 * std::hypot(oracle.se, nl.se[1]));

    const auto lattice = model(GarchSpec{}, TwoPoint{0.5, -1.0, 1.0});
    const std::vector<double> pi{std::numbers::pi};
    const auto bad = nonlattice_check(lattice, pi, 100, 0, StreamKey(9));
    CHECK(bad.estimate[0] == doctest::Approx(1.0));
    CHECK_FALSE(bad.pass);

    auto skew = model(garch11(0.1, 0.1, 0.8, 0.0), CenteredExponential{1.0});
    skew.transform.variant = PowerTransform{1.0, true};
    const auto mc = nonlattice_check(skew, xi, 200, 2000, StreamKey(10), 0);
    CHECK(mc.pass);
    CHECK_THROWS_AS(nonlattice_check(skew, xi, 100000, 10000, StreamKey(10)), CapacityError);
}

TEST_CASE("almost-martingale residual rates") {
    const std::vector<std::size_t> ns{64, 128, 256, 512};
    const std::vector<double> vs{0.5, 0.75, 1.0};
    auto cfg = model(GarchSpec{}, TwoPoint{0.5, -1.0, 1.0});
    cfg.transform.variant = CompensatorTransform{3};
    const auto sym = martingale_residual(cfg, ns, vs);
    CHECK(sym.log2_slope == doctest::Approx(-2.0).epsilon(0.15));
    // Closed form for the two atoms at v = 1 (the largest residual here).
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double t = 1.0 / std::sqrt(double(ns[i]));
        auto f = [&](double y) { return y - y * y * t / 2.0 - (2.0 / 3.0) * y * y * y * t * t; };
        double sup = 0.0;
        for (double v : vs) sup = std::max(sup, std::abs(0.5 * (std::exp(f(v) * t) + std::exp(f(-v) * t)) - 1.0));
        CHECK(sym.residual[i] == doctest::Approx(sup).epsilon(1e-8));
    }

    cfg.innovation = CenteredExponential{1.0};
    const auto skew = martingale_residual(cfg, ns, vs);
    CHECK(std::abs(skew.log2_slope + 1.5) < 0.3);
    const auto mc = martingale_residual(cfg, std::span(ns).first(1), vs, ResidualMethod::monte_carlo,
                                        1000000, StreamKey(11));
    CHECK(mc.residual[0] == doctest::Approx(skew.residual[0]).epsilon(0.1));

    cfg.innovation = StandardNormal{};
    cfg.transform.variant = CompensatorTransform{2};
    const auto o2 = martingale_residual(cfg, ns, vs);
    CHECK(o2.log2_slope < -0.9);
    CHECK(o2.log2_slope > -2.3);

    cfg.transform.variant = IdentityTransform{};
    CHECK_THROWS_AS(martingale_residual(cfg, ns, vs), ParameterError);
}

TEST_CASE("kernel summability") {
    LinearSpec l;
    l.kernel = GeometricKernel{0.5};
    CHECK(linear_summability(l, 1.0).finite);
    l.kernel = GeometricKernel{1.0};
    CHECK_FALSE(linear_summability(l, 1.0).finite);
    l.kernel = PolynomialKernel{2.0};
    CHECK(linear_summability(l, 2.0).finite);
    CHECK_FALSE(linear_summability(l, 1.0).finite);
    l.kernel = ExplicitKernel{{1.0, 0.5, 0.25}};
    const auto e = linear_summability(l, 1.0);
    CHECK(e.finite);
    CHECK(e.partial_sum == doctest::Approx(0.5 + 4.0 * 0.25));

    VolterraSpec v;
    v.kappa = GeometricKernel{0.5};
    const auto g = volterra_summability(v, 1.0, 1.0);
    CHECK(g.finite);
    CHECK(g.tail_share < 1e-3);
    v.kappa = PolynomialKernel{1.5};
    CHECK_FALSE(volterra_summability(v, 1.0, 1.0).finite);
    v.kappa = PolynomialKernel{5.0};
    CHECK(volterra_summability(v, 1.0, 1.0).finite);
}

TEST_CASE("volterra kernel mass for a two-term kernel") {
    // kappa = (1, 0.5), order 2: A_{1,1} = 0.5, A_{1,2} = 0.5 * 1; term k = 1 is
    // 1 * (q * 0.5 + q^2 * 0.5)^beta.
    VolterraSpec v;
    v.kappa = ExplicitKernel{{1.0, 0.5}};
    v.m_max = 2;
    const auto s = volterra_summability(v, 2.0, 1.0);
    CHECK(s.partial_sum == doctest::Approx(2.0 * 0.5 + 4.0 * 0.5));
}

TEST_CASE("innovation norms and coefficient small-ball") {
    CHECK(innovation_norm(StandardNormal{}, 4.0) == doctest::Approx(std::pow(3.0, 0.25)));
    CHECK(innovation_norm(Uniform{-1.0, 1.0}, 3.0) == doctest::Approx(std::pow(0.25, 1.0 / 3.0)));
    CHECK(garch_coefficient_smallball(garch11(0.1, 0.1, 0.8, 0.1), StandardNormal{}, 2.0, 0.1));
}

TEST_CASE("assumption reports per family") {
    const AssumptionOptions opt{0.1, {0.5, 1.0, 2.0}, 500, 500};
    auto names = [](const AssumptionReport& r) {
        std::vector<std::string> out;
        for (const auto& i : r.items) out.push_back(i.name);
        return out;
    };
    const auto g = check_assumptions(model(garch11(0.1, 0.1, 0.8, 0.1), StandardNormal{}), opt, StreamKey(12));
    CHECK(g.all_pass());
    CHECK(names(g) == std::vector<std::string>{"V1", "lambda>=1/2", "gamma_c<1", "c_i small-ball", "B2 non-lattice"});

    const auto lat = check_assumptions(model(GarchSpec{}, TwoPoint{0.5, -1.0, 1.0}), opt, StreamKey(13));
    CHECK_FALSE(lat.all_pass());

    IteratedSpec it;
    it.a = 0.5;
    it.d = 0.2;
    CHECK(check_assumptions(model(it, Uniform{-1.0, 1.0}), opt, StreamKey(14)).all_pass());
    LinearSpec l;
    CHECK(check_assumptions(model(l, StandardNormal{}), opt, StreamKey(15)).all_pass());
    VolterraSpec v;
    CHECK(check_assumptions(model(v, StandardNormal{}), opt, StreamKey(16)).all_pass());
}
