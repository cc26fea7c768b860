#include "edgelab/errors.hpp"
#include "edgelab/numerics.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>

using namespace edgelab;

TEST_CASE("normal cdf and quantile") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.0) == doctest::Approx(0.841344746068543).epsilon(1e-14));
    CHECK(normal_cdf(-40.0) >= 0.0);
    CHECK(normal_cdf(-10.0) == doctest::Approx(7.619853024160527e-24).epsilon(1e-10));
    for (double p : {1e-10, 0.01, 0.3, 0.5, 0.9, 1 - 1e-9})
        CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
    CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014327));
}

TEST_CASE("compensated sum keeps small terms") {
    CompensatedSum s;
    s.add(1.0);
    for (int i = 0; i < 1000; ++i) s.add(1e-16);
    s.add(-1.0);
    CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-6));
}

TEST_CASE("least squares recovers a line") {
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{3, 5, 7, 9};
    const auto fit = least_squares(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.r2 == doctest::Approx(1.0));
}

TEST_CASE("adaptive quadrature against closed forms") {
    auto r = integrate([](double x) { return std::exp(-x * x); }, -10, 10);
    CHECK(r.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
    const std::vector<double> br{0.3};
    auto k = integrate_split([](double x) { return std::abs(x - 0.3); }, 0, 1, br);
    CHECK(k.value == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-12));
    CHECK_THROWS_AS(integrate([](double x) { return 1.0 / std::sqrt(std::abs(x)); }, -1, 1,
                              {1e-14, 0.0, 20}),
                    AccuracyError);
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    const auto r = gauss_legendre(16);
    double s = 0.0;
    for (std::size_t i = 0; i < 16; ++i) s += r.weights[i] * std::pow(r.nodes[i], 30);
    CHECK(s == doctest::Approx(2.0 / 31.0).epsilon(1e-13));
}
