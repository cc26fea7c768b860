#pragma once

#include "edgelab/numerics.hpp"

#include <functional>
#include <vector>

namespace edgelab {

/// Which coefficient multiplies (1 - x^2/s^2) phi(x/s):
///  literal   -> kappa_n^3 as printed in the expansion,
///  classical -> kappa_n^3 / (6 s^3), the textbook one-term Edgeworth term.
enum class EdgeworthMode { literal, classical };

/// One-term Edgeworth expansion
///   Psi(x) = Phi(x/s) + c (1 - x^2/s^2) phi(x/s)
/// and the signed measure it induces.
class EdgeworthApprox {
public:
    /// Throws ParameterError unless s > 0.
    EdgeworthApprox(double s, double k3, EdgeworthMode mode);

    double s() const noexcept { return s_; }
    double k3() const noexcept { return k3_; }
    EdgeworthMode mode() const noexcept { return mode_; }
    double coefficient() const noexcept { return c_; }

    double cdf(double x) const noexcept;
    /// Signed density phi(x/s)/s + c phi(x/s) (x^3/s^4 - 3x/s^2).
    double density(double x) const noexcept;

    /// False when the density turns negative inside |x| <= 5s, i.e. the
    /// returned cdf may decrease somewhere that matters.
    bool monotone() const noexcept;

private:
    double s_;
    double k3_;
    EdgeworthMode mode_;
    double c_;
};

/// Payoff integrated against the expansion; `kinks` are points where the
/// payoff is not smooth and quadrature panels must split.
struct Payoff {
    std::function<double(double)> fn;
    std::vector<double> kinks;

    static Payoff constant(double c);
    static Payoff monomial(int power);
    /// max(K - e^{x + drift}, 0), kink at ln K - drift.
    static Payoff put(double strike, double drift);
};

/// Integral of payoff(x) against the signed density over
/// [-(10s + max|kink|), 10s + max|kink|], split at kinks.
/// Throws AccuracyError (with the achieved estimate) on non-convergence.
double expectation(const EdgeworthApprox& a, const Payoff& payoff,
                   const QuadratureConfig& quad = {1e-11, 0.0, 20000});

}  // namespace edgelab
