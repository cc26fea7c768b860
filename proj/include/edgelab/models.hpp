#pragma once

#include "edgelab/rng.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace edgelab {

/// g_i(x) = w + u x^2
struct GarchIntercept {
    double w = 0.0;
    double u = 0.0;
    double operator()(double x) const noexcept { return w + u * x * x; }
};

/// c_i(x) = b + a x^2
struct GarchCoefficient {
    double b = 0.0;
    double a = 0.0;
    double operator()(double x) const noexcept { return b + a * x * x; }
};

/// Augmented GARCH with power link Lambda(x) = x^lambda:
///   Lambda(V_k^2) = sum_i g_i(eps_{k+1-i}) + sum_i c_i(eps_{k+1-i}) Lambda(V_{k-i}^2),
/// so that V_k depends on eps_k, eps_{k-1}, ... and Y_k = eps_k V_{k-1}.
/// p = g.size(), q = c.size().
struct GarchSpec {
    double lambda = 1.0;
    std::vector<GarchIntercept> g{{1.0, 0.0}};
    std::vector<GarchCoefficient> c{{0.0, 0.0}};
    std::optional<std::size_t> burn_in;

    std::size_t p() const noexcept { return g.size(); }
    std::size_t q() const noexcept { return c.size(); }
    std::size_t r() const noexcept { return std::max(p(), q()); }
    /// True when every c_i vanishes identically (no volatility feedback).
    bool memoryless() const noexcept;
};

/// V_k = clamp(a V_{k-1} + b eps_k + c sin(V_{k-1}) + d eps_k V_{k-1}, v_min, v_max).
struct IteratedSpec {
    double a = 0.5;
    double b = 1.0;
    double c = 0.0;
    double d = 0.0;
    std::optional<double> v_min;
    std::optional<double> v_max;
    double v0 = 0.0;
    std::optional<std::size_t> burn_in;

    double map(double v, double eps) const noexcept;
};

struct GeometricKernel {
    double r = 0.5;
};
/// a_i = (1 + i)^(-theta)
struct PolynomialKernel {
    double theta = 2.0;
};
struct ExplicitKernel {
    std::vector<double> values;
};
using Kernel = std::variant<GeometricKernel, PolynomialKernel, ExplicitKernel>;

/// a_i for i >= 0; zero past the end of an explicit list.
double kernel_coefficient(const Kernel& k, std::size_t i);

/// Generalised Holder class H(L, alpha, beta):
///   |f(x) - f(y)| <= L |x - y|^beta (1 + |x|^alpha + |y|^alpha).
struct HolderMeta {
    double L = 1.0;
    double alpha = 0.0;
    double beta = 1.0;
};

enum class InnerMap { identity, square, abs };
enum class OuterMapKind { identity, abs, power };

struct OuterMap {
    OuterMapKind kind = OuterMapKind::identity;
    double r = 1.0;  // exponent for `power`: |x|^r
    HolderMeta holder;  // (L_g, gamma, delta)
    double operator()(double x) const noexcept;
};

/// V_k = g(G_k),  G_k = sum_{i < m_max} a_i c(eps_{k-i}).
struct LinearSpec {
    Kernel kernel = GeometricKernel{0.5};
    InnerMap inner = InnerMap::identity;
    OuterMap outer;
    std::size_t m_max = 64;
    std::optional<std::size_t> burn_in;
};

/// V_k = sum_{i=1}^{order} sum_{0 <= j_1 < ... < j_i < m_max} prod_m kappa(j_m) eps_{k-j_m}.
struct VolterraSpec {
    std::size_t order = 2;
    Kernel kappa = GeometricKernel{0.5};
    std::size_t m_max = 32;
    std::optional<std::size_t> burn_in;
};

struct IdentityTransform {};
/// f(x) = x - x^2/(2 sqrt n) [- (2/3) x^3 / n for order 3].
struct CompensatorTransform {
    int order = 2;
};
/// f(x) = |x|^r, or sign(x)|x|^r when `signed_power`.
struct PowerTransform {
    double r = 1.0;
    bool signed_power = false;
};
/// f(x) = sum_j coefficients[j] x^j
struct PolynomialTransform {
    std::vector<double> coefficients;
};
using TransformVariant =
    std::variant<IdentityTransform, CompensatorTransform, PowerTransform, PolynomialTransform>;

struct TransformSpec {
    TransformVariant variant = IdentityTransform{};
    HolderMeta holder;
    /// mu_f = E f(Y); required before simulation unless it is analytically zero.
    std::optional<double> centering;
    double centering_se = 0.0;
};

using FamilyVariant = std::variant<GarchSpec, IteratedSpec, LinearSpec, VolterraSpec>;

struct ModelConfig {
    FamilyVariant family = GarchSpec{};
    DistSpec innovation = StandardNormal{};
    TransformSpec transform;
    std::size_t n = 1;
};

/// Throws ParameterError describing the first violated structural invariant.
void validate(const ModelConfig& cfg);

/// Number of past innovations after which the simulated state is exactly
/// stationary, or nullopt for infinite-memory families.
std::optional<std::size_t> exact_memory(const ModelConfig& cfg);

/// Burn-in actually used: the configured value (checked against the minimum)
/// or 10 x the dependence truncation length, at least 1000 steps.
std::size_t burn_in(const ModelConfig& cfg);

double apply_transform(const TransformSpec& t, double y, std::size_t n);

/// mu_f when E f(Y) = 0 holds analytically (identity map, mean-zero innovations).
std::optional<double> analytic_centering(const ModelConfig& cfg);

/// Stepping interface: consumes eps_k and returns V_k.
class VolatilityStepper {
public:
    virtual ~VolatilityStepper() = default;
    virtual double step(double eps) = 0;
    virtual double current() const noexcept = 0;
    virtual std::unique_ptr<VolatilityStepper> clone() const = 0;
};

std::unique_ptr<VolatilityStepper> make_stepper(const ModelConfig& cfg);

struct Path {
    std::vector<double> x;
    std::vector<double> v;
};

/// x[k] = f(eps_k v[k-1]) - mu_f over k = 0..n-1 after burn-in; v[-1] is the
/// last burn-in volatility. Throws DivergenceError on a non-finite volatility.
Path simulate_path(const ModelConfig& cfg, const StreamKey& key);

enum class CouplingMode { star, prime };

struct CoupledPaths {
    std::vector<double> x;
    std::vector<double> x_coupled;
};

/// Path index reserved for the independent copy eps' of a key.
inline constexpr std::uint32_t kPrimeStreamIndex = 0xFFFFFFFFu;

/// Original path (identical to simulate_path(cfg, key)) and its coupled copy.
/// Innovations with index <= n - 2 - lag are replaced by an independent copy:
/// all of them (star) or only the one at n - 2 - lag (prime). The terminal
/// pair therefore realises lag `lag` as measured from V_{n-2}.
CoupledPaths simulate_coupled(const ModelConfig& cfg, std::size_t lag, CouplingMode mode,
                              const StreamKey& key);

/// Terminal differences X_T - X*_T (and Y_T - Y*_T) for every lag in `lags`,
/// from one original path and one independent star copy sharing a key.
struct CoupledDifferences {
    std::vector<double> dx;
    std::vector<double> dy;
};
CoupledDifferences coupled_terminal_differences(const ModelConfig& cfg,
                                                std::span<const std::size_t> lags,
                                                const StreamKey& key);

/// Partial sum over m <= M of the GARCH expansion of Lambda(V_k^2), where
/// innovations.back() is eps_k. Needs at least M * r innovations.
double garch_volterra_eval(const GarchSpec& spec, std::span<const double> innovations,
                           std::size_t M);

struct CenteringEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t N = 0;
};

/// Monte Carlo mu_f from N independent stationary draws of f(Y); stores the
/// result in cfg.transform.
CenteringEstimate estimate_centering(ModelConfig& cfg, std::size_t N, const StreamKey& key,
                                     std::size_t workers = 1);

/// One stationary draw of (V_{k-1}, eps_k) per replicate key.
struct StationaryDraw {
    double v;
    double eps;
};
StationaryDraw draw_stationary(const ModelConfig& cfg, const StreamKey& key);

/// N replicates of S_n / sqrt(n), replicate r driven by key.child(r).
std::vector<double> simulate_normalized_sums(const ModelConfig& cfg, std::size_t N,
                                             const StreamKey& key, std::size_t workers = 1);

}  // namespace edgelab
