#pragma once

#include "edgelab/models.hpp"
#include "edgelab/numerics.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace edgelab {

// ---------------------------------------------------------------------------
// Dependence decay

struct DependenceProfile {
    double p = 2.0;
    std::vector<std::size_t> lags;
    /// (N^-1 sum |X_T - X*_T|^p)^{1/p} per lag, and its delta-method SE.
    std::vector<double> theta_hat;
    std::vector<double> theta_se;
    /// Same statistic for the untransformed Y = eps V.
    std::vector<double> y_theta_hat;
    std::vector<double> y_theta_se;
    /// log theta_hat = intercept + slope * lag over lags with theta_hat > 5 SE.
    LinearFit fit;
    std::size_t fit_points = 0;
    bool fitted = false;
    /// Every difference was exactly zero; the fit is skipped.
    bool degenerate = false;
    std::size_t N = 0;
};

/// Replicate r uses key.child(r) for both the path and its star copy.
/// ParameterError unless p >= 1, lags non-empty and N >= 1000.
DependenceProfile dependence_profile(const ModelConfig& cfg, double p,
                                     std::span<const std::size_t> lags, std::size_t N,
                                     const StreamKey& key, std::size_t workers = 1);

// ---------------------------------------------------------------------------
// Stationarity and contraction

enum class NormMethod { automatic, analytic, quadrature, monte_carlo };

struct NormEstimate {
    double value = 0.0;
    double se = 0.0;
    NormMethod method = NormMethod::analytic;
};

/// gamma_c = sum_i ||b_i + a_i eps^2||_q. The analytic path (integer q,
/// non-negative coefficients) expands the binomial against the closed-form
/// even moments; non-integer q falls back to quadrature (or an atom sum).
/// monte_carlo uses `mc_draws` draws per coefficient from key.child(i).
NormEstimate gamma_c(const GarchSpec& spec, const DistSpec& innovation, double q,
                     NormMethod method = NormMethod::automatic, const StreamKey& key = StreamKey{},
                     std::size_t mc_draws = 1000000);

/// Stationarity verdict of the representation: gamma_c < 1.
inline bool garch_stationary(const NormEstimate& g) { return g.value < 1.0; }

struct Contraction {
    /// ||L_eps||_q with L_eps = |a| + |c| + |d eps| the Lipschitz factor of
    /// v -> a v + b eps + c sin v + d eps v.
    double lq_norm = 0.0;
    /// sup_{|eps| <= delta} L_eps = |a| + |c| + |d| delta.
    double smallball_sup = 0.0;
    bool pass = false;
};

Contraction contraction_coefficient(const IteratedSpec& spec, const DistSpec& innovation,
                                    double q, double delta);

/// ||Y - Y*||^beta (L + 2 ||Y||^alpha) per lag (Holder propagation of (A2)).
std::vector<double> holder_dependence_bound(double L, double h_alpha, double h_beta, double p,
                                            double y_norm, std::span<const double> y_diff_norms);

// ---------------------------------------------------------------------------
// Small-ball sufficient conditions

/// (V1): P(|eps| <= delta) > 0 for every delta > 0.
bool small_ball_v1(const DistSpec& innovation);

struct NonlatticeCheck {
    std::vector<double> xi;
    /// Average over stationary V of |E_eps exp(i xi f(eps V))|.
    std::vector<double> estimate;
    std::vector<double> se;
    /// estimate < 1 - 4 SE at every xi != 0.
    bool pass = false;
};

/// Inner modulus exact for discrete innovations and for normal innovations
/// with the identity transform; N_inner draws otherwise. CapacityError when
/// N_outer * N_inner exceeds 1e8.
NonlatticeCheck nonlattice_check(const ModelConfig& cfg, std::span<const double> xi_grid,
                                 std::size_t N_outer, std::size_t N_inner, const StreamKey& key,
                                 std::size_t workers = 1);

enum class ResidualMethod { quadrature, monte_carlo };

struct MartingaleResidual {
    std::vector<std::size_t> n;
    /// sup over the volatility grid of |E exp(f(eps v)/sqrt n) - 1|.
    std::vector<double> residual;
    /// Fitted slope of log2 residual against log2 n.
    double log2_slope = 0.0;
};

/// Requires a compensator transform. The quadrature method is exact for
/// discrete laws and uses adaptive quadrature against the density otherwise.
MartingaleResidual martingale_residual(const ModelConfig& cfg, std::span<const std::size_t> n_list,
                                       std::span<const double> v_grid,
                                       ResidualMethod method = ResidualMethod::quadrature,
                                       std::size_t N_inner = 1000000,
                                       const StreamKey& key = StreamKey{});

// ---------------------------------------------------------------------------
// Family-specific summability

struct Summability {
    bool finite = false;
    /// Partial sum over the truncation window.
    double partial_sum = 0.0;
    /// Share of the partial sum contributed by the second half of the window.
    double tail_share = 0.0;
};

/// sum_k k^2 |a_k|^{exponent}, decided from the kernel's closed form: geometric
/// needs |r| < 1, polynomial theta * exponent > 3; explicit lists are finite.
/// partial_sum and tail_share describe the truncation window.
Summability linear_summability(const LinearSpec& spec, double exponent);

/// sum_k k^2 (sum_i ||eps||_q^i sum_{l >= k} A_{l,i})^beta over the truncation
/// window, A_{l,i} the absolute kernel mass of order-i terms that involve lag l.
/// Geometric kappa needs |r| < 1, polynomial (theta - 1) beta > 3.
Summability volterra_summability(const VolterraSpec& spec, double eps_q_norm, double beta);

/// Quadratic-family check of sup_{|x|<=delta} c_i(x) <= ||c_i(eps)||_q.
bool garch_coefficient_smallball(const GarchSpec& spec, const DistSpec& innovation, double q,
                                 double delta);

/// ||eps||_q, closed form for integer q and by quadrature/atoms otherwise.
double innovation_norm(const DistSpec& innovation, double q);

struct AssumptionItem {
    std::string name;
    bool pass = false;
    double value = 0.0;
    std::string detail;
};

struct AssumptionReport {
    std::vector<AssumptionItem> items;
    bool all_pass() const;
};

struct AssumptionOptions {
    double delta = 0.1;
    std::vector<double> xi_grid{0.5, 1.0, 2.0, 3.14159265358979323846};
    std::size_t N_outer = 2000;
    std::size_t N_inner = 2000;
};

/// Family-appropriate checks: moment order q from the transform's Holder
/// exponents, the family assumption, (V1) and the non-lattice condition.
AssumptionReport check_assumptions(const ModelConfig& cfg, const AssumptionOptions& opt,
                                   const StreamKey& key, std::size_t workers = 1);

}  // namespace edgelab
