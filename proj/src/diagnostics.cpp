#include "edgelab/diagnostics.hpp"

#include "edgelab/errors.hpp"
#include "edgelab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace edgelab {

namespace {

bool is_integer(double q) { return q == std::floor(q) && q < 64.0; }

double binomial(int n, int k) {
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
}

/// E h(eps): atom sum for discrete laws, adaptive quadrature against the
/// density otherwise (split at 0, where |.|-type integrands kink).
double expect(const DistSpec& d, const std::function<double(double)>& h,
              const QuadratureConfig& quad = {1e-13, 1e-12, 20000}) {
    if (d.is_discrete()) {
        CompensatedSum s;
        for (const auto& a : d.atoms()) s.add(a.p * h(a.x));
        return s.value();
    }
    const auto [lo, hi] = d.effective_support();
    const double breaks[] = {0.0};
    return integrate_split([&](double x) { return h(x) * d.pdf(x); }, lo, hi, breaks, quad)
        .value;
}

void require_finite_moment(double m, const char* who) {
    if (!std::isfinite(m))
        throw MomentBudgetError(std::string(who) + ": required moment is not finite");
}

NormEstimate coefficient_norm(const GarchCoefficient& c, const DistSpec& eps, double q,
                              NormMethod method, const StreamKey& key, std::size_t draws) {
    const bool analytic_ok = is_integer(q) && c.a >= 0.0 && c.b >= 0.0;
    if (method == NormMethod::automatic)
        method = analytic_ok ? NormMethod::analytic : NormMethod::quadrature;
    NormEstimate out;
    out.method = method;
    switch (method) {
        case NormMethod::analytic: {
            if (!analytic_ok)
                throw ParameterError("gamma_c: analytic path needs integer q and b, a >= 0");
            const int qi = static_cast<int>(q);
            double m = 0.0;
            for (int k = 0; k <= qi; ++k)
                m += binomial(qi, k) * std::pow(c.b, qi - k) * std::pow(c.a, k) *
                     eps.raw_moment(2 * k);
            require_finite_moment(m, "gamma_c");
            out.value = std::pow(m, 1.0 / q);
            return out;
        }
        case NormMethod::quadrature: {
            const double m = expect(eps, [&](double x) { return std::pow(std::abs(c(x)), q); });
            require_finite_moment(m, "gamma_c");
            out.value = std::pow(m, 1.0 / q);
            return out;
        }
        case NormMethod::monte_carlo: {
            RandomStream rng(key);
            std::vector<double> v(draws);
            for (auto& x : v) x = std::pow(std::abs(c(sample(rng, eps))), q);
            const auto ms = mean_se(v);
            out.value = std::pow(ms.mean, 1.0 / q);
            out.se = ms.mean > 0.0 ? std::pow(ms.mean, 1.0 / q - 1.0) * ms.se / q : 0.0;
            return out;
        }
        case NormMethod::automatic: break;
    }
    return out;
}

}  // namespace

DependenceProfile dependence_profile(const ModelConfig& cfg_in, double p,
                                     std::span<const std::size_t> lags, std::size_t N,
                                     const StreamKey& key, std::size_t workers) {
    if (!(p >= 1.0)) throw ParameterError("dependence_profile: p must be >= 1");
    if (lags.empty()) throw ParameterError("dependence_profile: no lags");
    if (N < 1000) throw SampleSizeError("dependence_profile: need N >= 1000");
    validate(cfg_in);
    // Differences do not depend on the centering; fix it so any transform runs.
    ModelConfig cfg = cfg_in;
    if (!cfg.transform.centering && !analytic_centering(cfg)) cfg.transform.centering = 0.0;

    const std::size_t L = lags.size();
    std::vector<double> ax(L * N), ay(L * N);
    parallel_for(N, workers, [&](std::size_t r) {
        const auto d = coupled_terminal_differences(cfg, lags, key.child(static_cast<std::uint32_t>(r)));
        for (std::size_t j = 0; j < L; ++j) {
            ax[j * N + r] = std::pow(std::abs(d.dx[j]), p);
            ay[j * N + r] = std::pow(std::abs(d.dy[j]), p);
        }
    });

    DependenceProfile out;
    out.p = p;
    out.lags.assign(lags.begin(), lags.end());
    out.N = N;
    auto root = [p](const MeanSe& ms, double& value, double& se) {
        value = std::pow(ms.mean, 1.0 / p);
        se = ms.mean > 0.0 ? std::pow(ms.mean, 1.0 / p - 1.0) * ms.se / p : 0.0;
    };
    bool any_nonzero = false;
    std::vector<double> fx, fy;
    for (std::size_t j = 0; j < L; ++j) {
        const std::span<const double> col_x(ax.data() + j * N, N);
        const std::span<const double> col_y(ay.data() + j * N, N);
        double v, s;
        root(mean_se(col_x), v, s);
        out.theta_hat.push_back(v);
        out.theta_se.push_back(s);
        root(mean_se(col_y), v, s);
        out.y_theta_hat.push_back(v);
        out.y_theta_se.push_back(s);
        if (out.theta_hat.back() > 0.0) any_nonzero = true;
        if (out.theta_hat.back() > 5.0 * out.theta_se.back() && out.theta_hat.back() > 0.0) {
            fx.push_back(static_cast<double>(lags[j]));
            fy.push_back(std::log(out.theta_hat.back()));
        }
    }
    out.degenerate = !any_nonzero;
    out.fit_points = fx.size();
    if (!out.degenerate && fx.size() >= 2) {
        out.fit = least_squares(fx, fy);
        out.fitted = true;
    }
    return out;
}

NormEstimate gamma_c(const GarchSpec& spec, const DistSpec& innovation, double q,
                     NormMethod method, const StreamKey& key, std::size_t mc_draws) {
    if (!(q >= 1.0) || !std::isfinite(q)) throw ParameterError("gamma_c: q must be >= 1");
    innovation.validate();
    NormEstimate total;
    double var = 0.0;
    for (std::size_t i = 0; i < spec.c.size(); ++i) {
        const auto e = coefficient_norm(spec.c[i], innovation, q, method,
                                        key.child(static_cast<std::uint32_t>(i)), mc_draws);
        total.value += e.value;
        var += e.se * e.se;
        total.method = e.method;
    }
    total.se = std::sqrt(var);
    return total;
}

Contraction contraction_coefficient(const IteratedSpec& spec, const DistSpec& innovation,
                                    double q, double delta) {
    if (!(q >= 1.0)) throw ParameterError("contraction_coefficient: q must be >= 1");
    if (!(delta > 0.0)) throw ParameterError("contraction_coefficient: delta must be > 0");
    innovation.validate();
    const double base = std::abs(spec.a) + std::abs(spec.c);
    const double d = std::abs(spec.d);
    Contraction out;
    const double m =
        d == 0.0 ? std::pow(base, q)
                 : expect(innovation, [&](double x) { return std::pow(base + d * std::abs(x), q); });
    require_finite_moment(m, "contraction_coefficient");
    out.lq_norm = std::pow(m, 1.0 / q);
    out.smallball_sup = base + d * delta;
    out.pass = out.lq_norm < 1.0 && out.smallball_sup < 1.0;
    return out;
}

std::vector<double> holder_dependence_bound(double L, double h_alpha, double h_beta, double p,
                                            double y_norm, std::span<const double> y_diff_norms) {
    if (!(p * (h_alpha + h_beta) >= 1.0))
        throw ParameterError("holder_dependence_bound: need p (alpha + beta) >= 1");
    if (!std::isfinite(y_norm) || y_norm < 0.0)
        throw ParameterError("holder_dependence_bound: y_norm must be finite and >= 0");
    const double factor = L + 2.0 * std::pow(y_norm, h_alpha);
    std::vector<double> out;
    out.reserve(y_diff_norms.size());
    for (double d : y_diff_norms) out.push_back(d == 0.0 ? 0.0 : std::pow(d, h_beta) * factor);
    return out;
}

bool small_ball_v1(const DistSpec& innovation) {
    innovation.validate();
    if (innovation.is_discrete()) {
        for (const auto& a : innovation.atoms())
            if (a.x == 0.0) return true;
        return false;
    }
    constexpr double kDelta = 1e-6;
    return innovation.cdf(kDelta) - innovation.cdf(-kDelta) > 0.0;
}

NonlatticeCheck nonlattice_check(const ModelConfig& cfg, std::span<const double> xi_grid,
                                 std::size_t N_outer, std::size_t N_inner, const StreamKey& key,
                                 std::size_t workers) {
    validate(cfg);
    if (N_outer < 2) throw SampleSizeError("nonlattice_check: need N_outer >= 2");
    if (static_cast<double>(N_outer) * static_cast<double>(N_inner) > 1e8)
        throw CapacityError("nonlattice_check: N_outer * N_inner exceeds 1e8");
    for (double xi : xi_grid)
        if (!std::isfinite(xi)) throw ParameterError("nonlattice_check: grid must be finite");

    const bool discrete = cfg.innovation.is_discrete();
    const bool gaussian = std::holds_alternative<StandardNormal>(cfg.innovation.variant()) &&
                          std::holds_alternative<IdentityTransform>(cfg.transform.variant);
    if (!discrete && !gaussian && N_inner == 0)
        throw SampleSizeError("nonlattice_check: N_inner must be positive");
    const auto atoms = discrete ? cfg.innovation.atoms() : std::vector<Atom>{};
    const std::size_t G = xi_grid.size();
    std::vector<double> moduli(G * N_outer);

    parallel_for(N_outer, workers, [&](std::size_t o) {
        const auto oid = static_cast<std::uint32_t>(o);
        const double v = draw_stationary(cfg, key.child(0).child(oid)).v;
        std::vector<double> inner;
        if (!discrete && !gaussian) {
            RandomStream rng(key.child(1).child(oid));
            inner.resize(N_inner);
            for (auto& e : inner) e = apply_transform(cfg.transform, sample(rng, cfg.innovation) * v, cfg.n);
        }
        for (std::size_t g = 0; g < G; ++g) {
            const double xi = xi_grid[g];
            double m;
            if (gaussian) {
                m = std::exp(-0.5 * xi * xi * v * v);
            } else if (discrete) {
                std::complex<double> z;
                for (const auto& a : atoms)
                    z += a.p * std::polar(1.0, xi * apply_transform(cfg.transform, a.x * v, cfg.n));
                m = std::abs(z);
            } else {
                CompensatedSum re, im;
                for (double f : inner) {
                    re.add(std::cos(xi * f));
                    im.add(std::sin(xi * f));
                }
                m = std::hypot(re.value(), im.value()) / static_cast<double>(N_inner);
            }
            moduli[g * N_outer + o] = m;
        }
    });

    NonlatticeCheck out;
    out.xi.assign(xi_grid.begin(), xi_grid.end());
    out.pass = true;
    for (std::size_t g = 0; g < G; ++g) {
        const auto ms = mean_se(std::span<const double>(moduli.data() + g * N_outer, N_outer));
        out.estimate.push_back(ms.mean);
        out.se.push_back(ms.se);
        if (xi_grid[g] != 0.0 && !(ms.mean < 1.0 - 4.0 * ms.se)) out.pass = false;
    }
    return out;
}

MartingaleResidual martingale_residual(const ModelConfig& cfg, std::span<const std::size_t> n_list,
                                       std::span<const double> v_grid, ResidualMethod method,
                                       std::size_t N_inner, const StreamKey& key) {
    if (!std::holds_alternative<CompensatorTransform>(cfg.transform.variant))
        throw ParameterError("martingale_residual: a compensator transform is required");
    if (n_list.empty() || v_grid.empty())
        throw ParameterError("martingale_residual: empty n_list or v_grid");
    cfg.innovation.validate();
    const double mean = cfg.innovation.mean();

    MartingaleResidual out;
    std::vector<double> lx, ly;
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        const std::size_t n = n_list[ni];
        if (n < 1) throw ParameterError("martingale_residual: n must be >= 1");
        const double t = 1.0 / std::sqrt(static_cast<double>(n));
        double sup = 0.0;
        for (std::size_t vi = 0; vi < v_grid.size(); ++vi) {
            const double v = v_grid[vi];
            // exp(z) - 1 with the mean-zero linear part removed, which keeps
            // quadrature away from cancellation against a tiny residual.
            auto h = [&](double e) {
                return std::expm1(apply_transform(cfg.transform, e * v, n) * t) - e * v * t;
            };
            double r;
            if (method == ResidualMethod::quadrature) {
                r = expect(cfg.innovation, h, {1e-16, 1e-11, 50000});
            } else {
                RandomStream rng(key.child(static_cast<std::uint32_t>(ni))
                                     .child(static_cast<std::uint32_t>(vi)));
                CompensatedSum s;
                for (std::size_t k = 0; k < N_inner; ++k) s.add(h(sample(rng, cfg.innovation)));
                r = s.value() / static_cast<double>(N_inner);
            }
            r += mean * v * t;
            sup = std::max(sup, std::abs(r));
        }
        out.n.push_back(n);
        out.residual.push_back(sup);
        if (sup > 0.0) {
            lx.push_back(std::log2(static_cast<double>(n)));
            ly.push_back(std::log2(sup));
        }
    }
    if (lx.size() >= 2) out.log2_slope = least_squares(lx, ly).slope;
    return out;
}

namespace {

Summability finish(const std::vector<double>& terms, bool finite) {
    Summability s;
    CompensatedSum all, tail;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        all.add(terms[k]);
        if (2 * k >= terms.size()) tail.add(terms[k]);
    }
    s.partial_sum = all.value();
    s.tail_share = s.partial_sum > 0.0 ? tail.value() / s.partial_sum : 0.0;
    s.finite = finite && std::isfinite(s.partial_sum);
    return s;
}

}  // namespace

Summability linear_summability(const LinearSpec& spec, double exponent) {
    if (!(exponent > 0.0)) throw ParameterError("linear_summability: exponent must be > 0");
    std::size_t len = spec.m_max;
    if (const auto* e = std::get_if<ExplicitKernel>(&spec.kernel)) len = e->values.size();
    std::vector<double> terms;
    for (std::size_t k = 1; k < len; ++k) {
        const double kk = static_cast<double>(k);
        terms.push_back(kk * kk * std::pow(std::abs(kernel_coefficient(spec.kernel, k)), exponent));
    }
    if (const auto* g = std::get_if<GeometricKernel>(&spec.kernel))
        return finish(terms, std::abs(g->r) < 1.0);
    if (const auto* p = std::get_if<PolynomialKernel>(&spec.kernel))
        return finish(terms, p->theta * exponent > 3.0);
    // An explicit list vanishes past its end.
    return finish(terms, true);
}

Summability volterra_summability(const VolterraSpec& spec, double eps_q_norm, double beta) {
    if (!(beta > 0.0)) throw ParameterError("volterra_summability: beta must be > 0");
    if (!(eps_q_norm >= 0.0)) throw ParameterError("volterra_summability: norm must be >= 0");
    const std::size_t m = spec.m_max;
    const std::size_t I = spec.order;
    std::vector<double> kap(m);
    for (std::size_t j = 0; j < m; ++j) kap[j] = std::abs(kernel_coefficient(spec.kappa, j));

    // A[l][i-1] = kap_l * e_{i-1}(kap without l).
    std::vector<std::vector<double>> A(m, std::vector<double>(I, 0.0));
    for (std::size_t l = 0; l < m; ++l) {
        std::vector<double> e(I, 0.0);
        e[0] = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == l) continue;
            for (std::size_t d = I - 1; d >= 1; --d) e[d] += kap[j] * e[d - 1];
        }
        for (std::size_t i = 0; i < I; ++i) A[l][i] = kap[l] * e[i];
    }
    std::vector<double> terms;
    for (std::size_t k = 1; k < m; ++k) {
        double inner = 0.0;
        for (std::size_t i = 0; i < I; ++i) {
            double tail = 0.0;
            for (std::size_t l = k; l < m; ++l) tail += A[l][i];
            inner += std::pow(eps_q_norm, static_cast<double>(i + 1)) * tail;
        }
        const double kk = static_cast<double>(k);
        terms.push_back(kk * kk * std::pow(inner, beta));
    }
    // sum_{l >= k} A_{l,i} decays like r^k (geometric) or k^{1 - theta}
    // (polynomial, which also needs theta > 1 for the e_{i-1} to converge).
    if (const auto* g = std::get_if<GeometricKernel>(&spec.kappa))
        return finish(terms, std::abs(g->r) < 1.0);
    if (const auto* p = std::get_if<PolynomialKernel>(&spec.kappa))
        return finish(terms, p->theta > 1.0 && (p->theta - 1.0) * beta > 3.0);
    return finish(terms, true);
}

double innovation_norm(const DistSpec& innovation, double q) {
    if (!(q >= 1.0)) throw ParameterError("innovation_norm: q must be >= 1");
    innovation.validate();
    double m;
    if (is_integer(q) && static_cast<int>(q) % 2 == 0)
        m = innovation.raw_moment(static_cast<int>(q));
    else
        m = expect(innovation, [&](double x) { return std::pow(std::abs(x), q); });
    require_finite_moment(m, "innovation_norm");
    return std::pow(m, 1.0 / q);
}

bool garch_coefficient_smallball(const GarchSpec& spec, const DistSpec& innovation, double q,
                                 double delta) {
    if (!(delta > 0.0)) throw ParameterError("garch_coefficient_smallball: delta must be > 0");
    for (const auto& c : spec.c) {
        const double sup = c.b + std::max(c.a * delta * delta, 0.0);
        const double norm = coefficient_norm(c, innovation, q, NormMethod::automatic, {}, 0).value;
        if (sup > norm * (1.0 + 1e-12)) return false;
    }
    return true;
}

bool AssumptionReport::all_pass() const {
    return std::all_of(items.begin(), items.end(), [](const auto& i) { return i.pass; });
}

AssumptionReport check_assumptions(const ModelConfig& cfg, const AssumptionOptions& opt,
                                   const StreamKey& key, std::size_t workers) {
    validate(cfg);
    const double ha = cfg.transform.holder.alpha;
    const double hb = cfg.transform.holder.beta;
    // Smallest integer strictly above the family's lower bound on q.
    auto above = [](double bound) { return std::floor(std::max(bound, 1.0)) + 1.0; };
    auto fmt = [](double q) {
        std::ostringstream os;
        os << "q = " << q;
        return os.str();
    };

    AssumptionReport rep;
    rep.items.push_back({"V1", small_ball_v1(cfg.innovation), 0.0,
                         "P(|eps| <= delta) > 0 for every delta > 0"});

    std::visit(
        [&](const auto& fam) {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, GarchSpec>) {
                const double q = above(std::max(std::max(ha, hb) / fam.lambda, 3.0 * (ha + hb)));
                rep.items.push_back({"lambda>=1/2", fam.lambda >= 0.5, fam.lambda, ""});
                const auto g = gamma_c(fam, cfg.innovation, q);
                rep.items.push_back({"gamma_c<1", garch_stationary(g), g.value, fmt(q)});
                rep.items.push_back(
                    {"c_i small-ball", garch_coefficient_smallball(fam, cfg.innovation, q, opt.delta),
                     opt.delta, fmt(q)});
            } else if constexpr (std::is_same_v<T, IteratedSpec>) {
                const double q = above(3.0 * (ha + hb));
                const auto c = contraction_coefficient(fam, cfg.innovation, q, opt.delta);
                rep.items.push_back({"||L_eps||_q<1", c.lq_norm < 1.0, c.lq_norm, fmt(q)});
                rep.items.push_back(
                    {"sup L_eps<1", c.smallball_sup < 1.0, c.smallball_sup, "near zero"});
            } else if constexpr (std::is_same_v<T, LinearSpec>) {
                const auto s = linear_summability(fam, hb * fam.outer.holder.beta);
                rep.items.push_back({"kernel summability", s.finite, s.partial_sum, "closed form"});
            } else {
                const double q = above(3.0 * (ha + hb));
                const auto s =
                    volterra_summability(fam, innovation_norm(cfg.innovation, q), hb);
                rep.items.push_back({"kernel summability", s.finite, s.partial_sum, fmt(q)});
            }
        },
        cfg.family);

    // The non-lattice check needs a centered transform only for simulation.
    ModelConfig c2 = cfg;
    if (!c2.transform.centering && !analytic_centering(c2)) c2.transform.centering = 0.0;
    const auto nl = nonlattice_check(c2, opt.xi_grid, opt.N_outer, opt.N_inner, key, workers);
    double worst = 0.0;
    for (double e : nl.estimate) worst = std::max(worst, e);
    rep.items.push_back({"B2 non-lattice", nl.pass, worst, "max conditional CF modulus"});
    return rep;
}

}  // namespace edgelab
