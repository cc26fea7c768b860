#include "edgelab/models.hpp"

#include "edgelab/errors.hpp"
#include "edgelab/numerics.hpp"
#include "edgelab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace edgelab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::size_t kMinBurnIn = 1000;

void check_burn_in_floor(const std::optional<std::size_t>& configured, std::size_t floor,
                         const char* family) {
    if (configured && *configured < floor)
        throw ParameterError(std::string(family) + ": burn_in " + std::to_string(*configured) +
                             " below the minimum " + std::to_string(floor));
}

// Steps until a contraction with per-step factor rho forgets its start to 1e-8.
std::size_t truncation_length(double rho) {
    if (!(rho > 0.0)) return 1;
    if (rho >= 1.0) return kMinBurnIn;
    return static_cast<std::size_t>(std::ceil(std::log(1e-8) / std::log(rho)));
}

class GarchStepper final : public VolatilityStepper {
public:
    GarchStepper(const GarchSpec& spec, double lambda_start)
        : spec_(spec),
          eps_(spec.r(), 0.0),
          lam_(spec.q(), lambda_start),
          inv_two_lambda_(1.0 / (2.0 * spec.lambda)) {
        v_ = std::pow(lambda_start, inv_two_lambda_);
    }

    double step(double eps) override {
        std::copy_backward(eps_.begin(), eps_.end() - 1, eps_.end());
        eps_[0] = eps;
        double l = 0.0;
        for (std::size_t i = 0; i < spec_.g.size(); ++i) l += spec_.g[i](eps_[i]);
        for (std::size_t i = 0; i < spec_.c.size(); ++i) l += spec_.c[i](eps_[i]) * lam_[i];
        std::copy_backward(lam_.begin(), lam_.end() - 1, lam_.end());
        lam_[0] = l;
        v_ = spec_.lambda == 1.0 ? std::sqrt(l) : std::pow(l, inv_two_lambda_);
        return v_;
    }
    double current() const noexcept override { return v_; }
    std::unique_ptr<VolatilityStepper> clone() const override {
        return std::make_unique<GarchStepper>(*this);
    }

private:
    GarchSpec spec_;
    std::vector<double> eps_;  // eps_[i] = eps_{k-i}
    std::vector<double> lam_;  // lam_[i] = Lambda(V_{k-1-i}^2) before the update
    double inv_two_lambda_;
    double v_ = 0.0;
};

class IteratedStepper final : public VolatilityStepper {
public:
    explicit IteratedStepper(const IteratedSpec& spec) : spec_(spec), v_(spec.v0) {}
    double step(double eps) override { return v_ = spec_.map(v_, eps); }
    double current() const noexcept override { return v_; }
    std::unique_ptr<VolatilityStepper> clone() const override {
        return std::make_unique<IteratedStepper>(*this);
    }

private:
    IteratedSpec spec_;
    double v_;
};

double inner_map(InnerMap m, double x) noexcept {
    switch (m) {
        case InnerMap::square:
            return x * x;
        case InnerMap::abs:
            return std::abs(x);
        case InnerMap::identity:
            break;
    }
    return x;
}

std::vector<double> kernel_table(const Kernel& k, std::size_t m) {
    std::vector<double> a(m);
    for (std::size_t i = 0; i < m; ++i) a[i] = kernel_coefficient(k, i);
    return a;
}

// Ring buffer of the last m innovation-derived values, newest at head_.
class LinearStepper final : public VolatilityStepper {
public:
    explicit LinearStepper(const LinearSpec& spec)
        : inner_(spec.inner), outer_(spec.outer), a_(kernel_table(spec.kernel, spec.m_max)),
          buf_(spec.m_max, 0.0) {
        v_ = outer_(0.0);
    }
    double step(double eps) override {
        const std::size_t m = buf_.size();
        head_ = (head_ + m - 1) % m;
        buf_[head_] = inner_map(inner_, eps);
        double g = 0.0;
        std::size_t j = head_;
        for (std::size_t i = 0; i < m; ++i) {
            g += a_[i] * buf_[j];
            if (++j == m) j = 0;
        }
        return v_ = outer_(g);
    }
    double current() const noexcept override { return v_; }
    std::unique_ptr<VolatilityStepper> clone() const override {
        return std::make_unique<LinearStepper>(*this);
    }

private:
    InnerMap inner_;
    OuterMap outer_;
    std::vector<double> a_;
    std::vector<double> buf_;
    std::size_t head_ = 0;
    double v_ = 0.0;
};

// Separable kernel: V_k is the sum of the elementary symmetric polynomials
// e_1..e_order of z_j = kappa(j) eps_{k-j}.
class VolterraStepper final : public VolatilityStepper {
public:
    explicit VolterraStepper(const VolterraSpec& spec)
        : order_(spec.order), kappa_(kernel_table(spec.kappa, spec.m_max)), buf_(spec.m_max, 0.0),
          e_(spec.order + 1, 0.0) {}
    double step(double eps) override {
        const std::size_t m = buf_.size();
        head_ = (head_ + m - 1) % m;
        buf_[head_] = eps;
        std::fill(e_.begin(), e_.end(), 0.0);
        e_[0] = 1.0;
        std::size_t j = head_;
        for (std::size_t lag = 0; lag < m; ++lag) {
            const double z = kappa_[lag] * buf_[j];
            for (std::size_t i = order_; i >= 1; --i) e_[i] += z * e_[i - 1];
            if (++j == m) j = 0;
        }
        double v = 0.0;
        for (std::size_t i = 1; i <= order_; ++i) v += e_[i];
        return v_ = v;
    }
    double current() const noexcept override { return v_; }
    std::unique_ptr<VolatilityStepper> clone() const override {
        return std::make_unique<VolterraStepper>(*this);
    }

private:
    std::size_t order_;
    std::vector<double> kappa_;
    std::vector<double> buf_;
    std::vector<double> e_;
    std::size_t head_ = 0;
    double v_ = 0.0;
};

double garch_start_level(const GarchSpec& spec, const DistSpec& eps) {
    const double m2 = eps.raw_moment(2);
    double g = 0.0, c = 0.0;
    for (const auto& gi : spec.g) g += gi.w + gi.u * m2;
    for (const auto& ci : spec.c) c += ci.b + ci.a * m2;
    return c < 1.0 ? g / (1.0 - c) : g;
}

double resolve_mu(const ModelConfig& cfg) {
    if (cfg.transform.centering) return *cfg.transform.centering;
    if (auto mu = analytic_centering(cfg)) return *mu;
    throw ContractError(
        "transform centering is unknown: set it or call estimate_centering first");
}

void check_finite(double v, std::ptrdiff_t index) {
    if (!std::isfinite(v))
        throw DivergenceError(index, "non-finite volatility at index " + std::to_string(index));
}

// Runs the burn-in on `rng`; returns the stepper positioned at V_{-1}.
std::unique_ptr<VolatilityStepper> burn(const ModelConfig& cfg, RandomStream& rng,
                                        std::size_t steps) {
    auto stepper = make_stepper(cfg);
    for (std::size_t t = 0; t < steps; ++t) {
        const double v = stepper->step(sample(rng, cfg.innovation));
        check_finite(v, -static_cast<std::ptrdiff_t>(steps - t));
    }
    return stepper;
}

}  // namespace

bool GarchSpec::memoryless() const noexcept {
    return std::all_of(c.begin(), c.end(), [](const auto& ci) { return ci.b == 0.0 && ci.a == 0.0; });
}

double IteratedSpec::map(double v, double eps) const noexcept {
    double out = a * v + b * eps + c * std::sin(v) + d * eps * v;
    if (v_min) out = std::max(out, *v_min);
    if (v_max) out = std::min(out, *v_max);
    return out;
}

double kernel_coefficient(const Kernel& k, std::size_t i) {
    return std::visit(overloaded{
                          [&](const GeometricKernel& g) { return std::pow(g.r, static_cast<double>(i)); },
                          [&](const PolynomialKernel& p) {
                              return std::pow(1.0 + static_cast<double>(i), -p.theta);
                          },
                          [&](const ExplicitKernel& e) { return i < e.values.size() ? e.values[i] : 0.0; },
                      },
                      k);
}

double OuterMap::operator()(double x) const noexcept {
    switch (kind) {
        case OuterMapKind::abs:
            return std::abs(x);
        case OuterMapKind::power:
            return std::pow(std::abs(x), r);
        case OuterMapKind::identity:
            break;
    }
    return x;
}

void validate(const ModelConfig& cfg) {
    cfg.innovation.validate();
    if (cfg.n < 1) throw ParameterError("model: horizon n must be >= 1");
    std::visit(
        overloaded{
            [](const GarchSpec& s) {
                if (s.g.empty() || s.c.empty())
                    throw ParameterError("garch: orders p and q must be positive");
                if (!(s.lambda >= 0.5) || !std::isfinite(s.lambda))
                    throw ParameterError("garch: lambda must be >= 1/2");
                bool has_omega = false;
                for (const auto& g : s.g) {
                    if (!(g.w >= 0.0 && g.u >= 0.0))
                        throw ParameterError("garch: g coefficients must be non-negative");
                    has_omega = has_omega || g.w > 0.0;
                }
                if (!has_omega) throw ParameterError("garch: need some w_i > 0");
                for (const auto& c : s.c)
                    if (!(c.b >= 0.0 && c.a >= 0.0))
                        throw ParameterError("garch: c coefficients must be non-negative");
            },
            [](const IteratedSpec& s) {
                for (double x : {s.a, s.b, s.c, s.d, s.v0})
                    if (!std::isfinite(x)) throw ParameterError("iterated: coefficients must be finite");
                if (s.v_min && s.v_max && *s.v_min > *s.v_max)
                    throw ParameterError("iterated: v_min exceeds v_max");
            },
            [](const LinearSpec& s) {
                if (s.m_max < 1) throw ParameterError("linear: m_max must be >= 1");
                if (const auto* p = std::get_if<PolynomialKernel>(&s.kernel); p && !(p->theta > 0.0))
                    throw ParameterError("linear: polynomial kernel needs theta > 0");
                if (s.outer.kind == OuterMapKind::power && !(s.outer.r > 0.0))
                    throw ParameterError("linear: outer power exponent must be > 0");
            },
            [](const VolterraSpec& s) {
                if (s.order < 1) throw ParameterError("volterra: order must be >= 1");
                if (s.m_max < 1) throw ParameterError("volterra: m_max must be >= 1");
            },
        },
        cfg.family);
    std::visit(overloaded{
                   [](const IdentityTransform&) {},
                   [](const CompensatorTransform& c) {
                       if (c.order != 2 && c.order != 3)
                           throw ParameterError("transform: compensator order must be 2 or 3");
                   },
                   [](const PowerTransform& p) {
                       if (!(p.r > 0.0)) throw ParameterError("transform: power r must be > 0");
                   },
                   [](const PolynomialTransform& p) {
                       if (p.coefficients.empty())
                           throw ParameterError("transform: polynomial needs coefficients");
                   },
               },
               cfg.transform.variant);
    const auto& h = cfg.transform.holder;
    if (!(h.L > 0.0 && h.beta > 0.0 && h.alpha >= 0.0))
        throw ParameterError("transform: holder metadata needs L > 0, beta > 0, alpha >= 0");
    check_burn_in_floor(std::visit([](const auto& s) { return s.burn_in; }, cfg.family),
                        exact_memory(cfg).value_or(kMinBurnIn), "model");
}

std::optional<std::size_t> exact_memory(const ModelConfig& cfg) {
    return std::visit(overloaded{
                          [](const GarchSpec& s) -> std::optional<std::size_t> {
                              if (s.memoryless()) return s.p();
                              return std::nullopt;
                          },
                          [](const IteratedSpec& s) -> std::optional<std::size_t> {
                              if (s.a == 0.0 && s.c == 0.0 && s.d == 0.0) return 1;
                              return std::nullopt;
                          },
                          [](const LinearSpec& s) -> std::optional<std::size_t> { return s.m_max; },
                          [](const VolterraSpec& s) -> std::optional<std::size_t> { return s.m_max; },
                      },
                      cfg.family);
}

std::size_t burn_in(const ModelConfig& cfg) {
    const auto configured = std::visit([](const auto& s) { return s.burn_in; }, cfg.family);
    if (configured) return *configured;
    std::size_t trunc = std::visit(
        overloaded{
            [&](const GarchSpec& s) {
                if (s.memoryless()) return s.p();
                const double m2 = cfg.innovation.raw_moment(2);
                double rho = 0.0;
                for (const auto& c : s.c) rho += c.b + c.a * m2;
                return truncation_length(rho);
            },
            [&](const IteratedSpec& s) {
                const double m1 = std::sqrt(cfg.innovation.raw_moment(2));
                return truncation_length(std::abs(s.a) + std::abs(s.c) + std::abs(s.d) * m1);
            },
            [](const LinearSpec& s) { return s.m_max; },
            [](const VolterraSpec& s) { return s.m_max; },
        },
        cfg.family);
    return std::max(kMinBurnIn, 10 * trunc);
}

double apply_transform(const TransformSpec& t, double y, std::size_t n) {
    return std::visit(overloaded{
                          [&](const IdentityTransform&) { return y; },
                          [&](const CompensatorTransform& c) {
                              const double nn = static_cast<double>(n);
                              double f = y - y * y / (2.0 * std::sqrt(nn));
                              if (c.order == 3) f -= (2.0 / 3.0) * y * y * y / nn;
                              return f;
                          },
                          [&](const PowerTransform& p) {
                              const double m = std::pow(std::abs(y), p.r);
                              return (p.signed_power && y < 0.0) ? -m : m;
                          },
                          [&](const PolynomialTransform& p) {
                              double acc = 0.0;
                              for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it)
                                  acc = acc * y + *it;
                              return acc;
                          },
                      },
                      t.variant);
}

std::optional<double> analytic_centering(const ModelConfig& cfg) {
    // E[eps V] = E[eps] E[V] since V_{k-1} is independent of eps_k.
    if (std::holds_alternative<IdentityTransform>(cfg.transform.variant) &&
        cfg.innovation.mean() == 0.0)
        return 0.0;
    return std::nullopt;
}

std::unique_ptr<VolatilityStepper> make_stepper(const ModelConfig& cfg) {
    return std::visit(
        overloaded{
            [&](const GarchSpec& s) -> std::unique_ptr<VolatilityStepper> {
                return std::make_unique<GarchStepper>(s, garch_start_level(s, cfg.innovation));
            },
            [](const IteratedSpec& s) -> std::unique_ptr<VolatilityStepper> {
                return std::make_unique<IteratedStepper>(s);
            },
            [](const LinearSpec& s) -> std::unique_ptr<VolatilityStepper> {
                return std::make_unique<LinearStepper>(s);
            },
            [](const VolterraSpec& s) -> std::unique_ptr<VolatilityStepper> {
                return std::make_unique<VolterraStepper>(s);
            },
        },
        cfg.family);
}

Path simulate_path(const ModelConfig& cfg, const StreamKey& key) {
    validate(cfg);
    const double mu = resolve_mu(cfg);
    RandomStream rng(key);
    auto stepper = burn(cfg, rng, burn_in(cfg));
    Path out;
    out.x.resize(cfg.n);
    out.v.resize(cfg.n);
    double v_prev = stepper->current();
    for (std::size_t k = 0; k < cfg.n; ++k) {
        const double eps = sample(rng, cfg.innovation);
        out.x[k] = apply_transform(cfg.transform, eps * v_prev, cfg.n) - mu;
        v_prev = stepper->step(eps);
        check_finite(v_prev, static_cast<std::ptrdiff_t>(k));
        out.v[k] = v_prev;
    }
    return out;
}

CoupledPaths simulate_coupled(const ModelConfig& cfg, std::size_t lag, CouplingMode mode,
                              const StreamKey& key) {
    validate(cfg);
    const double mu = resolve_mu(cfg);
    const std::size_t nb = burn_in(cfg);
    const std::size_t total = nb + cfg.n;

    RandomStream rng(key);
    RandomStream rng_prime(key.child(kPrimeStreamIndex));
    std::vector<double> eps(total);
    for (auto& e : eps) e = sample(rng, cfg.innovation);

    // Position of path index j in `eps` is j + nb; the swap boundary is
    // j0 = n - 2 - lag.
    const std::ptrdiff_t boundary = static_cast<std::ptrdiff_t>(cfg.n) - 2 -
                                    static_cast<std::ptrdiff_t>(lag) + static_cast<std::ptrdiff_t>(nb);
    std::vector<double> eps_c = eps;
    if (boundary >= 0) {
        if (mode == CouplingMode::star) {
            for (std::ptrdiff_t i = 0; i <= boundary; ++i)
                eps_c[static_cast<std::size_t>(i)] = sample(rng_prime, cfg.innovation);
        } else {
            eps_c[static_cast<std::size_t>(boundary)] = sample(rng_prime, cfg.innovation);
        }
    }

    auto run = [&](const std::vector<double>& e) {
        auto stepper = make_stepper(cfg);
        for (std::size_t t = 0; t < nb; ++t)
            check_finite(stepper->step(e[t]), -static_cast<std::ptrdiff_t>(nb - t));
        std::vector<double> x(cfg.n);
        double v_prev = stepper->current();
        for (std::size_t k = 0; k < cfg.n; ++k) {
            const double ek = e[nb + k];
            x[k] = apply_transform(cfg.transform, ek * v_prev, cfg.n) - mu;
            v_prev = stepper->step(ek);
            check_finite(v_prev, static_cast<std::ptrdiff_t>(k));
        }
        return x;
    };
    return {run(eps), run(eps_c)};
}

CoupledDifferences coupled_terminal_differences(const ModelConfig& cfg,
                                                std::span<const std::size_t> lags,
                                                const StreamKey& key) {
    validate(cfg);
    const double mu = resolve_mu(cfg);
    std::size_t max_lag = 0;
    for (auto l : lags) {
        if (l < 1) throw ParameterError("coupled_terminal_differences: lags must be >= 1");
        max_lag = std::max(max_lag, l);
    }
    const std::size_t nb = burn_in(cfg);
    // Path indices 0..T with T = max_lag; lag l swaps indices <= T - 1 - l.
    const std::size_t T = max_lag;

    RandomStream rng(key);
    RandomStream rng_prime(key.child(kPrimeStreamIndex));
    auto original = burn(cfg, rng, nb);
    auto copy = burn(cfg, rng_prime, nb);

    std::vector<double> eps(T + 1);
    for (auto& e : eps) e = sample(rng, cfg.innovation);

    // snapshots[j] = copy stepper after consuming eps'_j, j = 0..T-2; the
    // copy state "before index 0" is the burnt-in stepper itself.
    std::vector<std::unique_ptr<VolatilityStepper>> snapshots;
    snapshots.reserve(T);
    snapshots.push_back(copy->clone());  // boundary j = -1
    for (std::size_t j = 0; j + 1 < T; ++j) {
        check_finite(copy->step(sample(rng_prime, cfg.innovation)), static_cast<std::ptrdiff_t>(j));
        snapshots.push_back(copy->clone());
    }

    for (std::size_t j = 0; j < T; ++j)
        check_finite(original->step(eps[j]), static_cast<std::ptrdiff_t>(j));
    const double eps_T = eps[T];
    const double y = eps_T * original->current();
    const double x = apply_transform(cfg.transform, y, cfg.n) - mu;

    CoupledDifferences out;
    out.dx.reserve(lags.size());
    out.dy.reserve(lags.size());
    for (auto l : lags) {
        // Boundary j0 = T - 1 - l, snapshot index j0 + 1.
        const std::size_t start = T - l;  // first original index consumed
        auto s = snapshots[start]->clone();
        for (std::size_t j = start; j < T; ++j) s->step(eps[j]);
        const double y_c = eps_T * s->current();
        const double x_c = apply_transform(cfg.transform, y_c, cfg.n) - mu;
        out.dx.push_back(x - x_c);
        out.dy.push_back(y - y_c);
    }
    return out;
}

double garch_volterra_eval(const GarchSpec& spec, std::span<const double> innovations,
                           std::size_t M) {
    if (M < 1) throw ParameterError("garch_volterra_eval: M must be >= 1");
    const std::size_t r = spec.r();
    if (innovations.size() < M * r)
        throw InputLengthError("garch_volterra_eval: need " + std::to_string(M * r) +
                               " innovations, got " + std::to_string(innovations.size()));
    // e(d) = eps_{k+1-d}, d >= 1.
    auto e = [&](std::size_t d) { return innovations[innovations.size() - d]; };
    auto g = [&](std::size_t l, double x) { return l <= spec.p() ? spec.g[l - 1](x) : 0.0; };
    auto c = [&](std::size_t l, double x) { return l <= spec.q() ? spec.c[l - 1](x) : 0.0; };

    // weight[d] = sum over c-chains of total offset d with exactly i links.
    std::vector<double> weight(1, 1.0);
    CompensatedSum total;
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t d = 0; d < weight.size(); ++d) {
            if (weight[d] == 0.0) continue;
            for (std::size_t l = 1; l <= r; ++l) total.add(weight[d] * g(l, e(d + l)));
        }
        if (i + 1 == M) break;
        std::vector<double> next(weight.size() + r, 0.0);
        for (std::size_t d = 0; d < weight.size(); ++d) {
            if (weight[d] == 0.0) continue;
            for (std::size_t l = 1; l <= r; ++l) next[d + l] += weight[d] * c(l, e(d + l));
        }
        weight = std::move(next);
    }
    return total.value();
}

StationaryDraw draw_stationary(const ModelConfig& cfg, const StreamKey& key) {
    RandomStream rng(key);
    auto stepper = burn(cfg, rng, burn_in(cfg));
    return {stepper->current(), sample(rng, cfg.innovation)};
}

CenteringEstimate estimate_centering(ModelConfig& cfg, std::size_t N, const StreamKey& key,
                                     std::size_t workers) {
    if (N < 1000) throw SampleSizeError("estimate_centering: need N >= 1000");
    validate(cfg);
    std::vector<double> fy(N);
    parallel_for(N, workers, [&](std::size_t i) {
        const auto d = draw_stationary(cfg, key.child(static_cast<std::uint32_t>(i)));
        fy[i] = apply_transform(cfg.transform, d.eps * d.v, cfg.n);
    });
    const auto ms = mean_se(fy);
    cfg.transform.centering = ms.mean;
    cfg.transform.centering_se = ms.se;
    return {ms.mean, ms.se, N};
}

std::vector<double> simulate_normalized_sums(const ModelConfig& cfg, std::size_t N,
                                             const StreamKey& key, std::size_t workers) {
    validate(cfg);
    const double mu = resolve_mu(cfg);
    const std::size_t nb = burn_in(cfg);
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.n));
    std::vector<double> out(N);
    parallel_for(N, workers, [&](std::size_t i) {
        RandomStream rng(key.child(static_cast<std::uint32_t>(i)));
        auto stepper = burn(cfg, rng, nb);
        double v_prev = stepper->current();
        CompensatedSum s;
        for (std::size_t k = 0; k < cfg.n; ++k) {
            const double eps = sample(rng, cfg.innovation);
            s.add(apply_transform(cfg.transform, eps * v_prev, cfg.n) - mu);
            v_prev = stepper->step(eps);
            check_finite(v_prev, static_cast<std::ptrdiff_t>(k));
        }
        out[i] = s.value() * scale;
    });
    return out;
}

}  // namespace edgelab
