#include "edgelab/experiment.hpp"

#include "edgelab/diagnostics.hpp"
#include "edgelab/errors.hpp"
#include "edgelab/metrics.hpp"
#include "edgelab/moments.hpp"
#include "edgelab/parallel.hpp"
#include "edgelab/pricing.hpp"
#include "edgelab/surrogate.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>

namespace edgelab {

using nlohmann::ordered_json;

namespace {

// Stream-path roots, one per source of randomness.
enum : std::uint32_t {
    kKeyCentering = 0,
    kKeySums = 1,
    kKeyLrv = 2,
    kKeyDependence = 3,
    kKeyAssumptions = 4,
    kKeyPrice = 5,
};

std::string mode_name(EdgeworthMode m) {
    return m == EdgeworthMode::classical ? "edgeworth-classical" : "edgeworth-literal";
}

bool needs_sums(const ExperimentConfig& cfg) {
    for (Task t : {Task::cumulants, Task::edgeworth, Task::wasserstein, Task::cf_scan,
                   Task::be_characteristic, Task::price})
        if (cfg.has(t)) return true;
    return false;
}

std::vector<double> sorted_copy(std::span<const double> xs) {
    std::vector<double> s(xs.begin(), xs.end());
    std::sort(s.begin(), s.end());
    return s;
}

// Integration range holding the sample and all but 1e-9 of the target mass.
std::pair<double, double> w1_range(std::span<const double> sorted, const CdfFn& F, double s) {
    double lo = std::min(sorted.front(), -10.0 * s);
    double hi = std::max(sorted.back(), 10.0 * s);
    for (int i = 0; i < 30 && std::abs(F(lo)) > 1e-9; ++i) lo -= (hi - lo);
    for (int i = 0; i < 30 && std::abs(1.0 - F(hi)) > 1e-9; ++i) hi += (hi - lo);
    return {lo, hi};
}

/// Kolmogorov and W1 errors of one sample against the three plug-in targets.
struct TargetErrors {
    double ks_gauss = 0.0, ks_edge = 0.0, ks_surr = std::nan("");
    double w1_gauss = 0.0, w1_edge = 0.0, w1_surr = std::nan("");
};

TargetErrors target_errors(std::span<const double> replicates, std::size_t n, std::size_t refine) {
    const auto est = estimate_cumulants(replicates, n);
    const auto sorted = sorted_copy(replicates);
    const double s = std::sqrt(est.s2);
    const CdfFn gauss = [s](double x) { return normal_cdf(x / s); };
    const EdgeworthApprox edge(s, est.k3, EdgeworthMode::classical);
    const CdfFn edge_cdf = [&edge](double x) { return edge.cdf(x); };
    TargetErrors e;
    e.ks_gauss = kolmogorov_distance(sorted, gauss, 0);
    e.ks_edge = kolmogorov_distance(sorted, edge_cdf, refine);
    auto [lo, hi] = w1_range(sorted, gauss, s);
    e.w1_gauss = wasserstein1_cdf(sorted, gauss, lo, hi);
    e.w1_edge = wasserstein1_cdf(sorted, edge_cdf, lo, hi);
    try {
        const auto law = SurrogateLaw::from_cumulants(est.s2, est.k3);
        const CdfFn sc = [&law](double x) { return law.cdf(x); };
        e.ks_surr = kolmogorov_distance(sorted, sc, 0);
        auto [slo, shi] = w1_range(sorted, sc, s);
        e.w1_surr = wasserstein1_cdf(sorted, sc, slo, shi);
    } catch (const InfeasibleError&) {
    }
    return e;
}

class Runner {
public:
    explicit Runner(const ExperimentConfig& cfg) : cfg_(cfg), workers_(resolve_workers(cfg.workers)) {}

    ExperimentResult run() {
        std::vector<std::vector<double>> samples;
        for (std::size_t ni = 0; ni < cfg_.n_list.size(); ++ni) {
            auto s = run_n(ni);
            if (s) samples.push_back(std::move(*s));
        }
        if (cfg_.has(Task::cf_scan)) cf_trend();
        if (cfg_.has(Task::dependence)) guarded("dependence", cfg_.n_list.front(), [&] { dependence(); });
        const bool study = cfg_.n_list.size() >= 3 && samples.size() == cfg_.n_list.size() &&
                           (cfg_.has(Task::edgeworth) || cfg_.has(Task::wasserstein));
        if (study) guarded("convergence", 0, [&] { convergence(samples); });
        return std::move(res_);
    }

private:
    StreamKey key(std::uint32_t root, std::size_t ni) const {
        return StreamKey(cfg_.seed, {root, static_cast<std::uint32_t>(ni)});
    }

    void add(ResultRow r) { res_.rows.push_back(std::move(r)); }

    template <class F>
    void guarded(const std::string& task, std::size_t n, F&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            ResultRow r;
            r.task = task;
            r.n = n;
            r.N = cfg_.N;
            r.target = "-";
            r.metric = "error";
            r.verdict = "error";
            r.message = e.what();
            add(std::move(r));
            ++res_.errors;
        }
    }

    ResultRow row(const std::string& task, std::size_t n, std::size_t N, const std::string& target,
                  const std::string& metric, double value, double se, const std::string& verdict,
                  const StreamKey& k) const {
        ResultRow r;
        r.task = task;
        r.n = n;
        r.N = N;
        r.target = target;
        r.metric = metric;
        r.value = value;
        r.se = se;
        r.verdict = verdict;
        r.seed_path = k.to_string();
        return r;
    }

    std::optional<std::vector<double>> run_n(std::size_t ni) {
        const std::size_t n = cfg_.n_list[ni];
        ModelConfig model = cfg_.model;
        model.n = n;

        if (cfg_.has(Task::assumptions))
            guarded("assumptions", n, [&] { assumptions(model, ni); });

        const bool need_centering = needs_sums(cfg_) && !model.transform.centering &&
                                    !analytic_centering(model);
        if (need_centering) {
            bool ok = true;
            guarded("centering", n, [&] {
                ok = false;
                const auto c = estimate_centering(model, cfg_.centering_N, key(kKeyCentering, ni), workers_);
                add(row("centering", n, c.N, "f(Y)", "mu_f", c.mean, c.se, "info", key(kKeyCentering, ni)));
                ok = true;
            });
            if (!ok) return std::nullopt;
        }
        if (!needs_sums(cfg_)) return std::nullopt;

        std::vector<double> sums;
        bool ok = true;
        guarded("simulate", n, [&] {
            ok = false;
            sums = simulate_normalized_sums(model, cfg_.N, key(kKeySums, ni), workers_);
            ok = true;
        });
        if (!ok) {
            // Report every dependent task explicitly rather than omitting it.
            for (Task t : cfg_.tasks)
                if (t != Task::assumptions && t != Task::dependence)
                    guarded(to_string(t), n, [] { throw Error("simulation failed for this n"); });
            return std::nullopt;
        }
        const auto sorted = sorted_copy(sums);
        CumulantEstimate est;
        guarded("cumulants", n, [&] { est = estimate_cumulants(sums, n); });

        if (cfg_.has(Task::cumulants)) guarded("cumulants", n, [&] { cumulants(model, ni, est); });
        if (cfg_.has(Task::edgeworth)) guarded("edgeworth", n, [&] { edgeworth(ni, est, sorted); });
        if (cfg_.has(Task::wasserstein)) guarded("wasserstein", n, [&] { wasserstein(ni, est, sorted); });
        if (cfg_.has(Task::cf_scan)) guarded("cf-scan", n, [&] { cf_scan(ni, sums); });
        if (cfg_.has(Task::be_characteristic))
            guarded("be-characteristic", n, [&] { be_characteristic(ni, est, sums); });
        if (cfg_.has(Task::price)) guarded("price", n, [&] { price(model, ni, est); });
        return sums;
    }

    void cumulants(const ModelConfig& model, std::size_t ni, const CumulantEstimate& est) {
        const std::size_t n = cfg_.n_list[ni];
        const auto k = key(kKeySums, ni);
        add(row("cumulants", n, est.N, "sample", "s2", est.s2, est.se_s2, "info", k));
        add(row("cumulants", n, est.N, "sample", "k3", est.k3, est.se_k3, "info", k));

        // Exact oracle for i.i.d. discrete models: constant volatility and identity transform.
        if (const auto* g = std::get_if<GarchSpec>(&model.family);
            g && model.innovation.is_discrete() && g->memoryless() &&
            std::holds_alternative<IdentityTransform>(model.transform.variant) &&
            std::all_of(g->g.begin(), g->g.end(), [](const auto& gi) { return gi.u == 0.0; })) {
            double w = 0.0;
            for (const auto& gi : g->g) w += gi.w;
            const double v = std::sqrt(std::pow(w, 1.0 / g->lambda));
            try {
                const auto ex = exact_cumulants_discrete(model.innovation, n);
                const double s2 = ex.s2 * v * v, k3 = ex.k3 * v * v * v;
                const bool p2 = std::abs(est.s2 - s2) <= 4.0 * est.se_s2;
                const bool p3 = std::abs(est.k3 - k3) <= 4.0 * est.se_k3;
                add(row("cumulants", n, est.N, "exact", "s2", s2, std::nan(""), p2 ? "pass" : "fail", k));
                add(row("cumulants", n, est.N, "exact", "k3", k3, std::nan(""), p3 ? "pass" : "fail", k));
            } catch (const CapacityError&) {
            }
        }

        if (cfg_.cumulants.lrv_length > 0) {
            if (std::holds_alternative<CompensatorTransform>(model.transform.variant)) {
                add(row("cumulants", n, 1, "path", "lrv", std::nan(""), std::nan(""), "info",
                        key(kKeyLrv, ni)));
                res_.rows.back().message = "skipped: the compensator depends on the horizon";
                return;
            }
            ModelConfig long_model = model;
            long_model.n = cfg_.cumulants.lrv_length;
            const auto path = simulate_path(long_model, key(kKeyLrv, ni));
            const auto lrv = longrun_variance(path.x, default_bandwidth(path.x.size()));
            add(row("cumulants", n, 1, "path", "lrv", lrv.value, lrv.se,
                    lrv.negative ? "flag" : "info", key(kKeyLrv, ni)));
        }
    }

    void edgeworth(std::size_t ni, const CumulantEstimate& est, const std::vector<double>& sorted) {
        const std::size_t n = cfg_.n_list[ni];
        const auto k = key(kKeySums, ni);
        const double s = std::sqrt(est.s2);
        const double kg = kolmogorov_distance(sorted, [s](double x) { return normal_cdf(x / s); }, 0);
        add(row("edgeworth", n, est.N, "gaussian", "kolmogorov", kg, std::nan(""), "info", k));
        for (auto mode : cfg_.edgeworth.modes) {
            const EdgeworthApprox a(s, est.k3, mode);
            const double ke = kolmogorov_distance(
                sorted, [&a](double x) { return a.cdf(x); }, cfg_.edgeworth.refine);
            add(row("edgeworth", n, est.N, mode_name(mode), "kolmogorov", ke, std::nan(""),
                    ke < kg ? "pass" : "fail", k));
            if (!a.monotone()) res_.rows.back().message = "expansion is not monotone on |x| <= 5s";
        }
    }

    void wasserstein(std::size_t ni, const CumulantEstimate& est, const std::vector<double>& sorted) {
        const std::size_t n = cfg_.n_list[ni];
        const auto k = key(kKeySums, ni);
        const double s = std::sqrt(est.s2);
        const CdfFn gauss = [s](double x) { return normal_cdf(x / s); };
        auto [lo, hi] = w1_range(sorted, gauss, s);
        const double wg = wasserstein1_cdf(sorted, gauss, lo, hi);
        add(row("wasserstein", n, est.N, "gaussian", "wasserstein1", wg, std::nan(""), "info", k));
        const auto law = SurrogateLaw::from_cumulants(est.s2, est.k3);
        const CdfFn sc = [&law](double x) { return law.cdf(x); };
        auto [slo, shi] = w1_range(sorted, sc, s);
        const double ws = wasserstein1_cdf(sorted, sc, slo, shi);
        add(row("wasserstein", n, est.N, "surrogate", "wasserstein1", ws, std::nan(""),
                ws < wg ? "pass" : "fail", k));
    }

    void cf_scan(std::size_t ni, const std::vector<double>& sums) {
        const std::size_t n = cfg_.n_list[ni];
        const auto k = key(kKeySums, ni);
        const auto scan = cf_sup_scan(sums, cfg_.cf_scan.a, cfg_.cf_scan.b, cfg_.cf_scan.grid_size, workers_);
        const double se = 1.0 / std::sqrt(static_cast<double>(sums.size()));
        add(row("cf-scan", n, sums.size(), "empirical", "sup_modulus", scan.sup_modulus, se, "info", k));
        add(row("cf-scan", n, sums.size(), "empirical", "argmax_xi", scan.argmax_xi, std::nan(""), "info", k));
        cf_sup_.push_back({n, scan.sup_modulus, se});
    }

    void cf_trend() {
        if (cf_sup_.size() < 2) return;
        bool ok = true;
        for (std::size_t i = 1; i < cf_sup_.size(); ++i) {
            const auto& a = cf_sup_[i - 1];
            const auto& b = cf_sup_[i];
            if (b.n > a.n && b.sup > a.sup + 3.0 * std::hypot(a.se, b.se)) ok = false;
        }
        add(row("cf-scan", 0, cfg_.N, "empirical", "sup_nonincreasing_in_n", std::nan(""), std::nan(""),
                ok ? "pass" : "fail", StreamKey(cfg_.seed, {kKeySums})));
    }

    void be_characteristic(std::size_t ni, const CumulantEstimate& est, const std::vector<double>& sums) {
        const auto& p = cfg_.be_characteristic;
        const std::size_t n = cfg_.n_list[ni];
        const std::size_t m = std::min(p.max_sample, sums.size());
        const std::span<const double> sub(sums.data(), m);
        const double s = std::sqrt(est.s2);
        const double b_max = std::ldexp(p.a, static_cast<int>(p.max_doublings));
        // Tabulate the empirical cf; linear interpolation error <= h^2 E X^2 / 8.
        const double h = 0.02 / s;
        const std::size_t points = static_cast<std::size_t>(std::ceil((b_max - p.a) / h)) + 1;
        std::vector<double> grid(points);
        for (std::size_t i = 0; i < points; ++i) grid[i] = p.a + h * static_cast<double>(i);
        const auto table = empirical_cf(sub, grid, workers_);
        const CfFn cf = [&](double xi) {
            const double u = std::clamp((xi - p.a) / h, 0.0, static_cast<double>(points - 1));
            const auto i = std::min(static_cast<std::size_t>(u), points - 2);
            const double t = u - static_cast<double>(i);
            return table.values[i] * (1.0 - t) + table.values[i + 1] * t;
        };
        std::vector<double> b_grid;
        for (std::size_t j = 0; j <= p.max_doublings; ++j) b_grid.push_back(std::ldexp(p.a, static_cast<int>(j)));
        std::vector<double> x_grid(p.x_points);
        for (std::size_t i = 0; i < p.x_points; ++i)
            x_grid[i] = -8.0 * s + 16.0 * s * static_cast<double>(i) / static_cast<double>(p.x_points - 1);
        const auto c = berry_esseen_characteristic(cf, p.a, b_grid, x_grid, workers_);
        const auto k = key(kKeySums, ni);
        add(row("be-characteristic", n, m, "empirical", "c_a", c.value, std::nan(""), "info", k));
        add(row("be-characteristic", n, m, "empirical", "argmin_b", c.argmin_b, std::nan(""), "info", k));
    }

    void price(ModelConfig model, std::size_t ni, const CumulantEstimate& est) {
        const std::size_t n = cfg_.n_list[ni];
        double drift;
        if (cfg_.price.drift) {
            drift = *cfg_.price.drift;
        } else {
            const auto d = estimate_drift(model, cfg_.centering_N, key(kKeyCentering, ni), workers_);
            drift = d.drift;
            add(row("price", n, cfg_.centering_N, "drift", "drift", d.drift, d.se, "info",
                    key(kKeyCentering, ni)));
        }
        const auto k = key(kKeyPrice, ni);
        const auto sums = simulate_normalized_sums(model, cfg_.price.N, k, workers_);
        const double s = std::sqrt(est.s2);
        for (double K : cfg_.price.K) {
            const std::string metric = "put_K=" + format_number(K);
            const auto mc = price_put_from_sums(sums, K, drift);
            const double g = price_put_gaussian_oracle(s, K, drift);
            add(row("price", n, cfg_.price.N, "mc", metric, mc.price, mc.se, "info", k));
            add(row("price", n, cfg_.N, "gaussian", metric, g, std::nan(""), "info", key(kKeySums, ni)));
            res_.pricing.push_back({K, n, "mc", mc.price, mc.se, mc.price - g});
            res_.pricing.push_back({K, n, "gaussian", g, std::nan(""), 0.0});
            for (auto mode : cfg_.price.modes) {
                const double e = price_put_edgeworth(est, drift, K, mode);
                const bool ok = std::abs(e - mc.price) <= std::abs(g - mc.price) + 3.0 * mc.se;
                add(row("price", n, cfg_.N, mode_name(mode), metric, e, std::nan(""), ok ? "pass" : "fail",
                        key(kKeySums, ni)));
                res_.pricing.push_back({K, n, mode_name(mode), e, std::nan(""), e - g});
            }
        }
    }

    void assumptions(const ModelConfig& model, std::size_t ni) {
        const std::size_t n = cfg_.n_list[ni];
        AssumptionOptions opt;
        opt.delta = cfg_.assumptions.delta;
        opt.xi_grid = cfg_.assumptions.xi;
        opt.N_outer = cfg_.assumptions.N_outer;
        opt.N_inner = cfg_.assumptions.N_inner;
        const auto k = key(kKeyAssumptions, ni);
        const auto rep = check_assumptions(model, opt, k, workers_);
        for (const auto& item : rep.items) {
            add(row("assumptions", n, opt.N_outer, "model", item.name, item.value, std::nan(""),
                    item.pass ? "pass" : "fail", k));
            res_.rows.back().message = item.detail;
            if (!item.pass) ++res_.assumption_failures;
        }
    }

    void dependence() {
        const auto& p = cfg_.dependence;
        ModelConfig model = cfg_.model;
        model.n = cfg_.n_list.front();
        const StreamKey k(cfg_.seed, {kKeyDependence});
        const auto prof = dependence_profile(model, p.p, p.lags, p.N, k, workers_);
        const std::size_t n = model.n;
        for (std::size_t j = 0; j < prof.lags.size(); ++j) {
            const std::string m = "lambda_" + std::to_string(prof.lags[j]);
            add(row("dependence", n, p.N, "x", m, prof.theta_hat[j], prof.theta_se[j], "info", k));
            add(row("dependence", n, p.N, "y", m, prof.y_theta_hat[j], prof.y_theta_se[j], "info", k));
        }
        if (prof.degenerate) {
            add(row("dependence", n, p.N, "x", "degenerate", 1.0, std::nan(""), "flag", k));
            res_.rows.back().message = "all coupled differences are zero; fit skipped";
            return;
        }
        if (!prof.fitted) {
            add(row("dependence", n, p.N, "x", "fit", std::nan(""), std::nan(""), "flag", k));
            res_.rows.back().message = "fewer than two lags above 5 SE";
            return;
        }
        const bool ok = prof.fit.slope < 0.0 && prof.fit.r2 > 0.9;
        add(row("dependence", n, p.N, "x", "log_slope", prof.fit.slope, std::nan(""), ok ? "pass" : "fail", k));
        add(row("dependence", n, p.N, "x", "r2", prof.fit.r2, std::nan(""), ok ? "pass" : "fail", k));
    }

    void convergence(const std::vector<std::vector<double>>& samples) {
        const std::size_t batches = cfg_.has(Task::wasserstein) ? cfg_.wasserstein.batches : 8;
        res_.slopes = convergence_from_samples(samples, cfg_.n_list, batches, workers_);
        const StreamKey k(cfg_.seed, {kKeySums});
        for (const auto& s : res_.slopes) {
            add(row("convergence", 0, cfg_.N, s.target, s.metric + "_slope", s.slope, s.se, "info", k));
        }
        // Edgeworth below Gaussian (Kolmogorov) at every n.
        const SlopeRow* g = nullptr;
        const SlopeRow* e = nullptr;
        for (const auto& s : res_.slopes) {
            if (s.metric != "kolmogorov") continue;
            if (s.target == "gaussian") g = &s;
            if (s.target == "edgeworth-classical") e = &s;
        }
        if (g && e) {
            bool ok = true;
            for (std::size_t i = 0; i < g->errors.size(); ++i) ok = ok && e->errors[i] < g->errors[i];
            add(row("convergence", 0, cfg_.N, "edgeworth-classical", "below_gaussian_every_n",
                    std::nan(""), std::nan(""), ok ? "pass" : "fail", k));
        }
    }

    struct CfSup {
        std::size_t n;
        double sup;
        double se;
    };

    const ExperimentConfig& cfg_;
    std::size_t workers_;
    ExperimentResult res_;
    std::vector<CfSup> cf_sup_;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) { return Runner(cfg).run(); }

std::vector<SlopeRow> convergence_from_samples(std::span<const std::vector<double>> samples,
                                               std::span<const std::size_t> n_list,
                                               std::size_t batches, std::size_t workers) {
    if (samples.size() != n_list.size() || n_list.size() < 3)
        throw ParameterError("convergence: need at least 3 values of n with samples");
    if (batches < 2) throw ParameterError("convergence: need at least 2 batches");
    const std::size_t L = n_list.size();
    const std::size_t N = samples.front().size();
    for (const auto& s : samples)
        if (s.size() != N) throw ParameterError("convergence: N must be fixed across n");
    const std::size_t bsize = N / batches;
    if (bsize < 100) throw SampleSizeError("convergence: batches need >= 100 replicates");

    // errs[b][i]: b == batches is the full sample.
    std::vector<std::vector<TargetErrors>> errs(batches + 1, std::vector<TargetErrors>(L));
    parallel_for((batches + 1) * L, workers, [&](std::size_t job) {
        const std::size_t b = job / L, i = job % L;
        const auto& s = samples[i];
        const std::span<const double> part =
            b == batches ? std::span<const double>(s) : std::span<const double>(s.data() + b * bsize, bsize);
        errs[b][i] = target_errors(part, n_list[i], 8);
    });

    std::vector<double> logn;
    for (auto n : n_list) logn.push_back(std::log(static_cast<double>(n)));
    struct Pick {
        const char* target;
        const char* metric;
        double TargetErrors::*field;
    };
    const Pick picks[] = {
        {"gaussian", "kolmogorov", &TargetErrors::ks_gauss},
        {"edgeworth-classical", "kolmogorov", &TargetErrors::ks_edge},
        {"surrogate", "kolmogorov", &TargetErrors::ks_surr},
        {"gaussian", "wasserstein1", &TargetErrors::w1_gauss},
        {"edgeworth-classical", "wasserstein1", &TargetErrors::w1_edge},
        {"surrogate", "wasserstein1", &TargetErrors::w1_surr},
    };
    auto slope_of = [&](const std::vector<TargetErrors>& row, double TargetErrors::*f) {
        std::vector<double> y;
        for (const auto& e : row) {
            if (!(e.*f > 0.0)) return std::nan("");
            y.push_back(std::log(e.*f));
        }
        return least_squares(logn, y).slope;
    };
    std::vector<SlopeRow> out;
    for (const auto& pk : picks) {
        SlopeRow r;
        r.target = pk.target;
        r.metric = pk.metric;
        for (const auto& e : errs[batches]) r.errors.push_back(e.*pk.field);
        r.slope = slope_of(errs[batches], pk.field);
        if (std::isnan(r.slope)) continue;
        std::vector<double> bs;
        for (std::size_t b = 0; b < batches; ++b) {
            const double v = slope_of(errs[b], pk.field);
            if (!std::isnan(v)) bs.push_back(v);
        }
        r.se = bs.size() >= 2 ? mean_se(bs).se : std::nan("");
        r.ci_lo = r.slope - 1.96 * r.se;
        r.ci_hi = r.slope + 1.96 * r.se;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<SlopeRow> convergence_study(const ExperimentConfig& cfg) {
    if (cfg.n_list.size() < 3) throw ParameterError("convergence_study: need >= 3 values of n");
    const std::size_t workers = resolve_workers(cfg.workers);
    std::vector<std::vector<double>> samples;
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
        ModelConfig m = cfg.model;
        m.n = cfg.n_list[ni];
        if (!m.transform.centering && !analytic_centering(m))
            estimate_centering(m, cfg.centering_N,
                               StreamKey(cfg.seed, {kKeyCentering, static_cast<std::uint32_t>(ni)}), workers);
        samples.push_back(simulate_normalized_sums(
            m, cfg.N, StreamKey(cfg.seed, {kKeySums, static_cast<std::uint32_t>(ni)}), workers));
    }
    return convergence_from_samples(samples, cfg.n_list,
                                    cfg.has(Task::wasserstein) ? cfg.wasserstein.batches : 8, workers);
}

std::string format_number(double x) {
    if (std::isnan(x)) return "";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

ordered_json number_or_null(double x) {
    if (std::isnan(x)) return nullptr;
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

}  // namespace

std::string to_csv(std::span<const ResultRow> rows) {
    std::string out = "task,n,N,target,metric,value,se,verdict,seed_path\n";
    for (const auto& r : rows) {
        out += csv_field(r.task) + ',' + std::to_string(r.n) + ',' + std::to_string(r.N) + ',' +
               csv_field(r.target) + ',' + csv_field(r.metric) + ',' + format_number(r.value) + ',' +
               format_number(r.se) + ',' + r.verdict + ',' + r.seed_path + '\n';
    }
    return out;
}

std::string pricing_to_csv(std::span<const PricingRow> rows) {
    std::string out = "K,n,mode,price,se,oracle_gap\n";
    for (const auto& r : rows) {
        out += format_number(r.K) + ',' + std::to_string(r.n) + ',' + r.mode + ',' +
               format_number(r.price) + ',' + format_number(r.se) + ',' + format_number(r.oracle_gap) +
               '\n';
    }
    return out;
}

ordered_json to_json(const ExperimentConfig& cfg, const ExperimentResult& res, int code) {
    ordered_json j;
    j["version"] = kLibraryVersion;
    j["seed"] = cfg.seed;
    ordered_json c;
    c["model"] = model_to_json(cfg.model);
    c["n_list"] = cfg.n_list;
    c["N"] = cfg.N;
    c["tasks"] = ordered_json::array();
    for (Task t : cfg.tasks) c["tasks"].push_back(to_string(t));
    c["warn_only"] = cfg.warn_only;
    j["config"] = c;
    j["rows"] = ordered_json::array();
    for (const auto& r : res.rows) {
        ordered_json o;
        o["task"] = r.task;
        o["n"] = r.n;
        o["N"] = r.N;
        o["target"] = r.target;
        o["metric"] = r.metric;
        o["value"] = number_or_null(r.value);
        o["se"] = number_or_null(r.se);
        o["verdict"] = r.verdict;
        o["seed_path"] = r.seed_path;
        if (!r.message.empty()) o["message"] = r.message;
        j["rows"].push_back(o);
    }
    j["pricing"] = ordered_json::array();
    for (const auto& p : res.pricing)
        j["pricing"].push_back({{"K", p.K}, {"n", p.n}, {"mode", p.mode}, {"price", p.price},
                                {"se", number_or_null(p.se)}, {"oracle_gap", p.oracle_gap}});
    j["convergence"] = ordered_json::array();
    for (const auto& s : res.slopes)
        j["convergence"].push_back({{"target", s.target}, {"metric", s.metric}, {"slope", s.slope},
                                    {"se", number_or_null(s.se)}, {"ci", {number_or_null(s.ci_lo), number_or_null(s.ci_hi)}},
                                    {"errors", s.errors}});
    j["status"] = {{"errors", res.errors},
                   {"assumption_failures", res.assumption_failures},
                   {"exit_code", code}};
    return j;
}

int exit_code(const ExperimentConfig& cfg, const ExperimentResult& res) {
    if (res.errors > 0) return 1;
    if (res.assumption_failures > 0 && !cfg.warn_only) return 2;
    return 0;
}

int run_and_write(const ExperimentConfig& cfg) {
    const auto res = run_experiment(cfg);
    const int code = exit_code(cfg, res);
    namespace fs = std::filesystem;
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& body) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error("cannot write '" + (dir / name).string() + "'");
        out << body;
    };
    write(cfg.csv_name, to_csv(res.rows));
    if (!res.pricing.empty()) write(cfg.pricing_csv_name, pricing_to_csv(res.pricing));
    write(cfg.json_name, to_json(cfg, res, code).dump(2) + "\n");
    return code;
}

}  // namespace edgelab
