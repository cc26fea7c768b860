#include "edgelab/metrics.hpp"

#include "edgelab/errors.hpp"
#include "edgelab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace edgelab {

namespace {

void require_sorted(std::span<const double> xs, const char* who) {
    if (xs.empty()) throw ContractError(std::string(who) + ": sample is empty");
    if (!std::is_sorted(xs.begin(), xs.end()))
        throw ContractError(std::string(who) + ": sample must be sorted ascending");
}

// Simpson on |g| over [a, b] given g at both ends and the midpoint.
double simpson_abs(double h, double ga, double gm, double gb) {
    return h / 6.0 * (std::abs(ga) + 4.0 * std::abs(gm) + std::abs(gb));
}

}  // namespace

double kolmogorov_distance(std::span<const double> sorted, const CdfFn& target,
                           std::size_t refine) {
    require_sorted(sorted, "kolmogorov_distance");
    const double N = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = target(sorted[i]);
        const double below = static_cast<double>(i) / N;
        const double above = static_cast<double>(i + 1) / N;
        d = std::max({d, std::abs(above - f), std::abs(below - f)});
        if (refine == 0 || i + 1 == sorted.size()) continue;
        const double h = sorted[i + 1] - sorted[i];
        if (h <= 0.0) continue;
        for (std::size_t k = 1; k <= refine; ++k) {
            const double x = sorted[i] + h * static_cast<double>(k) / static_cast<double>(refine + 1);
            d = std::max(d, std::abs(above - target(x)));
        }
    }
    return d;
}

double wasserstein1_cdf(std::span<const double> sorted, const CdfFn& target, double lo,
                        double hi) {
    require_sorted(sorted, "wasserstein1_cdf");
    constexpr double kTailMass = 1e-8;
    if (!(lo < hi) || lo > sorted.front() || hi < sorted.back())
        throw CoverageError("wasserstein1_cdf: range does not contain the sample");
    if (std::abs(target(lo)) > kTailMass || std::abs(1.0 - target(hi)) > kTailMass)
        throw CoverageError("wasserstein1_cdf: range misses target mass beyond 1e-8");

    const std::size_t n = sorted.size();
    const double N = static_cast<double>(n);
    const double wide = (hi - lo) * 1e-3;
    const QuadratureConfig quad{1e-11, 0.0, 20000};

    CompensatedSum total;
    total.add(integrate([&](double x) { return std::abs(target(x)); }, lo, sorted.front(), quad)
                  .value);
    total.add(integrate([&](double x) { return std::abs(1.0 - target(x)); }, sorted.back(), hi,
                        quad)
                  .value);

    double f_left = target(sorted.front());
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = sorted[i];
        const double b = sorted[i + 1];
        const double f_right = target(b);
        const double h = b - a;
        if (h <= 0.0) {
            f_left = f_right;
            continue;
        }
        const double c = static_cast<double>(i + 1) / N;
        if (h > wide) {
            total.add(integrate([&](double x) { return std::abs(target(x) - c); }, a, b, quad)
                          .value);
        } else {
            const double ga = f_left - c;
            const double gb = f_right - c;
            const double gm = target(0.5 * (a + b)) - c;
            const bool same = (ga >= 0 && gm >= 0 && gb >= 0) || (ga <= 0 && gm <= 0 && gb <= 0);
            if (same) {
                total.add(simpson_abs(h, ga, gm, gb));
            } else {
                // One crossing inside a short gap: split at the interpolated root.
                double r;
                if ((ga < 0) != (gm < 0))
                    r = a + 0.5 * h * ga / (ga - gm);
                else
                    r = 0.5 * (a + b) + 0.5 * h * gm / (gm - gb);
                r = std::clamp(r, a, b);
                const double gr = target(r) - c;
                total.add(simpson_abs(r - a, ga, target(0.5 * (a + r)) - c, gr));
                total.add(simpson_abs(b - r, gr, target(0.5 * (r + b)) - c, gb));
            }
        }
        f_left = f_right;
    }
    return total.value();
}

double wasserstein1_samples(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ContractError("wasserstein1_samples: samples must have equal length");
    if (a.empty()) throw ContractError("wasserstein1_samples: samples are empty");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    CompensatedSum s;
    for (std::size_t i = 0; i < sa.size(); ++i) s.add(std::abs(sa[i] - sb[i]));
    return s.value() / static_cast<double>(sa.size());
}

EmpiricalCf empirical_cf(std::span<const double> sample, std::span<const double> xi_grid,
                         std::size_t workers) {
    if (sample.empty()) throw ContractError("empirical_cf: sample is empty");
    for (double xi : xi_grid)
        if (!std::isfinite(xi)) throw ParameterError("empirical_cf: grid must be finite");
    EmpiricalCf out;
    out.values.resize(xi_grid.size());
    out.moduli.resize(xi_grid.size());
    const double N = static_cast<double>(sample.size());
    parallel_for(xi_grid.size(), workers, [&](std::size_t g) {
        const double xi = xi_grid[g];
        CompensatedSum re, im;
        for (double x : sample) {
            re.add(std::cos(xi * x));
            im.add(std::sin(xi * x));
        }
        out.values[g] = {re.value() / N, im.value() / N};
        out.moduli[g] = std::abs(out.values[g]);
    });
    out.error_bar = 1.0 / std::sqrt(N);
    return out;
}

CfScan cf_sup_scan(std::span<const double> sample, double a, double b, std::size_t grid_size,
                   std::size_t workers) {
    if (!(a > 0.0) || !(b > a)) throw ParameterError("cf_sup_scan: need 0 < a < b");
    if (grid_size < 64) throw ParameterError("cf_sup_scan: grid_size must be >= 64");
    CfScan scan;
    scan.grid.resize(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i)
        scan.grid[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    auto cf = empirical_cf(sample, scan.grid, workers);
    scan.moduli = std::move(cf.moduli);
    const auto it = std::max_element(scan.moduli.begin(), scan.moduli.end());
    scan.sup_modulus = *it;
    scan.argmax_xi = scan.grid[static_cast<std::size_t>(it - scan.moduli.begin())];
    return scan;
}

double berry_esseen_tail(const CfFn& cf, double a, double b, double x,
                         const QuadratureConfig& quad) {
    if (!(a >= 0.0) || !(b >= a) || !std::isfinite(b))
        throw ParameterError("berry_esseen_tail: need 0 <= a <= b < inf");
    if (a == b) return 0.0;
    auto integrand = [&](double xi) {
        const std::complex<double> z = std::polar(1.0, -xi * x) * cf(xi);
        return 2.0 * z.imag() * (1.0 - xi / b) / xi;
    };
    // Panels of half an oscillation period keep the adaptive rule honest.
    const double per = std::numbers::pi / std::max(std::abs(x), 1.0);
    const auto panels = static_cast<std::size_t>(
        std::clamp(std::ceil((b - a) / per), 1.0, 4096.0));
    std::vector<double> breaks;
    for (std::size_t k = 1; k < panels; ++k)
        breaks.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(panels));
    return integrate_split(integrand, a, b, breaks, quad).value;
}

BerryEsseenCharacteristic berry_esseen_characteristic(const CfFn& cf, double a,
                                                      std::span<const double> b_grid,
                                                      std::span<const double> x_grid,
                                                      std::size_t workers) {
    if (b_grid.empty() || x_grid.empty())
        throw ParameterError("berry_esseen_characteristic: empty grid");
    for (std::size_t i = 0; i < b_grid.size(); ++i) {
        if (b_grid[i] < a) throw ParameterError("berry_esseen_characteristic: b below a");
        if (i > 0 && !(b_grid[i] > b_grid[i - 1]))
            throw ParameterError("berry_esseen_characteristic: b_grid must increase");
    }
    const std::size_t nx = x_grid.size();
    std::vector<double> tails(b_grid.size() * nx);
    parallel_for(tails.size(), workers, [&](std::size_t k) {
        tails[k] = std::abs(berry_esseen_tail(cf, a, b_grid[k / nx], x_grid[k % nx]));
    });
    BerryEsseenCharacteristic out;
    out.value = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b_grid.size(); ++j) {
        const auto first = tails.begin() + static_cast<std::ptrdiff_t>(j * nx);
        const double v = *std::max_element(first, first + static_cast<std::ptrdiff_t>(nx)) +
                         1.0 / b_grid[j];
        out.per_b.push_back(v);
        if (v < out.value) {
            out.value = v;
            out.argmin_b = b_grid[j];
        }
    }
    return out;
}

std::vector<double> default_b_grid(double a) {
    std::vector<double> g;
    for (int j = 0; j <= 10; ++j) g.push_back(std::ldexp(a, j));
    return g;
}

std::vector<double> default_x_grid(double s) {
    std::vector<double> g(129);
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = -8.0 * s + 16.0 * s * static_cast<double>(i) / 128.0;
    return g;
}

std::string to_string(MetricTarget t) {
    switch (t) {
        case MetricTarget::edgeworth: return "edgeworth";
        case MetricTarget::surrogate: return "surrogate";
        case MetricTarget::gaussian: return "gaussian";
    }
    return "unknown";
}

}  // namespace edgelab
