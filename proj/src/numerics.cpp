#include "edgelab/numerics.hpp"

#include "edgelab/errors.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

namespace edgelab {

double normal_pdf(double x) noexcept {
    return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x * (0.5 * std::numbers::sqrt2)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ParameterError("normal_quantile: p must lie in (0, 1)");
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

void CompensatedSum::add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
}

MeanSe mean_se(std::span<const double> xs) {
    if (xs.empty()) return {};
    CompensatedSum s;
    for (double x : xs) s.add(x);
    const double n = static_cast<double>(xs.size());
    const double m = s.value() / n;
    if (xs.size() < 2) return {m, 0.0};
    CompensatedSum ss;
    for (double x : xs) ss.add((x - m) * (x - m));
    return {m, std::sqrt(ss.value() / (n - 1.0) / n)};
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ContractError("least_squares: need >= 2 paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw ContractError("least_squares: x values are all equal");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        kron += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    kron *= h;
    gauss *= h;
    return {a, b, kron, std::abs(kron - gauss)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureConfig& cfg) {
    if (a == b) return {0.0, 0.0, 0};
    if (!std::isfinite(a) || !std::isfinite(b))
        throw ParameterError("integrate: limits must be finite");
    const double sign = a < b ? 1.0 : -1.0;
    if (a > b) std::swap(a, b);

    std::priority_queue<Panel> heap;
    Panel first = gk15(f, a, b);
    double total = first.value;
    double err = first.error;
    heap.push(first);
    auto tol = [&] { return std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)); };

    while (err > tol() && heap.size() < cfg.max_intervals) {
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Interval exhausted at machine precision; keep it and stop.
            heap.push(worst);
            break;
        }
        Panel left = gk15(f, worst.a, mid);
        Panel right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed drift from the incremental updates.
    CompensatedSum v, e;
    const std::size_t count = heap.size();
    while (!heap.empty()) {
        v.add(heap.top().value);
        e.add(heap.top().error);
        heap.pop();
    }
    QuadratureResult r{sign * v.value(), e.value(), count};
    if (!(r.error <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(r.value))))
        throw AccuracyError(r.value, r.error, "integrate: tolerance not reached");
    return r;
}

QuadratureResult integrate_split(const std::function<double(double)>& f, double a, double b,
                                 std::span<const double> breaks, const QuadratureConfig& cfg) {
    std::vector<double> pts{a};
    for (double x : breaks)
        if (x > std::min(a, b) && x < std::max(a, b)) pts.push_back(x);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    QuadratureConfig sub = cfg;
    sub.abs_tol = cfg.abs_tol / static_cast<double>(pts.size() - 1);
    QuadratureResult out;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        auto r = integrate(f, pts[i], pts[i + 1], sub);
        out.value += r.value;
        out.error += r.error;
        out.intervals += r.intervals;
    }
    if (a > b) out.value = -out.value;
    return out;
}

GaussRule gauss_legendre(std::size_t n) {
    if (n == 0) throw ParameterError("gauss_legendre: n must be positive");
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / static_cast<double>(j);
            }
            dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace edgelab
