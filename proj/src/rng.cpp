#include "edgelab/rng.hpp"

#include "edgelab/errors.hpp"
#include "edgelab/numerics.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace edgelab {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// E|Z|^k for standard normal, integer k >= 0.
double normal_raw_moment(int k) {
    if (k % 2 == 1) return 0.0;
    double m = 1.0;
    for (int j = k - 1; j > 0; j -= 2) m *= j;
    return m;
}

}  // namespace

StreamKey StreamKey::child(std::uint32_t index) const {
    StreamKey k = *this;
    k.path.push_back(index);
    return k;
}

std::string StreamKey::to_string() const {
    std::ostringstream os;
    os << master_seed;
    for (auto p : path) os << '/' << p;
    return os.str();
}

RandomStream::RandomStream(const StreamKey& key) {
    // Hash (seed, path length, path entries) into a 64-bit state; the length
    // term keeps {1} and {1, 0} apart.
    std::uint64_t h = mix64(key.master_seed + kGolden);
    h = mix64(h ^ (static_cast<std::uint64_t>(key.path.size()) * kGolden));
    for (std::size_t i = 0; i < key.path.size(); ++i) {
        h = mix64(h + kGolden * (i + 1) + (static_cast<std::uint64_t>(key.path[i]) << 1 | 1));
    }
    for (auto& w : s_) {
        h += kGolden;
        w = mix64(h);
    }
}

std::uint64_t RandomStream::next_u64() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RandomStream::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

double RandomStream::exponential() noexcept { return -std::log(uniform_open()); }

double RandomStream::gamma(double shape) noexcept {
    if (shape < 1.0) {
        const double g = gamma(shape + 1.0);
        return g * std::pow(uniform_open(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

// ---------------------------------------------------------------------------

void DistSpec::validate() const {
    auto finite = [](double x) { return std::isfinite(x); };
    std::visit(overloaded{
                   [](const StandardNormal&) {},
                   [&](const Uniform& d) {
                       if (!finite(d.a) || !finite(d.b) || !(d.a < d.b))
                           throw ParameterError("uniform: need finite a < b");
                   },
                   [&](const CenteredExponential& d) {
                       if (!finite(d.rate) || !(d.rate > 0.0))
                           throw ParameterError("centered-exponential: rate must be > 0");
                   },
                   [&](const TwoPoint& d) {
                       if (!(d.p >= 0.0 && d.p <= 1.0))
                           throw ParameterError("two-point: p must lie in [0, 1]");
                       if (!finite(d.x_lo) || !finite(d.x_hi))
                           throw ParameterError("two-point: atoms must be finite");
                   },
                   [&](const ThreePoint& d) {
                       const double p3 = 1.0 - d.p1 - d.p2;
                       if (!(d.p1 >= 0.0 && d.p1 <= 1.0 && d.p2 >= 0.0 && d.p2 <= 1.0) ||
                           p3 < -1e-12)
                           throw ParameterError(
                               "three-point: probabilities must lie in [0, 1] and sum to 1");
                       if (!finite(d.x1) || !finite(d.x2) || !finite(d.x3))
                           throw ParameterError("three-point: atoms must be finite");
                   },
                   [&](const GammaDist& d) {
                       if (!finite(d.shape) || !(d.shape > 0.0))
                           throw ParameterError("gamma: shape must be > 0");
                       if (!finite(d.rate) || !(d.rate > 0.0))
                           throw ParameterError("gamma: rate must be > 0");
                   },
               },
               v_);
}

std::string DistSpec::name() const {
    return std::visit(overloaded{
                          [](const StandardNormal&) { return std::string("standard-normal"); },
                          [](const Uniform&) { return std::string("uniform"); },
                          [](const CenteredExponential&) {
                              return std::string("centered-exponential");
                          },
                          [](const TwoPoint&) { return std::string("two-point"); },
                          [](const ThreePoint&) { return std::string("three-point"); },
                          [](const GammaDist&) { return std::string("gamma"); },
                      },
                      v_);
}

bool DistSpec::is_discrete() const noexcept {
    return std::holds_alternative<TwoPoint>(v_) || std::holds_alternative<ThreePoint>(v_);
}

std::vector<Atom> DistSpec::atoms() const {
    std::vector<Atom> out;
    auto push = [&](double x, double p) {
        if (p > 0.0) out.push_back({x, p});
    };
    if (const auto* d = std::get_if<TwoPoint>(&v_)) {
        push(d->x_lo, 1.0 - d->p);
        push(d->x_hi, d->p);
    } else if (const auto* d3 = std::get_if<ThreePoint>(&v_)) {
        push(d3->x1, d3->p1);
        push(d3->x2, d3->p2);
        push(d3->x3, std::max(0.0, 1.0 - d3->p1 - d3->p2));
    } else {
        throw ParameterError(name() + " is not a discrete law");
    }
    return out;
}

double DistSpec::raw_moment(int k) const {
    if (k < 0) throw ParameterError("raw_moment: k must be >= 0");
    if (k == 0) return 1.0;
    return std::visit(
        overloaded{
            [&](const StandardNormal&) { return normal_raw_moment(k); },
            [&](const Uniform& d) {
                return (std::pow(d.b, k + 1) - std::pow(d.a, k + 1)) / ((k + 1) * (d.b - d.a));
            },
            [&](const CenteredExponential& d) {
                // E (E - 1)^k for E ~ Exp(1): !k (subfactorial), then scale.
                double sub = 1.0;  // !0
                for (int j = 1; j <= k; ++j) sub = j * sub + ((j % 2 == 0) ? 1.0 : -1.0);
                return sub / std::pow(d.rate, k);
            },
            [&](const TwoPoint&) {
                double m = 0.0;
                for (const auto& a : atoms()) m += a.p * std::pow(a.x, k);
                return m;
            },
            [&](const ThreePoint&) {
                double m = 0.0;
                for (const auto& a : atoms()) m += a.p * std::pow(a.x, k);
                return m;
            },
            [&](const GammaDist& d) {
                double m = 1.0;
                for (int j = 0; j < k; ++j) m *= (d.shape + j);
                return m / std::pow(d.rate, k);
            },
        },
        v_);
}

double DistSpec::mean() const { return raw_moment(1); }

double DistSpec::variance() const {
    const double m = mean();
    return raw_moment(2) - m * m;
}

double DistSpec::pdf(double x) const {
    return std::visit(
        overloaded{
            [&](const StandardNormal&) { return normal_pdf(x); },
            [&](const Uniform& d) { return (x >= d.a && x <= d.b) ? 1.0 / (d.b - d.a) : 0.0; },
            [&](const CenteredExponential& d) {
                const double e = x + 1.0 / d.rate;
                return e < 0.0 ? 0.0 : d.rate * std::exp(-d.rate * e);
            },
            [&](const TwoPoint&) -> double {
                throw ParameterError("two-point law has no density");
            },
            [&](const ThreePoint&) -> double {
                throw ParameterError("three-point law has no density");
            },
            [&](const GammaDist& d) {
                if (x <= 0.0) return 0.0;
                return boost::math::gamma_p_derivative(d.shape, d.rate * x) * d.rate;
            },
        },
        v_);
}

double DistSpec::cdf(double x) const {
    return std::visit(
        overloaded{
            [&](const StandardNormal&) { return normal_cdf(x); },
            [&](const Uniform& d) {
                if (x <= d.a) return 0.0;
                if (x >= d.b) return 1.0;
                return (x - d.a) / (d.b - d.a);
            },
            [&](const CenteredExponential& d) {
                const double e = x + 1.0 / d.rate;
                return e <= 0.0 ? 0.0 : -std::expm1(-d.rate * e);
            },
            [&](const TwoPoint&) {
                double c = 0.0;
                for (const auto& a : atoms())
                    if (a.x <= x) c += a.p;
                return c;
            },
            [&](const ThreePoint&) {
                double c = 0.0;
                for (const auto& a : atoms())
                    if (a.x <= x) c += a.p;
                return c;
            },
            [&](const GammaDist& d) {
                return x <= 0.0 ? 0.0 : boost::math::gamma_p(d.shape, d.rate * x);
            },
        },
        v_);
}

std::pair<double, double> DistSpec::effective_support() const {
    return std::visit(
        overloaded{
            [](const StandardNormal&) { return std::pair{-9.0, 9.0}; },
            [](const Uniform& d) { return std::pair{d.a, d.b}; },
            [](const CenteredExponential& d) {
                return std::pair{-1.0 / d.rate, 40.0 / d.rate};
            },
            [&](const TwoPoint&) -> std::pair<double, double> {
                throw ParameterError("discrete law has no continuous support");
            },
            [&](const ThreePoint&) -> std::pair<double, double> {
                throw ParameterError("discrete law has no continuous support");
            },
            [](const GammaDist& d) {
                const double hi = boost::math::gamma_q_inv(d.shape, 1e-17) / d.rate;
                return std::pair{0.0, hi};
            },
        },
        v_);
}

double sample(RandomStream& rng, const DistSpec& spec) {
    return std::visit(overloaded{
                          [&](const StandardNormal&) { return rng.normal(); },
                          [&](const Uniform& d) { return d.a + (d.b - d.a) * rng.uniform(); },
                          [&](const CenteredExponential& d) {
                              return (rng.exponential() - 1.0) / d.rate;
                          },
                          [&](const TwoPoint& d) {
                              return rng.uniform() < d.p ? d.x_hi : d.x_lo;
                          },
                          [&](const ThreePoint& d) {
                              const double u = rng.uniform();
                              if (u < d.p1) return d.x1;
                              if (u < d.p1 + d.p2) return d.x2;
                              return d.x3;
                          },
                          [&](const GammaDist& d) { return rng.gamma(d.shape) / d.rate; },
                      },
                      spec.variant());
}

std::vector<double> sample(RandomStream& rng, const DistSpec& spec, std::size_t count) {
    spec.validate();
    std::vector<double> out(count);
    for (auto& x : out) x = sample(rng, spec);
    return out;
}

}  // namespace edgelab
