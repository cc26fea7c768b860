#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace edgelab {

/// Identifies one random stream: a master seed plus a hierarchical path such
/// as {task, n-index, replicate}. Streams are a pure function of the key.
struct StreamKey {
    std::uint64_t master_seed = 0;
    std::vector<std::uint32_t> path;

    StreamKey() = default;
    explicit StreamKey(std::uint64_t seed, std::vector<std::uint32_t> p = {})
        : master_seed(seed), path(std::move(p)) {}

    /// Key with `index` appended to the path.
    StreamKey child(std::uint32_t index) const;

    /// Stable textual form, e.g. "42/3/0/17".
    std::string to_string() const;

    friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// xoshiro256++ seeded from a splitmix64 hash of the key. Single owner; never
/// share one stream between threads.
class RandomStream {
public:
    explicit RandomStream(const StreamKey& key);

    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform on (0, 1).
    double uniform_open() noexcept;
    /// Standard normal (Marsaglia polar method, spare value cached).
    double normal() noexcept;
    /// Standard exponential.
    double exponential() noexcept;
    /// Gamma(shape, 1) by Marsaglia-Tsang rejection; boosted for shape < 1.
    double gamma(double shape) noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline RandomStream derive_stream(const StreamKey& key) { return RandomStream(key); }

// ---------------------------------------------------------------------------
// Innovation and surrogate laws

struct StandardNormal {};
struct Uniform {
    double a = -1.0;
    double b = 1.0;
};
/// Exp(rate) shifted by its mean 1/rate.
struct CenteredExponential {
    double rate = 1.0;
};
/// P(X = x_hi) = p, P(X = x_lo) = 1 - p.
struct TwoPoint {
    double p = 0.5;
    double x_lo = -1.0;
    double x_hi = 1.0;
};
/// P(X = x1) = p1, P(X = x2) = p2, P(X = x3) = 1 - p1 - p2.
struct ThreePoint {
    double p1 = 0.0;
    double p2 = 0.0;
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;
};
/// Gamma in shape-rate form: density proportional to x^(shape-1) e^(-rate x).
struct GammaDist {
    double shape = 1.0;
    double rate = 1.0;
};

using DistVariant =
    std::variant<StandardNormal, Uniform, CenteredExponential, TwoPoint, ThreePoint, GammaDist>;

struct Atom {
    double x;
    double p;
};

class DistSpec {
public:
    DistSpec() = default;
    template <class T>
    DistSpec(T v) : v_(v) {}  // NOLINT(google-explicit-constructor)

    const DistVariant& variant() const noexcept { return v_; }

    /// Throws ParameterError when the parameters violate the law's domain.
    void validate() const;

    std::string name() const;
    bool is_discrete() const noexcept;
    /// Atoms of a discrete law (zero-probability atoms dropped).
    std::vector<Atom> atoms() const;

    double mean() const;
    double variance() const;
    /// E X^k, closed form for every variant.
    double raw_moment(int k) const;

    /// Density of a continuous law; ParameterError for discrete laws.
    double pdf(double x) const;
    double cdf(double x) const;
    /// Interval carrying all but ~1e-16 of the mass of a continuous law.
    std::pair<double, double> effective_support() const;

private:
    DistVariant v_ = StandardNormal{};
};

double sample(RandomStream& rng, const DistSpec& spec);
std::vector<double> sample(RandomStream& rng, const DistSpec& spec, std::size_t count);

}  // namespace edgelab
