#ifndef CSIMPLEX_TYPES_HPP
#define CSIMPLEX_TYPES_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace csimplex {

using Vec = std::vector<double>;

// ---------------------------------------------------------------- errors

struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Backward (or pathological) integration left the admissible log-state box.
struct BlowUpError : std::runtime_error {
    double escape_time;
    int component;
    BlowUpError(double t, int i)
        : std::runtime_error("blow-up at t=" + std::to_string(t) +
                             " in component " + std::to_string(i)),
          escape_time(t), component(i) {}
};

struct HypothesisFailure : std::runtime_error {
    std::string hypothesis;
    HypothesisFailure(std::string hyp, const std::string& msg)
        : std::runtime_error(msg), hypothesis(std::move(hyp)) {}
};

// A pushed-forward mesh no longer covers the direction simplex.
struct MeshFoldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- small vector helpers

inline double norm1(const Vec& x) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
}

inline double norm2(const Vec& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

inline double norm_inf(const Vec& x) {
    double s = 0.0;
    for (double v : x) s = std::max(s, std::abs(v));
    return s;
}

inline Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline double dist2(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline bool all_finite(const Vec& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

inline Vec unit_axis(int d, int i) {
    Vec e(static_cast<size_t>(d), 0.0);
    e[static_cast<size_t>(i)] = 1.0;
    return e;
}

// Orthogonal projection along e onto V = e^perp:  Pi(u) = u - (u.e) e / d.
inline Vec project_along_diagonal(const Vec& u) {
    double s = 0.0;
    for (double v : u) s += v;
    const double mean = s / static_cast<double>(u.size());
    Vec r(u.size());
    for (size_t i = 0; i < u.size(); ++i) r[i] = u[i] - mean;
    return r;
}

// ---------------------------------------------------------------- deterministic RNG helpers

// splitmix-seeded xorshift-style generator; distributions are hand-rolled so
// that output streams are stable across standard library versions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int n) {  // in [0, n)
        return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
    }

    Vec uniform_vec(int d, double lo, double hi) {
        Vec x(static_cast<size_t>(d));
        for (auto& v : x) v = uniform(lo, hi);
        return x;
    }

  private:
    std::uint64_t state_;
};

}  // namespace csimplex

#endif
