#pragma once
// Shared numeric utilities: a deterministic RNG with cheap per-stream
// derivation, locale-independent number formatting, and a small dense
// linear solver for the modest systems that arise in this library
// (fee transforms, stationary vectors, policy evaluation).

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace zeitnot {

// ---------------------------------------------------------------------------
// Deterministic random numbers
// ---------------------------------------------------------------------------
// The standard <random> distributions and std::shuffle are implementation-
// defined, so identical seeds would not reproduce across toolchains. Since
// bit-identical replay is part of the simulator contract, the generator and
// every derived draw are spelled out here.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256** seeded via splitmix64. A (seed, stream) pair always produces
// the same sequence, so stream = trial index gives an order-independent
// per-trial substream.
class Xoshiro256 {
  public:
    explicit Xoshiro256(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t s = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 0x632BE59BD9B4E019ULL));
        for (auto& w : state_) w = splitmix64(s);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform integer in [0, bound) by 128-bit multiply; the residual bias of
    // 2^-64 is far below anything observable at the sample sizes used here.
    std::uint64_t below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    // Uniform double in [0, 1).
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> state_{};
};

// Uniform random permutation of {1..n} via Fisher-Yates on the explicit RNG.
inline std::vector<int> random_permutation(int n, Xoshiro256& rng) {
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i + 1;
    for (int i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(p[static_cast<std::size_t>(i)], p[j]);
    }
    return p;
}

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

// Render with a fixed number of significant digits, always using '.' as the
// decimal separator regardless of the process locale.
inline std::string format_sig(double v, int digits = 12) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v,
                                   std::chars_format::general, digits);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Dense linear algebra
// ---------------------------------------------------------------------------

// Solve A x = b by Gaussian elimination with partial pivoting. A is a square
// row-major matrix, consumed by value. Throws on singular systems.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw std::invalid_argument("solve_dense: size mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (std::fabs(a[pivot][col]) < 1e-300)
            throw std::runtime_error("solve_dense: singular matrix");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        const double inv = 1.0 / a[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = a[r][col] * inv;
            if (factor == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double acc = b[r];
        for (std::size_t c = r + 1; c < n; ++c) acc -= a[r][c] * x[c];
        x[r] = acc / a[r][r];
    }
    return x;
}

} // namespace zeitnot
