#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>
#include <utility>

namespace sgcis {

namespace detail {

inline std::uint64_t splitmix64_finalize(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Seed of an independent substream (one per particle index): a pure
/// function of (master, stream), so any thread can open any particle's
/// stream without coordination.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream) {
    return detail::splitmix64_finalize(
        detail::splitmix64_finalize(master + 0x9e3779b97f4a7c15ULL) ^
        (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
}

/// splitmix64 sequence: output n is a pure function of (seed, n).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return detail::splitmix64_finalize(state_);
    }

    /// Uniform on (0, 1]; never 0, so log() stays finite.
    double uniform() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    /// Box-Muller pair of independent standard normals.
    std::pair<double, double> gaussian_pair() {
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double phi = 2.0 * std::numbers::pi * uniform();
        return {r * std::cos(phi), r * std::sin(phi)};
    }

private:
    std::uint64_t state_;
};

}  // namespace sgcis
