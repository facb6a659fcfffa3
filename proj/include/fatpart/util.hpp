#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

#include "fatpart/errors.hpp"

namespace fatpart {

/// Deterministic 64-bit generator (splitmix64). Used instead of the standard
/// distributions so that seeded output is identical across platforms and
/// standard-library versions.
class Splitmix64 {
public:
    explicit Splitmix64(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1); never returns an exact 0.
    double next_open01() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next() % n; }

private:
    std::uint64_t state_;
};

/// Mixes a base seed with a node id so every node draws from an independent
/// stream; results do not depend on traversal or scheduling order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    Splitmix64 g(seed ^ (0x9e3779b97f4a7c15ULL + salt * 0xff51afd7ed558ccdULL));
    return g.next();
}

/// Shortest round-trip decimal representation of a double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc()) throw InternalError("format_double: to_chars failed");
    return std::string(buf, res.ptr);
}

} // namespace fatpart
