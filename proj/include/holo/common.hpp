#pragma once

#include <complex>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace holo {

using c64 = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// wrap into [0, 2pi)
inline double wrap_phase(double phi) {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w;
}

// signed wrap into [-pi, pi), used when comparing phases
inline double wrap_signed(double phi) {
    double w = std::fmod(phi + kPi, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w - kPi;
}

inline double sigmoid(double x) {
    // split to avoid overflow of exp for large |x|
    if (x >= 0.0) {
        double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

// FNV-1a, used for config hashes and array fingerprints in logs
inline std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

template <class T>
std::uint64_t fnv1a64_vec(const std::vector<T>& v, std::uint64_t seed = 0xcbf29ce484222325ull) {
    static_assert(std::is_trivially_copyable_v<T>);
    return fnv1a64(v.data(), v.size() * sizeof(T), seed);
}

inline std::string hex64(std::uint64_t h) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

// Sum with a fixed reduction order regardless of thread count: callers
// compute independent partials (e.g. one per row) and we fold them
// sequentially.  Parallelism happens inside the partials.
inline double fold_partials(const std::vector<double>& partials) {
    double acc = 0.0;
    for (double p : partials) acc += p;
    return acc;
}

struct HoloError : std::runtime_error {
    std::string kind;  // "config", "io", "usage", "numeric"
    HoloError(std::string k, const std::string& msg) : std::runtime_error(msg), kind(std::move(k)) {}
};

}  // namespace holo
