// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

namespace u6g {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kLightSpeed = 299792458.0;
inline constexpr double kBoltzmann = 1.380649e-23;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Input file could not be read or written.
struct IoError : Error {
    using Error::Error;
};
// Input violates a documented format or invariant.
struct ValidationError : Error {
    using Error::Error;
};
struct EmptyDatasetError : ValidationError {
    using ValidationError::ValidationError;
};
// A numerical procedure could not reach its accuracy target.
struct NumericError : Error {
    using Error::Error;
};

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// Wrap to (-180, 180].
inline double wrap180(double deg)
{
    double w = std::fmod(deg, 360.0);
    if (w <= -180.0)
        w += 360.0;
    else if (w > 180.0)
        w -= 360.0;
    return w;
}

inline double db2lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin2db(double x) { return 10.0 * std::log10(x); }

// splitmix64 finalizer, used to derive independent sub-seeds.
inline std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0)
{
    return mix64(mix64(seed ^ mix64(a + 0x1234567ULL)) ^ mix64(b + 0x89abcdefULL));
}

// Counter-based generator: output i is a pure function of (key, i), so any
// chunking of a sample loop reproduces the same stream.
class Rng {
public:
    explicit Rng(std::uint64_t key, std::uint64_t counter = 0) : key_(key), ctr_(counter) {}

    std::uint64_t next() { return mix64(key_ ^ mix64(ctr_++)); }
    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal()
    {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * kPi * u2);
    }
    std::uint64_t counter() const { return ctr_; }

private:
    std::uint64_t key_;
    std::uint64_t ctr_;
};

// Number of worker threads used by parallel_for; 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs fn(i) for i in [0, n) over the configured worker count. Work items must
// be independent; results must be written to per-index slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace u6g
