#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace farmakit {

/// Deterministic Gaussian source. Seeded explicitly so that simulations are
/// reproducible and replicated experiments can run on independent streams.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(scramble(seed)) {}

    /// Uniform draw in the open interval (0,1).
    double uniform() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal draw (Box-Muller).
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = uniform();
        double v = uniform();
        double r = std::sqrt(-2.0 * std::log(u));
        double a = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Seed of the stream for replicate `rep` of a seeded experiment.
    static std::uint64_t stream(std::uint64_t seed, std::uint64_t rep) {
        return seed + 0x9e3779b97f4a7c15ULL * (rep + 1);
    }

    /// Independent stream for replicate `rep` of a seeded experiment.
    static Rng replicate(std::uint64_t seed, std::uint64_t rep) {
        return Rng(stream(seed, rep));
    }

private:
    // splitmix64 finalizer; spreads low-entropy seeds over the full state.
    static std::uint64_t scramble(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace farmakit
