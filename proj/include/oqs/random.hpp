// Reproducible RNG streams. A (seed, stream) pair deterministically fixes the
// whole sequence, so trajectory ensembles are bit-identical no matter how the
// work is scheduled across threads. The Gaussian sampler is our own
// (Box-Muller) because std::normal_distribution is not pinned down by the
// standard and would break reproducibility across library versions.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace oqs {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
        : eng_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x1234567887654321ULL))) {}

    std::uint64_t raw() { return eng_(); }

    // uniform on [0, 1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // standard normal, Box-Muller with cached spare
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

  private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace oqs
