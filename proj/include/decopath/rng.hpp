#ifndef DECOPATH_RNG_HPP
#define DECOPATH_RNG_HPP

#include <cmath>
#include <cstdint>

namespace decopath {

// Counter-based generator keyed by (seed, stream). Streams are independent,
// so ensemble members may draw concurrently without shared state. Output is
// platform-independent: no library distributions are used anywhere.
class Rng {
  public:
    Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream ^ 0x9e3779b97f4a7c15ull))), ctr_(0) {}

    std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ull * ++ctr_); }

    // Uniform on [0,1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; safe under log().
    double uniform_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double exponential() { return -std::log(uniform_pos()); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u = uniform_pos();
        const double v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Index in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 33;
        z *= 0xff51afd7ed558ccdull;
        z ^= z >> 33;
        z *= 0xc4ceb9fe1a85ec53ull;
        z ^= z >> 33;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t ctr_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace decopath

#endif
