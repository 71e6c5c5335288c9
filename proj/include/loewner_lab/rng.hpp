#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace loewner_lab {

// Counter-based generator. Output k of a stream with key K is
// mix64(K + (k+1)*GOLDEN), where mix64 is the SplitMix64 finalizer.
// A stream is therefore fully described by (key, counter), and
// substream(seed, i) derives independent keys for sample farms.
class Rng {
public:
    using result_type = std::uint64_t;

    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    static constexpr std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    explicit Rng(std::uint64_t seed = 0) : key_(mix64(seed ^ 0x6A09E667F3BCC909ULL)) {}

    // Published split function: stream `index` of master seed `seed`.
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        Rng r(seed);
        r.key_ = mix64(r.key_ ^ mix64(index + 0x3C6EF372FE94F82BULL));
        return r;
    }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        ++counter_;
        return mix64(key_ + counter_ * kGolden);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1].
    double uniform_pos() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire's multiply-shift with rejection, exact for every n.
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool coin() { return ((*this)() >> 63) != 0; }

    // Standard normal via Box-Muller; the spare variate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * M_PI * u2;
        spare_ = rad * std::sin(ang);
        has_spare_ = true;
        return rad * std::cos(ang);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace loewner_lab
