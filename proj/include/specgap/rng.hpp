#ifndef SPECGAP_RNG_HPP
#define SPECGAP_RNG_HPP

#include <cmath>
#include <cstdint>

namespace specgap {

// Counter-based random streams: each (seed, stream) pair addresses an
// independent sequence, and any element of the sequence can be produced
// from its counter alone. Streams are assigned one per simulated path so
// path ensembles are reproducible regardless of evaluation order.
//
// The mixer is two rounds of the splitmix64/murmur finalizer over a
// combination of seed, stream and counter; this is the standard
// construction for simulation-grade counter RNGs.
class CounterRng {
public:
    CounterRng(uint64_t seed, uint64_t stream)
        : base_(mix(seed ^ 0x9e3779b97f4a7c15ULL) ^ mix(stream * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL)),
          counter_(0) {}

    uint64_t next_u64() { return mix(base_ ^ (0x9e3779b97f4a7c15ULL * ++counter_)); }

    // uniform in (0, 1); never returns 0 or 1
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    // standard normal via Box-Muller; draws are buffered in pairs
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    static uint64_t mix(uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
        z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
        return z ^ (z >> 33);
    }

    uint64_t base_;
    uint64_t counter_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace specgap

#endif
