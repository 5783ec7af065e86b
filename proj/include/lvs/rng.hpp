#ifndef LVS_RNG_HPP
#define LVS_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace lvs {

/// Deterministic random stream. Wraps mt19937_64 and derives all variates
/// with fully specified arithmetic so that a given seed produces the same
/// sequence on every platform (the standard distributions do not guarantee
/// that).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection-free modulo bias is negligible for the small n used here,
        // but keep it exact anyway.
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % n;
    }

private:
    std::mt19937_64 engine_;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t splitmix64(std::uint64_t x);

/// Independent substream for (scenario seed, purpose tag, entity index).
std::uint64_t derive_stream(std::uint64_t seed, std::string_view tag, std::uint64_t index);

}  // namespace lvs

#endif  // LVS_RNG_HPP
