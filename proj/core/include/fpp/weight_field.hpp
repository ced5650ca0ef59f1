#pragma once

#include <cstdint>
#include <span>

#include "fpp/lattice.hpp"
#include "fpp/passage_law.hpp"

namespace fpp {

namespace detail {

// splitmix64 finalizer; the avalanche stage of the keyed bond generator.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

inline double to_unit_open(std::uint64_t h) noexcept {
    // (0,1) exclusive: 53-bit mantissa offset by half a ulp.
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

// Deterministic realization of the i.i.d. bond weight field: each bond's
// weight is a pure function of (seed, bond coordinates), generated counter
// style by hashing the canonical bond encoding and mapping the resulting
// uniform variate through the law quantile. O(1) memory; shareable across
// threads.
class WeightField {
public:
    WeightField(std::uint64_t seed, LawPtr law, int dim);

    std::uint64_t seed() const { return seed_; }
    int dim() const { return dim_; }
    const PassageLaw& law() const { return *law_; }
    const LawPtr& law_ptr() const { return law_; }

    // Uniform variate of the bond leaving (layer, x) with the given move.
    double uniform_at(std::int64_t layer, std::span<const std::int32_t> x,
                      Move move) const noexcept {
        std::uint64_t h = seed_mix_;
        h = detail::mix64(h ^ static_cast<std::uint64_t>(layer));
        for (std::int32_t c : x)
            h = detail::mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(c)));
        const std::uint64_t code =
            (static_cast<std::uint64_t>(move.axis) << 1) | (move.step > 0 ? 1u : 0u);
        h = detail::mix64(h ^ (code + 0x9e3779b97f4a7c15ULL));
        return detail::to_unit_open(h);
    }

    double weight_at(std::int64_t layer, std::span<const std::int32_t> x,
                     Move move) const {
        return law_->quantile(uniform_at(layer, x, move));
    }

    // Validating entry point; throws ConfigError for a malformed bond.
    double bond_weight(const Bond& bond) const;

private:
    std::uint64_t seed_;
    std::uint64_t seed_mix_;
    LawPtr law_;
    int dim_;
};

}  // namespace fpp
