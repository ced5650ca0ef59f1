#include "fpp/weight_field.hpp"

#include "fpp/errors.hpp"

namespace fpp {

WeightField::WeightField(std::uint64_t seed, LawPtr law, int dim)
    : seed_(seed), seed_mix_(detail::mix64(seed ^ 0x6a09e667f3bcc909ULL)),
      law_(std::move(law)), dim_(dim) {
    if (!law_) throw ConfigError("weight field: null law");
    if (dim_ < 1) throw ConfigError("weight field: dimension must be >= 1");
}

double WeightField::bond_weight(const Bond& bond) const {
    if (bond.from.dim() != dim_)
        throw ConfigError("bond_weight: bond dimension mismatch");
    if (!is_bond(bond)) throw ConfigError("bond_weight: not a valid bond");
    Move move{};
    for (int a = 0; a < dim_; ++a) {
        const std::int32_t diff = bond.to.transverse[static_cast<std::size_t>(a)] -
                                  bond.from.transverse[static_cast<std::size_t>(a)];
        if (diff != 0) {
            move = Move{a, diff};
            break;
        }
    }
    return weight_at(bond.from.layer, bond.from.transverse, move);
}

}  // namespace fpp
