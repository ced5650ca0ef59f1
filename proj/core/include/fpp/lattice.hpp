#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpp/errors.hpp"

namespace fpp {

// Transverse coordinates of a site. Values are 32-bit; any operation that
// would push a coordinate outside the 32-bit range throws.
using Transverse = std::vector<std::int32_t>;

// A site (n, x) of the even sublattice: layer n plus d transverse
// coordinates, with n + x_1 + ... + x_d even.
struct Site {
    std::int64_t layer = 0;
    Transverse transverse;

    int dim() const { return static_cast<int>(transverse.size()); }
    bool operator==(const Site&) const = default;
};

// Site at the origin of a d-dimensional transverse slice.
Site origin_site(int dim);

bool is_lattice_site(const Site& site);

// Directed bond between adjacent sites one layer apart.
struct Bond {
    Site from;
    Site to;
};

bool is_bond(const Bond& bond);

// One step of a directed path: transverse axis (0-based) and step sign.
struct Move {
    std::int32_t axis = 0;
    std::int32_t step = +1;

    bool operator==(const Move&) const = default;
};

// Directed lattice path stored as a start site plus a move list; the site
// sequence is derived on demand.
struct LatticePath {
    Site start;
    std::vector<Move> moves;

    std::size_t length() const { return moves.size(); }
    int dim() const { return start.dim(); }

    // Site after the first `index` moves (0 = start). Throws Error on
    // 32-bit transverse overflow.
    Site site_at(std::size_t index) const;
    Site endpoint() const { return site_at(moves.size()); }
    std::vector<Site> sites() const;

    bool operator==(const LatticePath&) const = default;
};

struct PathCheck {
    bool ok = true;
    std::size_t violation_index = 0;  // index of the first offending move/site
    Site endpoint;
    std::string reason;
};

// Validates start parity, move axes/steps and coordinate ranges.
PathCheck validate_path(const LatticePath& path);

// Validates that a site sequence forms a directed path (consecutive sites
// adjacent, all on the even lattice).
PathCheck check_site_sequence(std::span<const Site> sites);

// Converts a valid site sequence into move representation; throws ConfigError
// with the first violation otherwise.
LatticePath path_from_sites(std::span<const Site> sites);

// The 2d forward neighbors of a site. Throws ConfigError if the site is not
// on the even lattice.
std::vector<Site> forward_neighbors(const Site& site);

// A sequence of layered points that need not be adjacent; layers strictly
// increase by a fixed even stride. Produced by path symmetrization, where
// coordinate sums leave the lattice.
struct PseudoPoint {
    std::int64_t layer = 0;
    std::vector<std::int64_t> transverse;

    bool operator==(const PseudoPoint&) const = default;
};

class PseudoPath {
public:
    explicit PseudoPath(std::vector<PseudoPoint> points);

    const std::vector<PseudoPoint>& points() const { return points_; }
    std::int64_t stride() const { return stride_; }

private:
    std::vector<PseudoPoint> points_;
    std::int64_t stride_ = 0;
};

// Pointwise path maps. zeta negates transverse axes 2..d and keeps axis 1;
// xi_swap(j) swaps transverse axes 1 and j (j is 1-based); eta negates all
// transverse axes. All preserve path validity.
Site zeta(const Site& site);
Site xi_swap(const Site& site, int j);
Site eta(const Site& site);

LatticePath zeta(const LatticePath& path);
LatticePath xi_swap(const LatticePath& path, int j);
LatticePath eta(const LatticePath& path);

// Shifts the start by `offset`, which must itself satisfy the even-lattice
// parity so the image stays on the lattice.
LatticePath translate(const LatticePath& path, const Site& offset);

// Pointwise sum of the two site sequences (layers add, transverse vectors
// add). Requires equal lengths and equal start layers; the result has
// stride 2.
PseudoPath symmetrized_sum(const LatticePath& a, const LatticePath& b);

// One-line path format: "start_layer x1 .. xd; a1s1 a2s2 ..." with 1-based
// axes and signs '+'/'-', e.g. "0 0 0; 1+ 2-".
std::string to_string(const LatticePath& path);
LatticePath parse_path(std::string_view line);

}  // namespace fpp
