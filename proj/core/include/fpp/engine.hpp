#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpp/lattice.hpp"
#include "fpp/weight_field.hpp"

namespace fpp {

// Passage times from a fixed source to every reachable site of one layer.
// Cells off parity or outside the forward cone hold +infinity.
struct LayerFront {
    std::int64_t layer = 0;
    Transverse lo, hi;            // inclusive box bounds
    std::vector<double> values;   // row-major over the box

    bool contains(std::span<const std::int32_t> x) const;
    double at(std::span<const std::int32_t> x) const;  // throws ConfigError outside box

    // CSV rows "layer,x1..xd,value" for the finite cells, in row-major order.
    std::string to_csv(bool header = true) const;
};

struct PassageResult {
    double value = 0.0;
    std::optional<LatticePath> geodesic;

    std::string to_json() const;
};

// True when a directed path from source to target exists: both sites on the
// lattice, equal dimension, and layer gap at least the l1 transverse gap.
bool is_reachable(const Site& source, const Site& target);

// Min-plus dynamic program over m layers; the full forward cone of `source`.
LayerFront layer_passage_times(const WeightField& field, const Site& source,
                               std::int64_t m);

// Fronts for every layer 0..m in one sweep.
std::vector<LayerFront> layer_front_sequence(const WeightField& field,
                                             const Site& source, std::int64_t m);

// Passage time T(source, target). Throws UnreachableError when no directed
// path exists.
double min_passage_time(const WeightField& field, const Site& source,
                        const Site& target);

// Passage time of an explicit path: the sum of its bond weights in move
// order. Throws ConfigError for invalid paths or dimension mismatches.
double path_time(const WeightField& field, const LatticePath& path);

// Passage time plus the argmin path. Ties between predecessors resolve to
// the lexicographically smallest transverse vector, so the output is
// deterministic even for atomic laws.
PassageResult geodesic(const WeightField& field, const Site& source,
                       const Site& target);

// Exhaustive enumeration over all (2d)^{layers} move sequences; the testing
// oracle. Guarded to layer spans <= 12.
double brute_force_passage(const WeightField& field, const Site& source,
                           const Site& target);
std::map<Transverse, double> brute_force_front(const WeightField& field,
                                               const Site& source, std::int64_t m);

// Functional-weight variants for oracles over surgically modified fields.
using WeightFn =
    std::function<double(std::int64_t layer, std::span<const std::int32_t> x, Move move)>;
double brute_force_passage(const WeightFn& weights, int dim, const Site& source,
                           const Site& target);
std::map<Transverse, double> brute_force_front(const WeightFn& weights, int dim,
                                               const Site& source, std::int64_t m);

// Sum of segment passage times; segments need not connect. Used for the
// skeleton passage times of coarse-grained and augmented skeletons.
double skeleton_passage_time(const WeightField& field,
                             std::span<const std::pair<Site, Site>> segments);

}  // namespace fpp
