#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fpp/lattice.hpp"
#include "fpp/scaling.hpp"

namespace fpp {

// Block geometry for the coarse-grained skeleton constructions: block length
// n, block count k, unexcessive radius h_n, the grid scale
// u_n = 2*floor(h_n / (2*phi(n))), and the boundary offset n1.
struct CoarseParams {
    std::int64_t n = 0;
    std::int64_t k = 0;
    std::int64_t h_n = 0;
    std::int64_t u_n = 0;
    std::int64_t n1 = 0;
    std::int64_t phi = 0;
    double c3 = 1.0;

    // Derives u_n and phi(n) and validates; n1 defaults to 2d*floor(n/phi(n))
    // rounded down to even. h_n < 2*phi(n) makes u_n vanish and is rejected.
    static CoarseParams make(std::int64_t n, std::int64_t k, std::int64_t h_n,
                             double c3, int dim,
                             std::optional<std::int64_t> n1_override = {});
};

struct SimpleSkeleton {
    std::vector<Site> points;  // (jn, x^{(jn)}), j = 0..k
};

// Sites of the path at layers 0, n, 2n, ..., requires length divisible by n
// and a start at layer 0.
SimpleSkeleton simple_skeleton(const LatticePath& path, std::int64_t n);

// The coarse-grained point of `target_layer` nearest to site.transverse in
// l1 norm on the u_n grid; ties resolve to the lexicographically smallest
// grid vector. The result moves each coordinate by at most u_n/2.
Site pi_project(const Site& site, std::int64_t target_layer, std::int64_t u_n);

struct BlockClassification {
    std::set<std::int64_t> excessive;  // E_ex, 1-based block indices
    std::set<std::int64_t> sidestep;   // E_side, disjoint from E_ex
    std::int64_t b_nk = 0;             // floor(k log log n / log n)
    bool used_fallback = false;        // envelope rule stood in for missing s_hat

    std::set<std::int64_t> all() const;
};

// Classifies the k blocks of a path of length k*n: excessive blocks by the
// s_hat(n, increment) threshold, sidestep blocks by the h_n displacement test
// near block boundaries. Missing s_hat values fall back to the envelope rule
// |x|_inf <= sqrt(n) log n, flagged.
BlockClassification classify_blocks(const LatticePath& path,
                                    const CoarseParams& params,
                                    const ExcessSource& s_field);

struct SkeletonTuple {
    enum class Kind { regular, excessive, sidestep };
    Kind kind = Kind::regular;
    std::vector<Site> sites;  // 2 sites, or 4 for sidestep tuples
};

struct CGApproxSkeleton {
    std::vector<SkeletonTuple> tuples;  // R_j, j = 1..k
    std::string to_json() const;
};

CGApproxSkeleton cg_approx_skeleton(const LatticePath& path,
                                    const CoarseParams& params,
                                    const BlockClassification& classification);

// E_side as recomputed from the tuple arity alone (sidestep tuples are the
// 4-tuples); the round-trip counterpart of classify_blocks.
std::set<std::int64_t> side_set(const CGApproxSkeleton& skeleton);

struct AugmentedSkeleton {
    std::vector<SkeletonTuple> tuples;  // V_j: 2-tuples, 4-tuples on E_side
    std::string to_json() const;
};

AugmentedSkeleton augmented_skeleton(const LatticePath& path,
                                     const CoarseParams& params,
                                     const BlockClassification& classification);

// Segment lists for skeleton_passage_time: one segment per 2-tuple, three
// per 4-tuple.
std::vector<std::pair<Site, Site>> skeleton_segments(const CGApproxSkeleton& s);
std::vector<std::pair<Site, Site>> skeleton_segments(const AugmentedSkeleton& s);

struct ClimbingSkeleton {
    struct Hit {
        std::int64_t index = 0;  // tau_j, first index with x_1 = j*u_n
        Site site;
    };
    struct Witness {
        std::int64_t alpha = 0;
        std::int64_t beta = 0;
    };
    std::int64_t phi = 0;
    std::int64_t u_n = 0;
    std::vector<Hit> taus;                         // j = 1..phi
    std::vector<bool> is_short;                    // per segment
    std::vector<std::optional<bool>> clean;        // set for short segments
    std::vector<std::optional<Witness>> witnesses; // first slow pair, unclean short
    std::vector<std::int64_t> sigma;               // merged sequence of indices
    bool any_estimated = false;                    // some s_hat lookup fell back
    std::int64_t long_count = 0;

    std::string to_json() const;
};

// Hitting times of heights j*u_n in the first transverse coordinate,
// short/long segment classification at threshold 2n/phi(n), per-short-segment
// clean checks (every sub-increment fast), first slow witnesses, and the
// merged sigma sequence including the floor(2n/phi(n))-grid points inside
// long segments.
ClimbingSkeleton climbing_skeleton(const LatticePath& path, std::int64_t u_n,
                                   const ExcessSource& s_field, double c3);

struct StepCountReport {
    std::vector<std::int64_t> slot_counts;  // admissible choices per tuple slot
    double enumerated = 0.0;                // product over slots
    double bound = 0.0;
    bool ok = false;
    std::string detail;
};

// Enumerates the admissible values of one skeleton step given the prefix
// endpoint and checks them against the per-step counting bound:
// (3 phi(n))^{2d} off the exceptional set, (2n)^{4d} on it. Guarded to d <= 2
// and h_n <= 200.
StepCountReport skeleton_count_bound_check(const CoarseParams& params,
                                           const CGApproxSkeleton& prefix,
                                           std::int64_t j, bool in_exceptional,
                                           int dim);

// Enumerates the compatible boundary tuples (p_{j-1}, v_{j-1}, w_j, p_j) of
// one regular block given its CG endpoints and checks the per-block factor
// against (4 h_n + 1)^{4d} and n^{4d}.
StepCountReport compatible_tuple_count_check(const CoarseParams& params,
                                             const Site& v_prime,
                                             const Site& w_prime, int dim);

}  // namespace fpp
