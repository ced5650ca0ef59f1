#include "fpp/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "fpp/errors.hpp"

namespace fpp {

namespace {

std::int64_t linf_diff(const Transverse& a, const Transverse& b) {
    std::int64_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(static_cast<std::int64_t>(a[i]) - b[i]));
    return d;
}

Transverse diff(const Transverse& a, const Transverse& b) {
    Transverse out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = static_cast<std::int32_t>(a[i] - b[i]);
    return out;
}

// Count of lattice-parity sites z in the box |z - center|_inf <= radius at
// the given layer, per explicit enumeration. Center parity matters only via
// the layer, so the count is translation invariant for even shifts.
std::int64_t count_box_sites(int dim, std::int64_t layer, std::int64_t radius,
                             std::int64_t l1_cap = -1) {
    std::vector<std::int64_t> x(static_cast<std::size_t>(dim), -radius);
    std::int64_t count = 0;
    while (true) {
        std::int64_t sum = 0, l1 = 0;
        for (std::int64_t c : x) {
            sum += c;
            l1 += std::abs(c);
        }
        if (((layer + sum) & 1) == 0 && (l1_cap < 0 || l1 <= l1_cap)) ++count;
        int k = dim - 1;
        for (; k >= 0; --k) {
            if (x[static_cast<std::size_t>(k)] < radius) {
                ++x[static_cast<std::size_t>(k)];
                for (int k2 = k + 1; k2 < dim; ++k2) x[static_cast<std::size_t>(k2)] = -radius;
                break;
            }
        }
        if (k < 0) break;
    }
    return count;
}

}  // namespace

CoarseParams CoarseParams::make(std::int64_t n, std::int64_t k, std::int64_t h_n,
                                double c3, int dim,
                                std::optional<std::int64_t> n1_override) {
    if (n < 16 || (n & 1) != 0)
        throw ConfigError("coarse params: block length n must be even and >= 16");
    if (k < 1) throw ConfigError("coarse params: block count must be >= 1");
    if (h_n < 1) throw ConfigError("coarse params: h_n must be >= 1");
    if (dim < 1) throw ConfigError("coarse params: dimension must be >= 1");

    CoarseParams params;
    params.n = n;
    params.k = k;
    params.h_n = h_n;
    params.c3 = c3;
    params.phi = scale_functions(static_cast<double>(n), c3).phi;
    params.u_n = 2 * (h_n / (2 * params.phi));
    if (params.u_n < 2)
        throw ConfigError("coarse params: h_n < 2 phi(n) degenerates the grid (u_n = 0)");
    std::int64_t n1 = n1_override.value_or(2 * dim * (n / params.phi));
    n1 -= n1 & 1;
    params.n1 = n1;
    if (params.n1 <= 0 || params.n1 >= n / 2)
        throw ConfigError("coarse params: n1 must be even with 0 < n1 < n/2");
    return params;
}

SimpleSkeleton simple_skeleton(const LatticePath& path, std::int64_t n) {
    if (n < 1) throw ConfigError("simple_skeleton: n must be >= 1");
    if (path.start.layer != 0)
        throw ConfigError("simple_skeleton: path must start at layer 0");
    if (path.length() % static_cast<std::size_t>(n) != 0)
        throw ConfigError("simple_skeleton: path length not divisible by n");
    const std::int64_t k = static_cast<std::int64_t>(path.length()) / n;
    SimpleSkeleton skel;
    skel.points.reserve(static_cast<std::size_t>(k) + 1);
    const std::vector<Site> sites = path.sites();
    for (std::int64_t j = 0; j <= k; ++j)
        skel.points.push_back(sites[static_cast<std::size_t>(j * n)]);
    return skel;
}

Site pi_project(const Site& site, std::int64_t target_layer, std::int64_t u_n) {
    if (u_n < 2 || (u_n & 1) != 0)
        throw ConfigError("pi_project: u_n must be even and >= 2");
    Site out;
    out.layer = target_layer;
    out.transverse.resize(site.transverse.size());
    for (std::size_t i = 0; i < site.transverse.size(); ++i) {
        const std::int64_t c = site.transverse[i];
        std::int64_t r = c % u_n;
        if (r < 0) r += u_n;
        const std::int64_t lower = c - r;
        // l1 distance is minimized coordinatewise; the half-grid tie goes to
        // the smaller multiple, which is the lexicographically smallest z.
        const std::int64_t z = (2 * r <= u_n) ? lower : lower + u_n;
        out.transverse[i] = static_cast<std::int32_t>(z);
    }
    return out;
}

std::set<std::int64_t> BlockClassification::all() const {
    std::set<std::int64_t> u = excessive;
    u.insert(sidestep.begin(), sidestep.end());
    return u;
}

BlockClassification classify_blocks(const LatticePath& path,
                                    const CoarseParams& params,
                                    const ExcessSource& s_field) {
    if (path.start.layer != 0)
        throw ConfigError("classify_blocks: path must start at layer 0");
    if (static_cast<std::int64_t>(path.length()) != params.k * params.n)
        throw ConfigError("classify_blocks: path length must equal k*n");

    const std::vector<Site> sites = path.sites();
    const double n = static_cast<double>(params.n);
    const double envelope = std::sqrt(n) * std::log(n);

    BlockClassification cls;
    for (std::int64_t j = 1; j <= params.k; ++j) {
        const Transverse& x_prev = sites[static_cast<std::size_t>((j - 1) * params.n)].transverse;
        const Transverse& x_cur = sites[static_cast<std::size_t>(j * params.n)].transverse;
        const Transverse inc = diff(x_cur, x_prev);

        bool is_excessive;
        if (const auto v = s_field.excess(params.n, inc)) {
            is_excessive = classify_increment(v->s_hat, n, params.c3).excessive;
        } else {
            cls.used_fallback = true;
            std::int64_t linf = 0;
            for (std::int32_t c : inc) linf = std::max<std::int64_t>(linf, std::abs(c));
            is_excessive = static_cast<double>(linf) > envelope;
        }
        if (is_excessive) {
            cls.excessive.insert(j);
            continue;
        }

        const Transverse& e_point = sites[static_cast<std::size_t>((j - 1) * params.n + params.n1)].transverse;
        const Transverse& f_point = sites[static_cast<std::size_t>(j * params.n - params.n1)].transverse;
        const bool sidestep = linf_diff(e_point, x_prev) > params.h_n ||
                              linf_diff(x_cur, f_point) > params.h_n;
        if (sidestep) cls.sidestep.insert(j);
    }
    cls.b_nk = static_cast<std::int64_t>(
        std::floor(static_cast<double>(params.k) * std::log(std::log(n)) / std::log(n)));
    return cls;
}

CGApproxSkeleton cg_approx_skeleton(const LatticePath& path,
                                    const CoarseParams& params,
                                    const BlockClassification& classification) {
    const std::vector<Site> sites = path.sites();
    CGApproxSkeleton skel;
    skel.tuples.reserve(static_cast<std::size_t>(params.k));
    for (std::int64_t j = 1; j <= params.k; ++j) {
        const Site& d_prev = sites[static_cast<std::size_t>((j - 1) * params.n)];
        const Site& d_cur = sites[static_cast<std::size_t>(j * params.n)];
        SkeletonTuple tuple;
        if (classification.excessive.count(j)) {
            tuple.kind = SkeletonTuple::Kind::excessive;
            tuple.sites = {d_prev, d_cur};
        } else if (classification.sidestep.count(j)) {
            const Site& e_prev = sites[static_cast<std::size_t>((j - 1) * params.n + params.n1)];
            const Site& f_cur = sites[static_cast<std::size_t>(j * params.n - params.n1)];
            tuple.kind = SkeletonTuple::Kind::sidestep;
            tuple.sites = {d_prev, e_prev, f_cur, d_cur};
        } else {
            const Site& e_prev = sites[static_cast<std::size_t>((j - 1) * params.n + params.n1)];
            const Site& f_cur = sites[static_cast<std::size_t>(j * params.n - params.n1)];
            tuple.kind = SkeletonTuple::Kind::regular;
            tuple.sites = {pi_project(e_prev, (j - 1) * params.n, params.u_n),
                           pi_project(f_cur, j * params.n, params.u_n)};
        }
        skel.tuples.push_back(std::move(tuple));
    }
    return skel;
}

std::set<std::int64_t> side_set(const CGApproxSkeleton& skeleton) {
    std::set<std::int64_t> side;
    for (std::size_t i = 0; i < skeleton.tuples.size(); ++i)
        if (skeleton.tuples[i].sites.size() == 4)
            side.insert(static_cast<std::int64_t>(i) + 1);
    return side;
}

AugmentedSkeleton augmented_skeleton(const LatticePath& path,
                                     const CoarseParams& params,
                                     const BlockClassification& classification) {
    const std::vector<Site> sites = path.sites();
    AugmentedSkeleton skel;
    skel.tuples.reserve(static_cast<std::size_t>(params.k));
    for (std::int64_t j = 1; j <= params.k; ++j) {
        const Site& d_prev = sites[static_cast<std::size_t>((j - 1) * params.n)];
        const Site& d_cur = sites[static_cast<std::size_t>(j * params.n)];
        SkeletonTuple tuple;
        if (classification.sidestep.count(j)) {
            const Site& e_prev = sites[static_cast<std::size_t>((j - 1) * params.n + params.n1)];
            const Site& f_cur = sites[static_cast<std::size_t>(j * params.n - params.n1)];
            tuple.kind = SkeletonTuple::Kind::sidestep;
            tuple.sites = {d_prev, e_prev, f_cur, d_cur};
        } else {
            tuple.kind = SkeletonTuple::Kind::regular;
            tuple.sites = {d_prev, d_cur};
        }
        skel.tuples.push_back(std::move(tuple));
    }
    return skel;
}

namespace {

std::vector<std::pair<Site, Site>> tuples_to_segments(const std::vector<SkeletonTuple>& tuples) {
    std::vector<std::pair<Site, Site>> segments;
    for (const SkeletonTuple& t : tuples) {
        for (std::size_t i = 1; i < t.sites.size(); ++i)
            segments.emplace_back(t.sites[i - 1], t.sites[i]);
    }
    return segments;
}

}  // namespace

std::vector<std::pair<Site, Site>> skeleton_segments(const CGApproxSkeleton& s) {
    return tuples_to_segments(s.tuples);
}

std::vector<std::pair<Site, Site>> skeleton_segments(const AugmentedSkeleton& s) {
    return tuples_to_segments(s.tuples);
}

ClimbingSkeleton climbing_skeleton(const LatticePath& path, std::int64_t u_n,
                                   const ExcessSource& s_field, double c3) {
    if (u_n < 2 || (u_n & 1) != 0)
        throw ConfigError("climbing_skeleton: u_n must be even and >= 2");
    const std::int64_t n = static_cast<std::int64_t>(path.length());
    const ScaleValues sv = scale_functions(static_cast<double>(n), c3);
    const double slow_threshold = std::sqrt(static_cast<double>(n)) / sv.psi;

    ClimbingSkeleton skel;
    skel.phi = sv.phi;
    skel.u_n = u_n;

    const std::vector<Site> sites = path.sites();
    std::int64_t next_height = 1;
    for (std::int64_t m = 0; m <= n && next_height <= sv.phi; ++m) {
        if (sites[static_cast<std::size_t>(m)].transverse[0] == next_height * u_n) {
            skel.taus.push_back({m, sites[static_cast<std::size_t>(m)]});
            ++next_height;
        }
    }
    if (next_height <= sv.phi)
        throw DomainError("climbing_skeleton: path never reaches height phi(n)*u_n");

    const double short_cap = 2.0 * static_cast<double>(n) / static_cast<double>(sv.phi);
    auto is_slow = [&](std::int64_t s, std::int64_t t) {
        const Transverse inc = diff(sites[static_cast<std::size_t>(t)].transverse,
                                    sites[static_cast<std::size_t>(s)].transverse);
        const auto v = s_field.excess(t - s, inc);
        if (!v) {
            skel.any_estimated = true;
            return false;
        }
        if (v->estimated) skel.any_estimated = true;
        return v->s_hat >= slow_threshold;
    };

    std::int64_t prev_tau = 0;
    for (std::int64_t j = 0; j < sv.phi; ++j) {
        const std::int64_t tau = skel.taus[static_cast<std::size_t>(j)].index;
        const bool short_seg = static_cast<double>(tau - prev_tau) <= short_cap;
        skel.is_short.push_back(short_seg);
        if (!short_seg) ++skel.long_count;

        std::optional<bool> clean;
        std::optional<ClimbingSkeleton::Witness> witness;
        if (short_seg) {
            bool found_slow = false;
            for (std::int64_t s = prev_tau; s <= tau && !found_slow; ++s) {
                for (std::int64_t t = s + 1; t <= tau; ++t) {
                    if (is_slow(s, t)) {
                        found_slow = true;
                        witness = ClimbingSkeleton::Witness{s, t};
                        break;
                    }
                }
            }
            clean = !found_slow;
        }
        skel.clean.push_back(clean);
        skel.witnesses.push_back(witness);
        prev_tau = tau;
    }

    // Merged sigma sequence: hitting times, slow witnesses, and the
    // floor(2n/phi)-grid points strictly inside long segments.
    std::set<std::int64_t> sigma;
    for (const auto& hit : skel.taus) sigma.insert(hit.index);
    for (const auto& w : skel.witnesses) {
        if (w) {
            sigma.insert(w->alpha);
            sigma.insert(w->beta);
        }
    }
    const std::int64_t grid = static_cast<std::int64_t>(std::floor(short_cap));
    prev_tau = 0;
    for (std::int64_t j = 0; j < sv.phi; ++j) {
        const std::int64_t tau = skel.taus[static_cast<std::size_t>(j)].index;
        if (!skel.is_short[static_cast<std::size_t>(j)] && grid >= 1) {
            for (std::int64_t g = ((prev_tau / grid) + 1) * grid; g < tau; g += grid)
                if (g > prev_tau) sigma.insert(g);
        }
        prev_tau = tau;
    }
    sigma.erase(0);
    skel.sigma.assign(sigma.begin(), sigma.end());
    return skel;
}

StepCountReport skeleton_count_bound_check(const CoarseParams& params,
                                           const CGApproxSkeleton& prefix,
                                           std::int64_t j, bool in_exceptional,
                                           int dim) {
    if (dim > 2) throw GuardError("count bound check: enumeration guarded to d <= 2");
    if (params.h_n > 200) throw GuardError("count bound check: enumeration guarded to h_n <= 200");

    Transverse ref(static_cast<std::size_t>(dim), 0);
    if (!prefix.tuples.empty()) {
        const Site& last = prefix.tuples.back().sites.back();
        if (last.dim() == dim) ref = last.transverse;
    }

    StepCountReport report;
    std::ostringstream detail;
    if (!in_exceptional) {
        // Regular step: both tuple slots are CG points within sup distance
        // h_n of the reference.
        for (int slot = 0; slot < 2; ++slot) {
            std::int64_t count = 0;
            std::vector<std::int64_t> per_coord(static_cast<std::size_t>(dim), 0);
            for (int c = 0; c < dim; ++c) {
                std::int64_t cc = 0;
                const std::int64_t lo = ref[static_cast<std::size_t>(c)] - params.h_n;
                const std::int64_t hi = ref[static_cast<std::size_t>(c)] + params.h_n;
                for (std::int64_t z = (lo >= 0 ? (lo + params.u_n - 1) / params.u_n
                                               : lo / params.u_n) * params.u_n;
                     z <= hi; z += params.u_n) {
                    if (z >= lo) ++cc;
                }
                per_coord[static_cast<std::size_t>(c)] = cc;
            }
            count = 1;
            for (std::int64_t cc : per_coord) count *= cc;
            report.slot_counts.push_back(count);
        }
        report.enumerated = static_cast<double>(report.slot_counts[0]) *
                            static_cast<double>(report.slot_counts[1]);
        report.bound = std::pow(3.0 * static_cast<double>(params.phi), 2.0 * dim);
        detail << "regular step at j=" << j << ": CG pairs within h_n";
    } else {
        // Exceptional step: a 2-tuple (p_{j-1}, p_j) or a 4-tuple
        // (p_{j-1}, v_{j-1}, w_j, p_j); p_{j-1} is fixed by the prefix.
        const std::int64_t layer_v = (j - 1) * params.n + params.n1;
        const std::int64_t layer_w = j * params.n - params.n1;
        const std::int64_t layer_p = j * params.n;
        const std::int64_t c_v = count_box_sites(dim, layer_v, params.n1, params.n1);
        const std::int64_t c_w = count_box_sites(dim, layer_w, params.n - 2 * params.n1,
                                                 params.n - 2 * params.n1);
        const std::int64_t c_p = count_box_sites(dim, layer_p, params.n1, params.n1);
        const std::int64_t c_pair = count_box_sites(dim, layer_p, params.n, params.n);
        report.slot_counts = {c_v, c_w, c_p, c_pair};
        report.enumerated = static_cast<double>(c_pair) +
                            static_cast<double>(c_v) * static_cast<double>(c_w) *
                                static_cast<double>(c_p);
        report.bound = std::pow(2.0 * static_cast<double>(params.n), 4.0 * dim);
        detail << "exceptional step at j=" << j << ": 2-tuples plus 4-tuples";
    }
    report.ok = report.enumerated <= report.bound;
    report.detail = detail.str();
    return report;
}

StepCountReport compatible_tuple_count_check(const CoarseParams& params,
                                             const Site& v_prime,
                                             const Site& w_prime, int dim) {
    if (dim > 2) throw GuardError("tuple count check: enumeration guarded to d <= 2");
    if (params.h_n > 200) throw GuardError("tuple count check: enumeration guarded to h_n <= 200");

    // pi preimage of a CG point: offsets in (-u/2, u/2] per coordinate,
    // filtered by the parity of the site's layer.
    auto count_preimage = [&](const Site& center, std::int64_t layer) {
        const std::int64_t half = params.u_n / 2;
        std::vector<std::int64_t> offset(static_cast<std::size_t>(dim), -half + 1);
        std::int64_t count = 0;
        while (true) {
            std::int64_t sum = 0;
            for (std::size_t c = 0; c < offset.size(); ++c)
                sum += center.transverse[c] + offset[c];
            if (((layer + sum) & 1) == 0) ++count;
            int k = dim - 1;
            for (; k >= 0; --k) {
                if (offset[static_cast<std::size_t>(k)] < half) {
                    ++offset[static_cast<std::size_t>(k)];
                    for (int k2 = k + 1; k2 < dim; ++k2)
                        offset[static_cast<std::size_t>(k2)] = -half + 1;
                    break;
                }
            }
            if (k < 0) break;
        }
        return count;
    };

    // p_{j-1}: |p - v'|_inf <= 2 h_n at the CG layer of v'.
    const std::int64_t c_p_prev = count_box_sites(dim, v_prime.layer, 2 * params.h_n);
    const std::int64_t c_v = count_preimage(v_prime, v_prime.layer + params.n1);
    const std::int64_t c_w = count_preimage(w_prime, w_prime.layer - params.n1);
    // p_j: |p_j - w_j|_inf <= 2 h_n at layer jn.
    const std::int64_t c_p = count_box_sites(dim, w_prime.layer, 2 * params.h_n);

    StepCountReport report;
    report.slot_counts = {c_p_prev, c_v, c_w, c_p};
    report.enumerated = static_cast<double>(c_p_prev) * static_cast<double>(c_v) *
                        static_cast<double>(c_w) * static_cast<double>(c_p);
    report.bound = std::pow(4.0 * static_cast<double>(params.h_n) + 1.0, 4.0 * dim);
    const double n_bound = std::pow(static_cast<double>(params.n), 4.0 * dim);
    report.ok = report.enumerated <= report.bound && report.bound <= n_bound;
    std::ostringstream detail;
    detail << "boundary tuples per block; (4h+1)^{4d}=" << report.bound
           << " vs n^{4d}=" << n_bound;
    report.detail = detail.str();
    return report;
}

}  // namespace fpp
