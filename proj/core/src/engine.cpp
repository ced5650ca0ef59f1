#include "fpp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "fpp/errors.hpp"
#include "fpp/format.hpp"

namespace fpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::int64_t l1_distance(const Transverse& a, const Transverse& b) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += std::abs(static_cast<std::int64_t>(a[i]) - b[i]);
    return s;
}

// Inclusive per-axis box with row-major strides.
struct Box {
    Transverse lo, hi;
    std::vector<std::int64_t> stride;
    std::int64_t cells = 0;

    void finalize() {
        const std::size_t d = lo.size();
        stride.assign(d, 1);
        std::int64_t s = 1;
        for (std::size_t k = d; k-- > 0;) {
            stride[k] = s;
            s *= static_cast<std::int64_t>(hi[k]) - lo[k] + 1;
        }
        cells = s;
    }

    bool contains(std::span<const std::int32_t> x) const {
        for (std::size_t k = 0; k < lo.size(); ++k)
            if (x[k] < lo[k] || x[k] > hi[k]) return false;
        return true;
    }

    std::int64_t index(std::span<const std::int32_t> x) const {
        std::int64_t idx = 0;
        for (std::size_t k = 0; k < lo.size(); ++k)
            idx += (static_cast<std::int64_t>(x[k]) - lo[k]) * stride[k];
        return idx;
    }
};

// Predecessor scan order: axes ascending with step +1, then axes descending
// with step -1. This is ascending lexicographic order of the predecessor
// site, so keeping the first strict minimum realizes the lexicographic
// tie-break; it also fixes the reduction order for bit-stable values.
Move pred_move(int d, int c) {
    return c < d ? Move{c, +1} : Move{2 * d - 1 - c, -1};
}

struct SweepSpec {
    const WeightField* field;
    Site source;
    std::int64_t layers = 0;                 // m
    const Transverse* target = nullptr;      // per-axis diamond clip when set
    bool record_argmin = false;
    bool record_fronts = false;              // keep the value array of every layer
};

struct SweepResult {
    std::vector<Box> boxes;                        // per layer 0..m
    std::vector<std::vector<double>> fronts;       // filled per record_fronts
    std::vector<std::vector<std::uint8_t>> argmin; // filled per record_argmin (layers 1..m at index i)
    Box final_box;
    std::vector<double> final_values;
};

Box layer_box(const SweepSpec& spec, std::int64_t i) {
    const int d = spec.source.dim();
    Box box;
    box.lo.resize(static_cast<std::size_t>(d));
    box.hi.resize(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        std::int64_t lo = spec.source.transverse[static_cast<std::size_t>(k)] - i;
        std::int64_t hi = spec.source.transverse[static_cast<std::size_t>(k)] + i;
        if (spec.target != nullptr) {
            const std::int64_t back = spec.layers - i;
            lo = std::max(lo, static_cast<std::int64_t>((*spec.target)[static_cast<std::size_t>(k)]) - back);
            hi = std::min(hi, static_cast<std::int64_t>((*spec.target)[static_cast<std::size_t>(k)]) + back);
        }
        box.lo[static_cast<std::size_t>(k)] = static_cast<std::int32_t>(lo);
        box.hi[static_cast<std::size_t>(k)] = static_cast<std::int32_t>(hi);
    }
    box.finalize();
    return box;
}

// d = 1 fast path: batch the bond hashes and quantiles per layer so the law
// evaluation pipelines instead of serializing behind each cell. Produces
// bit-identical values and argmin choices to the generic sweep (same adds,
// same predecessor order).
SweepResult run_sweep_1d(const SweepSpec& spec) {
    const std::int64_t m = spec.layers;
    SweepResult result;
    result.boxes.reserve(static_cast<std::size_t>(m) + 1);

    const std::int32_t x0 = spec.source.transverse[0];
    Box prev_box = layer_box(spec, 0);
    std::vector<double> prev(static_cast<std::size_t>(prev_box.cells), kInf);
    prev[static_cast<std::size_t>(prev_box.index(spec.source.transverse))] = 0.0;
    result.boxes.push_back(prev_box);
    if (spec.record_argmin) result.argmin.emplace_back();
    if (spec.record_fronts) result.fronts.push_back(prev);

    std::vector<double> u_lo, u_hi, w_lo, w_hi;
    const PassageLaw& law = spec.field->law();

    for (std::int64_t i = 0; i < m; ++i) {
        const std::int64_t layer = spec.source.layer + i;
        const Box next_box = layer_box(spec, i + 1);
        const std::int32_t lo1 = next_box.lo[0];
        const std::int32_t lo0 = prev_box.lo[0];
        const std::int32_t hi0 = prev_box.hi[0];
        std::vector<double> next(static_cast<std::size_t>(next_box.cells), kInf);
        std::vector<std::uint8_t> choices;
        if (spec.record_argmin)
            choices.assign(static_cast<std::size_t>(next_box.cells), 255);

        std::int64_t vlo = std::max<std::int64_t>(lo1, x0 - (i + 1));
        std::int64_t vhi = std::min<std::int64_t>(next_box.hi[0], x0 + (i + 1));
        if (((layer + 1 + vlo) & 1) != 0) ++vlo;
        const std::size_t count =
            vlo > vhi ? 0 : static_cast<std::size_t>((vhi - vlo) / 2 + 1);
        u_lo.resize(count);
        u_hi.resize(count);
        w_lo.resize(count);
        w_hi.resize(count);

        std::int32_t px[1];
        for (std::size_t idx = 0; idx < count; ++idx) {
            const std::int32_t v = static_cast<std::int32_t>(vlo + 2 * static_cast<std::int64_t>(idx));
            px[0] = v - 1;
            u_lo[idx] = spec.field->uniform_at(layer, std::span<const std::int32_t>(px, 1), Move{0, +1});
            px[0] = v + 1;
            u_hi[idx] = spec.field->uniform_at(layer, std::span<const std::int32_t>(px, 1), Move{0, -1});
        }
        law.quantile_many(u_lo, w_lo);
        law.quantile_many(u_hi, w_hi);

        for (std::size_t idx = 0; idx < count; ++idx) {
            const std::int64_t v = vlo + 2 * static_cast<std::int64_t>(idx);
            double best = kInf;
            std::uint8_t choice = 255;
            const std::int64_t pv0 = v - 1;
            if (pv0 >= lo0 && pv0 <= hi0) {
                const double base = prev[static_cast<std::size_t>(pv0 - lo0)];
                if (base != kInf) {
                    best = base + w_lo[idx];
                    choice = 0;
                }
            }
            const std::int64_t pv1 = v + 1;
            if (pv1 >= lo0 && pv1 <= hi0) {
                const double base = prev[static_cast<std::size_t>(pv1 - lo0)];
                if (base != kInf) {
                    const double cand = base + w_hi[idx];
                    if (cand < best) {
                        best = cand;
                        choice = 1;
                    }
                }
            }
            next[static_cast<std::size_t>(v - lo1)] = best;
            if (spec.record_argmin) choices[static_cast<std::size_t>(v - lo1)] = choice;
        }

        prev = std::move(next);
        prev_box = next_box;
        result.boxes.push_back(prev_box);
        if (spec.record_argmin) result.argmin.push_back(std::move(choices));
        if (spec.record_fronts) result.fronts.push_back(prev);
    }
    result.final_box = prev_box;
    result.final_values = std::move(prev);
    return result;
}

SweepResult run_sweep(const SweepSpec& spec) {
    const int d = spec.source.dim();
    if (d == 1) return run_sweep_1d(spec);
    const std::int64_t m = spec.layers;
    SweepResult result;
    result.boxes.reserve(static_cast<std::size_t>(m) + 1);

    Box prev_box = layer_box(spec, 0);
    std::vector<double> prev(static_cast<std::size_t>(prev_box.cells), kInf);
    prev[static_cast<std::size_t>(prev_box.index(spec.source.transverse))] = 0.0;
    result.boxes.push_back(prev_box);
    if (spec.record_argmin) result.argmin.emplace_back();  // layer 0 placeholder
    if (spec.record_fronts) result.fronts.push_back(prev);

    Transverse y(static_cast<std::size_t>(d), 0);
    Transverse pred(static_cast<std::size_t>(d), 0);

    for (std::int64_t i = 0; i < m; ++i) {
        const std::int64_t layer = spec.source.layer + i;
        const Box next_box = layer_box(spec, i + 1);
        std::vector<double> next(static_cast<std::size_t>(next_box.cells), kInf);
        std::vector<std::uint8_t> choices;
        if (spec.record_argmin) choices.assign(static_cast<std::size_t>(next_box.cells), 255);

        const int last = d - 1;
        const std::int32_t lo_last1 = next_box.lo[static_cast<std::size_t>(last)];
        const std::int32_t hi_last1 = next_box.hi[static_cast<std::size_t>(last)];
        const std::int32_t lo_last0 = prev_box.lo[static_cast<std::size_t>(last)];
        const std::int32_t hi_last0 = prev_box.hi[static_cast<std::size_t>(last)];
        const std::int64_t stride_last0 = prev_box.stride[static_cast<std::size_t>(last)];

        // Odometer over the outer axes of the next box.
        for (int k = 0; k < last; ++k) y[static_cast<std::size_t>(k)] = next_box.lo[static_cast<std::size_t>(k)];
        bool rows_left = true;
        while (rows_left) {
            // Cone bound over outer coordinates.
            std::int64_t outer_l1 = 0;
            std::int64_t outer_sum = 0;
            for (int k = 0; k < last; ++k) {
                outer_l1 += std::abs(static_cast<std::int64_t>(y[static_cast<std::size_t>(k)]) -
                                       spec.source.transverse[static_cast<std::size_t>(k)]);
                outer_sum += y[static_cast<std::size_t>(k)];
            }
            const std::int64_t radius = (i + 1) - outer_l1;
            if (radius >= 0) {
                const std::int32_t center = spec.source.transverse[static_cast<std::size_t>(last)];
                std::int64_t vlo = std::max<std::int64_t>(lo_last1, center - radius);
                std::int64_t vhi = std::min<std::int64_t>(hi_last1, center + radius);
                // Parity of the inner coordinate is fixed by layer + outer sum.
                if (((layer + 1 + outer_sum + vlo) & 1) != 0) ++vlo;

                // Row base index into the previous layer for the outer coords.
                bool outer_in_prev = true;
                std::int64_t prev_row_base = 0;
                for (int k = 0; k < last; ++k) {
                    const std::int32_t c = y[static_cast<std::size_t>(k)];
                    if (c < prev_box.lo[static_cast<std::size_t>(k)] || c > prev_box.hi[static_cast<std::size_t>(k)]) {
                        outer_in_prev = false;
                        break;
                    }
                    prev_row_base += (static_cast<std::int64_t>(c) - prev_box.lo[static_cast<std::size_t>(k)]) *
                                     prev_box.stride[static_cast<std::size_t>(k)];
                }

                std::int64_t next_row_base = 0;
                for (int k = 0; k < last; ++k)
                    next_row_base += (static_cast<std::int64_t>(y[static_cast<std::size_t>(k)]) -
                                      next_box.lo[static_cast<std::size_t>(k)]) *
                                     next_box.stride[static_cast<std::size_t>(k)];

                for (int k = 0; k < last; ++k) pred[static_cast<std::size_t>(k)] = y[static_cast<std::size_t>(k)];

                for (std::int64_t v = vlo; v <= vhi; v += 2) {
                    double best = kInf;
                    std::uint8_t best_choice = 255;
                    for (int c = 0; c < 2 * d; ++c) {
                        const Move mv = pred_move(d, c);
                        const std::size_t ax = static_cast<std::size_t>(mv.axis);
                        double cand;
                        if (mv.axis == last) {
                            const std::int64_t pv = v - mv.step;
                            if (!outer_in_prev || pv < lo_last0 || pv > hi_last0) continue;
                            const double base = prev[static_cast<std::size_t>(prev_row_base + (pv - lo_last0) * stride_last0)];
                            if (base == kInf) continue;
                            pred[static_cast<std::size_t>(last)] = static_cast<std::int32_t>(pv);
                            cand = base + spec.field->weight_at(layer, pred, mv);
                        } else {
                            const std::int32_t pc = y[ax] - static_cast<std::int32_t>(mv.step);
                            if (pc < prev_box.lo[ax] || pc > prev_box.hi[ax]) continue;
                            bool ok = v >= lo_last0 && v <= hi_last0;
                            if (!ok) continue;
                            // remaining outer coords must sit inside the previous box
                            bool others = true;
                            for (int k2 = 0; k2 < last; ++k2) {
                                if (k2 == mv.axis) continue;
                                const std::int32_t c2 = y[static_cast<std::size_t>(k2)];
                                if (c2 < prev_box.lo[static_cast<std::size_t>(k2)] || c2 > prev_box.hi[static_cast<std::size_t>(k2)]) {
                                    others = false;
                                    break;
                                }
                            }
                            if (!others) continue;
                            std::int64_t idx = (static_cast<std::int64_t>(pc) - prev_box.lo[ax]) * prev_box.stride[ax] +
                                               (static_cast<std::int64_t>(v) - lo_last0) * stride_last0;
                            for (int k2 = 0; k2 < last; ++k2) {
                                if (k2 == mv.axis) continue;
                                idx += (static_cast<std::int64_t>(y[static_cast<std::size_t>(k2)]) -
                                        prev_box.lo[static_cast<std::size_t>(k2)]) *
                                       prev_box.stride[static_cast<std::size_t>(k2)];
                            }
                            const double base = prev[static_cast<std::size_t>(idx)];
                            if (base == kInf) continue;
                            pred[ax] = pc;
                            pred[static_cast<std::size_t>(last)] = static_cast<std::int32_t>(v);
                            cand = base + spec.field->weight_at(layer, pred, mv);
                            pred[ax] = y[ax];
                        }
                        if (cand < best) {
                            best = cand;
                            best_choice = static_cast<std::uint8_t>(c);
                        }
                    }
                    const std::int64_t out_idx = next_row_base + (v - next_box.lo[static_cast<std::size_t>(last)]);
                    next[static_cast<std::size_t>(out_idx)] = best;
                    if (spec.record_argmin) choices[static_cast<std::size_t>(out_idx)] = best_choice;
                }
            }

            // Advance the odometer.
            rows_left = false;
            for (int k = last - 1; k >= 0; --k) {
                if (y[static_cast<std::size_t>(k)] < next_box.hi[static_cast<std::size_t>(k)]) {
                    ++y[static_cast<std::size_t>(k)];
                    for (int k2 = k + 1; k2 < last; ++k2)
                        y[static_cast<std::size_t>(k2)] = next_box.lo[static_cast<std::size_t>(k2)];
                    rows_left = true;
                    break;
                }
            }
        }

        prev = std::move(next);
        prev_box = next_box;
        result.boxes.push_back(prev_box);
        if (spec.record_argmin) result.argmin.push_back(std::move(choices));
        if (spec.record_fronts) result.fronts.push_back(prev);
    }

    result.final_box = prev_box;
    result.final_values = std::move(prev);
    return result;
}

void require_sites(const WeightField& field, const Site& source) {
    if (source.dim() != field.dim())
        throw ConfigError("engine: source dimension does not match the field");
    if (!is_lattice_site(source))
        throw ConfigError("engine: source violates even-lattice parity");
}

void require_reachable(const Site& source, const Site& target) {
    if (source.dim() != target.dim())
        throw ConfigError("engine: source/target dimension mismatch");
    if (!is_lattice_site(source) || !is_lattice_site(target))
        throw ConfigError("engine: site violates even-lattice parity");
    if (!is_reachable(source, target)) {
        std::ostringstream os;
        os << "target (layer " << target.layer << ") unreachable from source (layer "
           << source.layer << ")";
        throw UnreachableError(os.str());
    }
}

}  // namespace

bool LayerFront::contains(std::span<const std::int32_t> x) const {
    if (x.size() != lo.size()) return false;
    for (std::size_t k = 0; k < lo.size(); ++k)
        if (x[k] < lo[k] || x[k] > hi[k]) return false;
    return true;
}

double LayerFront::at(std::span<const std::int32_t> x) const {
    if (!contains(x)) throw ConfigError("LayerFront::at: point outside the front box");
    std::int64_t idx = 0;
    std::int64_t s = 1;
    for (std::size_t k = lo.size(); k-- > 0;) {
        idx += (static_cast<std::int64_t>(x[k]) - lo[k]) * s;
        s *= static_cast<std::int64_t>(hi[k]) - lo[k] + 1;
    }
    return values[static_cast<std::size_t>(idx)];
}

std::string LayerFront::to_csv(bool header) const {
    std::ostringstream os;
    const std::size_t d = lo.size();
    if (header) {
        os << "layer";
        for (std::size_t k = 1; k <= d; ++k) os << ",x" << k;
        os << ",value\n";
    }
    Transverse x(lo);
    bool more = !values.empty();
    std::size_t flat = 0;
    while (more) {
        if (std::isfinite(values[flat])) {
            os << layer;
            for (std::size_t k = 0; k < d; ++k) os << ',' << x[k];
            os << ',' << fmt_g17(values[flat]) << '\n';
        }
        ++flat;
        more = false;
        for (std::size_t k = d; k-- > 0;) {
            if (x[k] < hi[k]) {
                ++x[k];
                for (std::size_t k2 = k + 1; k2 < d; ++k2) x[k2] = lo[k2];
                more = true;
                break;
            }
        }
    }
    return os.str();
}

bool is_reachable(const Site& source, const Site& target) {
    if (source.dim() != target.dim()) return false;
    if (!is_lattice_site(source) || !is_lattice_site(target)) return false;
    const std::int64_t gap = target.layer - source.layer;
    if (gap < 0) return false;
    return l1_distance(source.transverse, target.transverse) <= gap;
}

LayerFront layer_passage_times(const WeightField& field, const Site& source,
                               std::int64_t m) {
    require_sites(field, source);
    if (m < 0) throw ConfigError("layer_passage_times: m must be >= 0");
    SweepSpec spec{&field, source, m, nullptr, false, false};
    SweepResult sweep = run_sweep(spec);
    LayerFront front;
    front.layer = source.layer + m;
    front.lo = sweep.final_box.lo;
    front.hi = sweep.final_box.hi;
    front.values = std::move(sweep.final_values);
    return front;
}

std::vector<LayerFront> layer_front_sequence(const WeightField& field,
                                             const Site& source, std::int64_t m) {
    require_sites(field, source);
    if (m < 0) throw ConfigError("layer_front_sequence: m must be >= 0");
    SweepSpec spec{&field, source, m, nullptr, false, true};
    SweepResult sweep = run_sweep(spec);
    std::vector<LayerFront> fronts;
    fronts.reserve(static_cast<std::size_t>(m) + 1);
    for (std::int64_t i = 0; i <= m; ++i) {
        LayerFront front;
        front.layer = source.layer + i;
        front.lo = sweep.boxes[static_cast<std::size_t>(i)].lo;
        front.hi = sweep.boxes[static_cast<std::size_t>(i)].hi;
        front.values = std::move(sweep.fronts[static_cast<std::size_t>(i)]);
        fronts.push_back(std::move(front));
    }
    return fronts;
}

double min_passage_time(const WeightField& field, const Site& source,
                        const Site& target) {
    require_sites(field, source);
    require_reachable(source, target);
    const std::int64_t m = target.layer - source.layer;
    if (m == 0) return 0.0;
    SweepSpec spec{&field, source, m, &target.transverse, false, false};
    SweepResult sweep = run_sweep(spec);
    return sweep.final_values[static_cast<std::size_t>(sweep.final_box.index(target.transverse))];
}

double path_time(const WeightField& field, const LatticePath& path) {
    if (path.dim() != field.dim())
        throw ConfigError("path_time: path dimension does not match the field");
    const PathCheck check = validate_path(path);
    if (!check.ok)
        throw ConfigError("path_time: invalid path at move " +
                          std::to_string(check.violation_index) + ": " + check.reason);
    double sum = 0.0;
    Site site = path.start;
    for (const Move& mv : path.moves) {
        sum += field.weight_at(site.layer, site.transverse, mv);
        site.transverse[static_cast<std::size_t>(mv.axis)] =
            static_cast<std::int32_t>(site.transverse[static_cast<std::size_t>(mv.axis)] + mv.step);
        ++site.layer;
    }
    return sum;
}

PassageResult geodesic(const WeightField& field, const Site& source,
                       const Site& target) {
    require_sites(field, source);
    require_reachable(source, target);
    const std::int64_t m = target.layer - source.layer;
    PassageResult result;
    if (m == 0) {
        result.value = 0.0;
        result.geodesic = LatticePath{source, {}};
        return result;
    }
    SweepSpec spec{&field, source, m, &target.transverse, true, false};
    SweepResult sweep = run_sweep(spec);
    result.value = sweep.final_values[static_cast<std::size_t>(sweep.final_box.index(target.transverse))];

    const int d = source.dim();
    std::vector<Move> moves(static_cast<std::size_t>(m));
    Transverse y = target.transverse;
    for (std::int64_t i = m; i >= 1; --i) {
        const Box& box = sweep.boxes[static_cast<std::size_t>(i)];
        const std::uint8_t c = sweep.argmin[static_cast<std::size_t>(i)][static_cast<std::size_t>(box.index(y))];
        const Move mv = pred_move(d, c);
        moves[static_cast<std::size_t>(i - 1)] = mv;
        y[static_cast<std::size_t>(mv.axis)] =
            static_cast<std::int32_t>(y[static_cast<std::size_t>(mv.axis)] - mv.step);
    }
    result.geodesic = LatticePath{source, std::move(moves)};
    return result;
}

namespace {

struct BruteState {
    const WeightFn* weights;
    int dim;
    const Site* target = nullptr;                 // point query
    std::map<Transverse, double>* front = nullptr;  // front query
    Transverse coords;
    double best = kInf;
};

void brute_recurse(BruteState& st, std::int64_t layer, std::int64_t remaining, double sum) {
    if (remaining == 0) {
        if (st.target != nullptr) {
            if (st.coords == st.target->transverse && sum < st.best) st.best = sum;
        } else {
            auto [it, inserted] = st.front->try_emplace(st.coords, sum);
            if (!inserted && sum < it->second) it->second = sum;
        }
        return;
    }
    if (st.target != nullptr &&
        l1_distance(st.coords, st.target->transverse) > remaining)
        return;
    for (int a = 0; a < st.dim; ++a) {
        for (int s : {+1, -1}) {
            const double w = (*st.weights)(layer, st.coords, Move{a, s});
            st.coords[static_cast<std::size_t>(a)] = static_cast<std::int32_t>(st.coords[static_cast<std::size_t>(a)] + s);
            brute_recurse(st, layer + 1, remaining - 1, sum + w);
            st.coords[static_cast<std::size_t>(a)] = static_cast<std::int32_t>(st.coords[static_cast<std::size_t>(a)] - s);
        }
    }
}

}  // namespace

double brute_force_passage(const WeightFn& weights, int dim, const Site& source,
                           const Site& target) {
    require_reachable(source, target);
    const std::int64_t m = target.layer - source.layer;
    if (m > 12) throw GuardError("brute force guard: layer span exceeds 12");
    if (m == 0) return 0.0;
    BruteState st;
    st.weights = &weights;
    st.dim = dim;
    st.target = &target;
    st.coords = source.transverse;
    brute_recurse(st, source.layer, m, 0.0);
    return st.best;
}

std::map<Transverse, double> brute_force_front(const WeightFn& weights, int dim,
                                               const Site& source, std::int64_t m) {
    if (m < 0) throw ConfigError("brute_force_front: m must be >= 0");
    if (m > 12) throw GuardError("brute force guard: layer span exceeds 12");
    std::map<Transverse, double> front;
    if (m == 0) {
        front.emplace(source.transverse, 0.0);
        return front;
    }
    BruteState st;
    st.weights = &weights;
    st.dim = dim;
    st.front = &front;
    st.coords = source.transverse;
    brute_recurse(st, source.layer, m, 0.0);
    return front;
}

double brute_force_passage(const WeightField& field, const Site& source,
                           const Site& target) {
    require_sites(field, source);
    WeightFn fn = [&field](std::int64_t layer, std::span<const std::int32_t> x, Move mv) {
        return field.weight_at(layer, x, mv);
    };
    return brute_force_passage(fn, field.dim(), source, target);
}

std::map<Transverse, double> brute_force_front(const WeightField& field,
                                               const Site& source, std::int64_t m) {
    require_sites(field, source);
    WeightFn fn = [&field](std::int64_t layer, std::span<const std::int32_t> x, Move mv) {
        return field.weight_at(layer, x, mv);
    };
    return brute_force_front(fn, field.dim(), source, m);
}

double skeleton_passage_time(const WeightField& field,
                             std::span<const std::pair<Site, Site>> segments) {
    double total = 0.0;
    std::size_t j = 0;
    for (const auto& [from, to] : segments) {
        if (!is_reachable(from, to)) {
            std::ostringstream os;
            os << "skeleton segment " << j << " unreachable";
            throw UnreachableError(os.str());
        }
        total += min_passage_time(field, from, to);
        ++j;
    }
    return total;
}

}  // namespace fpp
