#include "fpp/scaling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "fpp/engine.hpp"
#include "fpp/errors.hpp"
#include "fpp/format.hpp"
#include "fpp/numerics.hpp"
#include "fpp/weight_field.hpp"

namespace fpp {

namespace {

// Runs fn(begin, end) over fixed-size chunks of [0, total). Chunk boundaries
// do not depend on the worker count, so chunk-indexed reductions stay
// bit-stable under any parallelism.
void parallel_chunks(std::int64_t total, std::int64_t chunk, int workers,
                     const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& fn) {
    const std::int64_t nchunks = (total + chunk - 1) / chunk;
    if (workers <= 1 || nchunks <= 1) {
        for (std::int64_t c = 0; c < nchunks; ++c)
            fn(c * chunk, std::min(total, (c + 1) * chunk), c);
        return;
    }
    std::atomic<std::int64_t> counter{0};
    auto work = [&] {
        while (true) {
            const std::int64_t c = counter.fetch_add(1);
            if (c >= nchunks) break;
            fn(c * chunk, std::min(total, (c + 1) * chunk), c);
        }
    };
    std::vector<std::thread> pool;
    const int nthreads = static_cast<int>(std::min<std::int64_t>(workers, nchunks));
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
}

void validate_series_inputs(std::span<const std::int64_t> ns,
                            std::span<const std::int32_t> x_target,
                            std::int64_t samples) {
    if (ns.empty()) throw ConfigError("series: empty n list");
    if (samples < 2) throw ConfigError("series: need at least 2 samples");
    std::int64_t l1 = 0;
    std::int64_t sum = 0;
    for (std::int32_t c : x_target) {
        l1 += std::abs(static_cast<std::int64_t>(c));
        sum += c;
    }
    std::int64_t prev = 0;
    for (std::int64_t n : ns) {
        if (n <= prev) throw ConfigError("series: n values must be strictly increasing");
        if ((n & 1) != 0) throw ConfigError("series: n values must be even");
        if (((n + sum) & 1) != 0)
            throw ConfigError("series: target parity inconsistent with n");
        if (n < l1) throw ConfigError("series: target unreachable at n=" + std::to_string(n));
        prev = n;
    }
}

}  // namespace

std::string MeanSeries::to_csv(bool header) const {
    std::ostringstream os;
    if (header) os << "n,mean,stderr,samples\n";
    for (const MeanSeriesEntry& e : entries) {
        os << e.n << ',' << fmt_g17(e.mean) << ',' << fmt_g17(e.stderr_) << ','
           << e.samples << '\n';
    }
    return os.str();
}

MeanSeries mean_passage_series(const LawPtr& law, int dim,
                               std::span<const std::int64_t> ns,
                               std::span<const std::int32_t> x_target,
                               std::int64_t samples, std::uint64_t seed,
                               int workers) {
    if (!law) throw ConfigError("series: null law");
    if (dim < 1) throw ConfigError("series: dimension must be >= 1");
    Transverse target_x(x_target.begin(), x_target.end());
    if (target_x.empty()) target_x.assign(static_cast<std::size_t>(dim), 0);
    if (static_cast<int>(target_x.size()) != dim)
        throw ConfigError("series: x_target dimension mismatch");
    validate_series_inputs(ns, target_x, samples);

    const Site source = origin_site(dim);
    MeanSeries series;
    series.entries.reserve(ns.size());

    // samples x ns.size() value matrix, filled in parallel, reduced in order.
    std::vector<std::vector<double>> values(ns.size());
    for (auto& v : values) v.assign(static_cast<std::size_t>(samples), 0.0);

    parallel_chunks(samples, 64, workers, [&](std::int64_t begin, std::int64_t end, std::int64_t) {
        for (std::int64_t i = begin; i < end; ++i) {
            const WeightField field(seed + static_cast<std::uint64_t>(i), law, dim);
            for (std::size_t ni = 0; ni < ns.size(); ++ni) {
                const Site target{ns[ni], target_x};
                values[ni][static_cast<std::size_t>(i)] =
                    min_passage_time(field, source, target);
            }
        }
    });

    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
        const Moments m = compute_moments(values[ni]);
        series.entries.push_back(MeanSeriesEntry{ns[ni], m.mean, m.stderr_mean,
                                                 samples, m.variance});
    }
    return series;
}

TimeConstantEstimate estimate_time_constant(const MeanSeries& series) {
    if (series.entries.empty())
        throw ConfigError("estimate_time_constant: empty series");
    TimeConstantEstimate est;
    const MeanSeriesEntry& last = series.entries.back();
    est.mu_hat = last.mean / static_cast<double>(last.n);
    est.n_used = last.n;
    est.ci_halfwidth = 1.96 * last.stderr_ / static_cast<double>(last.n);
    est.ratios.reserve(series.entries.size());
    for (const MeanSeriesEntry& e : series.entries)
        est.ratios.emplace_back(e.n, e.mean / static_cast<double>(e.n));
    return est;
}

ScaleValues scale_functions(double m, double c3) {
    if (!(m >= 16.0))
        throw ConfigError("scale_functions: m must be >= 16");
    if (!(c3 > 0.0)) throw ConfigError("scale_functions: C3 must be positive");
    const double lg = std::log(m);
    ScaleValues sv;
    sv.c3 = c3;
    sv.psi = c3 * std::sqrt(lg) / std::log(lg);
    sv.theta = std::pow(lg, 1.5);
    sv.phi = static_cast<std::int64_t>(std::floor(lg * lg));
    return sv;
}

IncrementClass classify_increment(double s_hat, double n, double c3) {
    const ScaleValues sv = scale_functions(n, c3);
    IncrementClass cls;
    cls.slow = s_hat >= std::sqrt(n) / sv.psi;
    cls.excessive = s_hat > std::sqrt(n) * sv.theta;
    return cls;
}

double rate_value(const std::string& name, double n) {
    const double lg = std::log(n);
    if (name == "sqrt_log") return std::sqrt(n) * lg;
    if (name == "sqrt_loglog") return std::sqrt(n) * std::log(lg) / std::sqrt(lg);
    if (name == "kpz") return std::cbrt(n);
    if (name == "sqrt_n_over_log") return std::sqrt(n / lg);
    throw ConfigError("rate_value: unknown rate '" + name + "'");
}

RateFit rate_fit(const MeanSeries& series, const TimeConstantEstimate& mu) {
    static const char* kRates[] = {"sqrt_log", "sqrt_loglog", "kpz", "sqrt_n_over_log"};
    if (series.entries.size() < 5)
        throw ConfigError("rate_fit: need a series of at least 5 dyadic n values");
    for (std::size_t i = 1; i < series.entries.size(); ++i) {
        if (series.entries[i].n != 2 * series.entries[i - 1].n)
            throw ConfigError("rate_fit: series must be dyadic");
    }

    RateFit fit;
    std::vector<double> log_excess;
    std::vector<std::int64_t> used;
    for (const MeanSeriesEntry& e : series.entries) {
        const double excess = e.mean - static_cast<double>(e.n) * mu.mu_hat;
        if (excess > 2.0 * e.stderr_ && excess > 0.0) {
            log_excess.push_back(std::log(excess));
            used.push_back(e.n);
        } else {
            fit.excluded_ns.push_back(e.n);
        }
    }
    fit.used_ns = used;
    if (used.size() < 3) {
        fit.fitted = false;
        fit.note = "no positive excess";
        return fit;
    }

    double best_rms = std::numeric_limits<double>::infinity();
    for (const char* rate : kRates) {
        double sum = 0.0;
        std::vector<double> lr(used.size());
        for (std::size_t i = 0; i < used.size(); ++i) {
            lr[i] = std::log(rate_value(rate, static_cast<double>(used[i])));
            sum += log_excess[i] - lr[i];
        }
        const double logc = sum / static_cast<double>(used.size());
        double ss = 0.0;
        for (std::size_t i = 0; i < used.size(); ++i) {
            const double r = log_excess[i] - logc - lr[i];
            ss += r * r;
        }
        RateCandidate cand;
        cand.name = rate;
        cand.constant = std::exp(logc);
        cand.rms_residual = std::sqrt(ss / static_cast<double>(used.size()));
        if (cand.rms_residual < best_rms) {
            best_rms = cand.rms_residual;
            fit.best = cand.name;
        }
        fit.candidates.push_back(std::move(cand));
    }
    fit.fitted = true;
    return fit;
}

FluctuationFit fluctuation_fit(std::span<const std::int64_t> ns,
                               const std::vector<std::vector<double>>& samples_per_n) {
    if (ns.size() < 4)
        throw ConfigError("fluctuation fit: need at least 4 n values");
    if (samples_per_n.size() != ns.size())
        throw ConfigError("fluctuation fit: sample matrix shape mismatch");
    FluctuationFit fit;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const Moments m = compute_moments(samples_per_n[i]);
        if (!(m.stddev > 0.0)) throw DomainError("degenerate variance");
        FluctuationFit::Row row;
        row.n = ns[i];
        row.stddev = m.stddev;
        const double n = static_cast<double>(ns[i]);
        row.scale_ratio = m.stddev / std::sqrt(n / std::log(n));
        fit.rows.push_back(row);
        lx.push_back(std::log(n));
        ly.push_back(std::log(m.stddev));
    }
    const LineFit line = fit_line(lx, ly);
    fit.chi_hat = line.slope;
    fit.amplitude = std::exp(line.intercept);
    return fit;
}

FluctuationFit fluctuation_exponent(const LawPtr& law, int dim,
                                    std::span<const std::int64_t> ns,
                                    std::int64_t samples, std::uint64_t seed,
                                    int workers) {
    if (ns.size() < 4)
        throw ConfigError("fluctuation_exponent: need at least 4 dyadic n values");
    if (!law) throw ConfigError("fluctuation_exponent: null law");
    const Transverse zero(static_cast<std::size_t>(dim), 0);
    validate_series_inputs(ns, zero, samples);
    std::vector<std::vector<double>> values(ns.size());
    for (auto& v : values) v.assign(static_cast<std::size_t>(samples), 0.0);
    const Site source = origin_site(dim);
    parallel_chunks(samples, 64, workers, [&](std::int64_t begin, std::int64_t end, std::int64_t) {
        for (std::int64_t i = begin; i < end; ++i) {
            const WeightField field(seed + static_cast<std::uint64_t>(i), law, dim);
            for (std::size_t ni = 0; ni < ns.size(); ++ni) {
                const Site target{ns[ni], zero};
                values[ni][static_cast<std::size_t>(i)] =
                    min_passage_time(field, source, target);
            }
        }
    });
    return fluctuation_fit(ns, values);
}

const ExcessCell* ExcessMeanField::find(std::span<const std::int32_t> x) const {
    auto cmp = [](const ExcessCell& cell, std::span<const std::int32_t> key) {
        return std::lexicographical_compare(cell.x.begin(), cell.x.end(), key.begin(), key.end());
    };
    auto it = std::lower_bound(cells.begin(), cells.end(), x, cmp);
    if (it == cells.end() || it->x.size() != x.size() ||
        !std::equal(it->x.begin(), it->x.end(), x.begin()))
        return nullptr;
    return &*it;
}

std::string ExcessMeanField::to_csv(bool header) const {
    std::ostringstream os;
    if (header) {
        for (int k = 1; k <= dim; ++k) os << 'x' << k << ',';
        os << "s_hat,stderr\n";
    }
    for (const ExcessCell& cell : cells) {
        for (std::int32_t c : cell.x) os << c << ',';
        os << fmt_g17(cell.s_hat) << ',' << fmt_g17(cell.stderr_) << '\n';
    }
    return os.str();
}

namespace {

// Window cells at layer m: |x|_inf <= radius, |x|_1 <= m, parity consistent.
std::vector<Transverse> window_cells(int dim, std::int64_t m, std::int32_t radius) {
    std::vector<Transverse> cells;
    Transverse x(static_cast<std::size_t>(dim), -radius);
    while (true) {
        std::int64_t l1 = 0, sum = 0;
        for (std::int32_t c : x) {
            l1 += std::abs(static_cast<std::int64_t>(c));
            sum += c;
        }
        if (l1 <= m && (((m + sum) & 1) == 0)) cells.push_back(x);
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
    return cells;
}

ExcessMeanField reduce_excess_field(std::int64_t m, int dim, std::int32_t radius,
                                    double mu_hat, double c3, std::int64_t samples,
                                    const std::vector<Transverse>& cells,
                                    std::span<const std::vector<double>> chunk_sums,
                                    std::span<const std::vector<double>> chunk_sumsq) {
    ExcessMeanField field;
    field.m = m;
    field.dim = dim;
    field.window_radius = radius;
    field.mu_hat = mu_hat;
    field.samples = samples;
    field.cells.reserve(cells.size());
    const double drift = static_cast<double>(m) * mu_hat;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t ch = 0; ch < chunk_sums.size(); ++ch) {
            sum += chunk_sums[ch][ci];
            sumsq += chunk_sumsq[ch][ci];
        }
        const double mean = sum / static_cast<double>(samples);
        const double var =
            std::max(0.0, (sumsq - sum * mean) / static_cast<double>(samples - 1));
        ExcessCell cell;
        cell.x = cells[ci];
        cell.s_hat = mean - drift;
        cell.stderr_ = std::sqrt(var / static_cast<double>(samples));
        field.cells.push_back(std::move(cell));
    }
    // Largest sup-norm shell still containing an unexcessive cell.
    if (m >= 16) {
        const ScaleValues sv = scale_functions(static_cast<double>(m), c3);
        const double threshold = std::sqrt(static_cast<double>(m)) * sv.theta;
        std::int32_t h = -1;
        for (const ExcessCell& cell : field.cells) {
            std::int32_t linf = 0;
            for (std::int32_t c : cell.x) linf = std::max(linf, std::abs(c));
            if (cell.s_hat <= threshold) h = std::max(h, linf);
        }
        if (h >= 0) {
            field.h_shell_estimate = h;
            field.h_shell_capped = (h == radius);
        }
    }
    return field;
}

}  // namespace

ExcessMeanField excess_mean_field(const LawPtr& law, int dim, std::int64_t m,
                                  std::int32_t window_radius, std::int64_t samples,
                                  std::uint64_t seed, double mu_hat, double c3,
                                  int workers) {
    if (!law) throw ConfigError("excess_mean_field: null law");
    if (m < 2 || (m & 1) != 0) throw ConfigError("excess_mean_field: m must be even and >= 2");
    if (samples < 2) throw ConfigError("excess_mean_field: need at least 2 samples");
    if (window_radius < 0) throw ConfigError("excess_mean_field: negative window");

    const std::vector<Transverse> cells = window_cells(dim, m, window_radius);
    const Site source = origin_site(dim);
    constexpr std::int64_t kChunk = 32;
    const std::int64_t nchunks = (samples + kChunk - 1) / kChunk;
    std::vector<std::vector<double>> chunk_sums(static_cast<std::size_t>(nchunks));
    std::vector<std::vector<double>> chunk_sumsq(static_cast<std::size_t>(nchunks));

    parallel_chunks(samples, kChunk, workers, [&](std::int64_t begin, std::int64_t end, std::int64_t chunk) {
        auto& sums = chunk_sums[static_cast<std::size_t>(chunk)];
        auto& sumsq = chunk_sumsq[static_cast<std::size_t>(chunk)];
        sums.assign(cells.size(), 0.0);
        sumsq.assign(cells.size(), 0.0);
        for (std::int64_t i = begin; i < end; ++i) {
            const WeightField field(seed + static_cast<std::uint64_t>(i), law, dim);
            const LayerFront front = layer_passage_times(field, source, m);
            for (std::size_t ci = 0; ci < cells.size(); ++ci) {
                const double v = front.at(cells[ci]);
                sums[ci] += v;
                sumsq[ci] += v * v;
            }
        }
    });

    return reduce_excess_field(m, dim, window_radius, mu_hat, c3, samples, cells,
                               chunk_sums, chunk_sumsq);
}

std::vector<ExcessMeanField> excess_mean_surface(const LawPtr& law, int dim,
                                                 std::int64_t m_max,
                                                 std::int64_t samples,
                                                 std::uint64_t seed, double mu_hat,
                                                 double c3, int workers) {
    if (!law) throw ConfigError("excess_mean_surface: null law");
    if (m_max < 1) throw ConfigError("excess_mean_surface: m_max must be >= 1");
    if (samples < 2) throw ConfigError("excess_mean_surface: need at least 2 samples");

    // Full reach cone at every layer: radius = layer.
    std::vector<std::vector<Transverse>> cells(static_cast<std::size_t>(m_max) + 1);
    for (std::int64_t mm = 1; mm <= m_max; ++mm)
        cells[static_cast<std::size_t>(mm)] =
            window_cells(dim, mm, static_cast<std::int32_t>(mm));

    const Site source = origin_site(dim);
    constexpr std::int64_t kChunk = 32;
    const std::int64_t nchunks = (samples + kChunk - 1) / kChunk;
    // chunk -> layer -> per-cell sums
    std::vector<std::vector<std::vector<double>>> chunk_sums(static_cast<std::size_t>(nchunks));
    std::vector<std::vector<std::vector<double>>> chunk_sumsq(static_cast<std::size_t>(nchunks));

    parallel_chunks(samples, kChunk, workers, [&](std::int64_t begin, std::int64_t end, std::int64_t chunk) {
        auto& sums = chunk_sums[static_cast<std::size_t>(chunk)];
        auto& sumsq = chunk_sumsq[static_cast<std::size_t>(chunk)];
        sums.resize(static_cast<std::size_t>(m_max) + 1);
        sumsq.resize(static_cast<std::size_t>(m_max) + 1);
        for (std::int64_t mm = 1; mm <= m_max; ++mm) {
            sums[static_cast<std::size_t>(mm)].assign(cells[static_cast<std::size_t>(mm)].size(), 0.0);
            sumsq[static_cast<std::size_t>(mm)].assign(cells[static_cast<std::size_t>(mm)].size(), 0.0);
        }
        for (std::int64_t i = begin; i < end; ++i) {
            const WeightField field(seed + static_cast<std::uint64_t>(i), law, dim);
            const std::vector<LayerFront> fronts = layer_front_sequence(field, source, m_max);
            for (std::int64_t mm = 1; mm <= m_max; ++mm) {
                const auto& layer_cells = cells[static_cast<std::size_t>(mm)];
                for (std::size_t ci = 0; ci < layer_cells.size(); ++ci) {
                    const double v = fronts[static_cast<std::size_t>(mm)].at(layer_cells[ci]);
                    sums[static_cast<std::size_t>(mm)][ci] += v;
                    sumsq[static_cast<std::size_t>(mm)][ci] += v * v;
                }
            }
        }
    });

    std::vector<ExcessMeanField> fields;
    fields.reserve(static_cast<std::size_t>(m_max));
    for (std::int64_t mm = 1; mm <= m_max; ++mm) {
        std::vector<std::vector<double>> sums(static_cast<std::size_t>(nchunks));
        std::vector<std::vector<double>> sumsq(static_cast<std::size_t>(nchunks));
        for (std::int64_t ch = 0; ch < nchunks; ++ch) {
            sums[static_cast<std::size_t>(ch)] = chunk_sums[static_cast<std::size_t>(ch)][static_cast<std::size_t>(mm)];
            sumsq[static_cast<std::size_t>(ch)] = chunk_sumsq[static_cast<std::size_t>(ch)][static_cast<std::size_t>(mm)];
        }
        fields.push_back(reduce_excess_field(mm, dim, static_cast<std::int32_t>(mm),
                                             mu_hat, c3, samples,
                                             cells[static_cast<std::size_t>(mm)],
                                             sums, sumsq));
    }
    return fields;
}

void ExcessFieldTable::add(ExcessMeanField field) {
    fields_.push_back(std::move(field));
    std::sort(fields_.begin(), fields_.end(),
              [](const ExcessMeanField& a, const ExcessMeanField& b) { return a.m < b.m; });
}

std::optional<ExcessSource::Value> ExcessFieldTable::excess(
    std::int64_t m, std::span<const std::int32_t> x) const {
    if (fields_.empty()) return std::nullopt;
    // Nearest m; ties resolve to the smaller layer.
    const ExcessMeanField* best = &fields_.front();
    for (const ExcessMeanField& f : fields_) {
        const std::int64_t d_new = std::abs(f.m - m);
        const std::int64_t d_old = std::abs(best->m - m);
        if (d_new < d_old) best = &f;
    }
    bool estimated = best->m != m;
    if (const ExcessCell* cell = best->find(x))
        return Value{cell->s_hat, estimated};
    // Nearest cell in l1 distance; first (lexicographic) cell wins ties.
    const ExcessCell* nearest = nullptr;
    std::int64_t nearest_d = std::numeric_limits<std::int64_t>::max();
    for (const ExcessCell& cell : best->cells) {
        if (cell.x.size() != x.size()) continue;
        std::int64_t d = 0;
        for (std::size_t k = 0; k < x.size(); ++k)
            d += std::abs(static_cast<std::int64_t>(cell.x[k]) - x[k]);
        if (d < nearest_d) {
            nearest_d = d;
            nearest = &cell;
        }
    }
    if (nearest == nullptr) return std::nullopt;
    return Value{nearest->s_hat, true};
}

}  // namespace fpp
