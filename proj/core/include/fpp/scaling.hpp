#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpp/lattice.hpp"
#include "fpp/passage_law.hpp"

namespace fpp {

struct MeanSeriesEntry {
    std::int64_t n = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
    std::int64_t samples = 0;
    double variance = 0.0;
};

struct MeanSeries {
    std::vector<MeanSeriesEntry> entries;

    // CSV "n,mean,stderr,samples".
    std::string to_csv(bool header = true) const;
};

// Monte Carlo means of T((0,0),(n,x_target)) over independent fields with
// seeds seed, seed+1, ... Sample i sees the same field at every n, so dyadic
// comparisons are common-seed paired. Reduction runs in fixed seed order
// regardless of the worker count.
MeanSeries mean_passage_series(const LawPtr& law, int dim,
                               std::span<const std::int64_t> ns,
                               std::span<const std::int32_t> x_target,
                               std::int64_t samples, std::uint64_t seed,
                               int workers = 1);

struct TimeConstantEstimate {
    double mu_hat = 0.0;
    std::int64_t n_used = 0;
    double ci_halfwidth = 0.0;  // 1.96 * stderr(n_used) / n_used
    std::vector<std::pair<std::int64_t, double>> ratios;  // Ea_{0n}/n per n
    std::string note = "upper-biased";

    std::string to_json() const;
};

// mu_hat = mean(n)/n at the largest n. Subadditivity makes every Ea_{0n}/n an
// upper bound for the time constant, so the estimate is biased upward.
TimeConstantEstimate estimate_time_constant(const MeanSeries& series);

struct ScaleValues {
    double psi = 0.0;    // C3 sqrt(log m) / log log m
    double theta = 0.0;  // (log m)^{3/2}
    std::int64_t phi = 0;  // floor((log m)^2)
    double c3 = 1.0;
};

// Requires m >= 16 so that log log m is safely positive.
ScaleValues scale_functions(double m, double c3);

struct IncrementClass {
    bool slow = false;       // s_hat >= sqrt(n) / psi(n)
    bool excessive = false;  // s_hat >  sqrt(n) * theta(n)
};
IncrementClass classify_increment(double s_hat, double n, double c3);

struct RateCandidate {
    std::string name;
    double constant = 0.0;
    double rms_residual = 0.0;
};

struct RateFit {
    bool fitted = false;
    std::string best;
    std::vector<RateCandidate> candidates;
    std::vector<std::int64_t> used_ns;
    std::vector<std::int64_t> excluded_ns;  // excess <= 2 stderr
    std::string note;

    std::string to_json() const;
};

// Least-squares constant per candidate rate on log scale over the entries
// with significantly positive excess mean(n) - n*mu_hat. Candidates:
// sqrt_log n^{1/2}log n, sqrt_loglog n^{1/2}loglog n/(log n)^{1/2},
// kpz n^{1/3}, sqrt_n_over_log (n/log n)^{1/2}.
RateFit rate_fit(const MeanSeries& series, const TimeConstantEstimate& mu);

// Evaluate a candidate rate function by name (test hook for synthetic data).
double rate_value(const std::string& name, double n);

struct FluctuationFit {
    double chi_hat = 0.0;
    double amplitude = 0.0;
    struct Row {
        std::int64_t n = 0;
        double stddev = 0.0;
        double scale_ratio = 0.0;  // stddev / (n/log n)^{1/2}
    };
    std::vector<Row> rows;

    std::string to_json() const;
};

// Log-log regression of the sample stddev of a_{0n} against n. Throws
// DomainError("degenerate variance") if any stddev vanishes.
FluctuationFit fluctuation_exponent(const LawPtr& law, int dim,
                                    std::span<const std::int64_t> ns,
                                    std::int64_t samples, std::uint64_t seed,
                                    int workers = 1);

// Fit stage alone, for externally generated samples.
FluctuationFit fluctuation_fit(std::span<const std::int64_t> ns,
                               const std::vector<std::vector<double>>& samples_per_n);

struct ExcessCell {
    Transverse x;
    double s_hat = 0.0;
    double stderr_ = 0.0;
};

struct ExcessMeanField {
    std::int64_t m = 0;
    int dim = 1;
    std::int32_t window_radius = 0;
    double mu_hat = 0.0;
    std::int64_t samples = 0;
    std::vector<ExcessCell> cells;  // lexicographically sorted by x
    std::optional<std::int32_t> h_shell_estimate;  // largest unexcessive shell
    bool h_shell_capped = false;                   // estimate hit the window edge

    const ExcessCell* find(std::span<const std::int32_t> x) const;

    // CSV "x1..xd,s_hat,stderr".
    std::string to_csv(bool header = true) const;
};

// Excess-mean surface s_hat(m, x) = mean T((0,0),(m,x)) - m*mu_hat over the
// window |x|_inf <= window_radius, one DP front per sample. Cells outside the
// reach cone are skipped.
ExcessMeanField excess_mean_field(const LawPtr& law, int dim, std::int64_t m,
                                  std::int32_t window_radius, std::int64_t samples,
                                  std::uint64_t seed, double mu_hat, double c3,
                                  int workers = 1);

// Excess surfaces for every layer 1..m_max in one sweep per sample; feeds the
// slow/fast lookups of the climbing-skeleton diagnostics.
std::vector<ExcessMeanField> excess_mean_surface(const LawPtr& law, int dim,
                                                 std::int64_t m_max,
                                                 std::int64_t samples,
                                                 std::uint64_t seed, double mu_hat,
                                                 double c3, int workers = 1);

// Source of s_hat(m, x) values for increment classification. `estimated`
// marks a nearest-available fallback rather than a direct table hit.
class ExcessSource {
public:
    struct Value {
        double s_hat = 0.0;
        bool estimated = false;
    };
    virtual ~ExcessSource() = default;
    virtual std::optional<Value> excess(std::int64_t m,
                                        std::span<const std::int32_t> x) const = 0;
};

// s == 0 identically; the exact source for constant-weight fields.
class ZeroExcess final : public ExcessSource {
public:
    std::optional<Value> excess(std::int64_t,
                                std::span<const std::int32_t>) const override {
        return Value{0.0, false};
    }
};

// Table of precomputed excess fields with nearest-m / nearest-cell fallback.
class ExcessFieldTable final : public ExcessSource {
public:
    void add(ExcessMeanField field);
    std::optional<Value> excess(std::int64_t m,
                                std::span<const std::int32_t> x) const override;
    const std::vector<ExcessMeanField>& fields() const { return fields_; }

private:
    std::vector<ExcessMeanField> fields_;  // sorted by m
};

}  // namespace fpp
