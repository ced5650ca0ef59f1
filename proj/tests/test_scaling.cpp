#include <doctest.h>

#include <cmath>
#include <random>

#include "fpp/errors.hpp"
#include "fpp/scaling.hpp"

using namespace fpp;

namespace {

TimeConstantEstimate exact_mu(double mu, std::int64_t n_used) {
    TimeConstantEstimate est;
    est.mu_hat = mu;
    est.n_used = n_used;
    est.ci_halfwidth = 0.0;
    return est;
}

MeanSeries synthetic_series(const std::vector<std::int64_t>& ns, double mu,
                            const std::string& rate, double constant,
                            double noise_sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sigma);
    MeanSeries series;
    for (std::int64_t n : ns) {
        MeanSeriesEntry e;
        e.n = n;
        const double excess = constant * rate_value(rate, static_cast<double>(n));
        e.mean = mu * static_cast<double>(n) +
                 excess * std::exp(noise_sigma > 0.0 ? noise(rng) : 0.0);
        e.stderr_ = excess * 1e-4;
        e.samples = 1000;
        e.variance = e.stderr_ * e.stderr_ * 1000.0;
        series.entries.push_back(e);
    }
    return series;
}

}  // namespace

TEST_SUITE_BEGIN("scaling");

TEST_CASE("mean series under the constant law is exact") {
    const std::vector<std::int64_t> ns{4, 8, 16};
    const MeanSeries series = mean_passage_series(make_constant(1.0), 1, ns, {},
                                                  64, 7, 2);
    REQUIRE(series.entries.size() == 3);
    for (const auto& e : series.entries) {
        CHECK(e.mean == static_cast<double>(e.n));
        CHECK(e.variance == 0.0);
        CHECK(e.stderr_ == 0.0);
    }
}

TEST_CASE("mean series preconditions") {
    const auto law = make_exponential(1.0);
    CHECK_THROWS_AS(mean_passage_series(law, 1, std::vector<std::int64_t>{3}, {}, 10, 1),
                    ConfigError);
    CHECK_THROWS_AS(mean_passage_series(law, 1, std::vector<std::int64_t>{8, 4}, {}, 10, 1),
                    ConfigError);
    CHECK_THROWS_AS(mean_passage_series(law, 1, std::vector<std::int64_t>{4}, {}, 1, 1),
                    ConfigError);
    const std::vector<std::int32_t> far{10};
    CHECK_THROWS_AS(mean_passage_series(law, 1, std::vector<std::int64_t>{4}, far, 10, 1),
                    ConfigError);
}

TEST_CASE("mean series is worker-count invariant") {
    const std::vector<std::int64_t> ns{8, 16};
    const auto law = make_exponential(1.0);
    const MeanSeries one = mean_passage_series(law, 1, ns, {}, 300, 11, 1);
    const MeanSeries two = mean_passage_series(law, 1, ns, {}, 300, 11, 2);
    for (std::size_t i = 0; i < ns.size(); ++i) {
        CHECK(one.entries[i].mean == two.entries[i].mean);
        CHECK(one.entries[i].variance == two.entries[i].variance);
    }
}

TEST_CASE("n=2 mean matches a direct minimum-of-sums oracle") {
    // Two disjoint 2-bond paths: T = min(w1+w2, w3+w4) with Exp(1) weights.
    std::mt19937_64 rng(2024);
    std::exponential_distribution<double> exp1(1.0);
    const std::int64_t oracle_samples = 10000000;
    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t i = 0; i < oracle_samples; ++i) {
        const double a = exp1(rng) + exp1(rng);
        const double b = exp1(rng) + exp1(rng);
        const double v = std::min(a, b);
        sum += v;
        sumsq += v * v;
    }
    const double oracle_mean = sum / static_cast<double>(oracle_samples);
    const double oracle_var =
        (sumsq - sum * oracle_mean) / static_cast<double>(oracle_samples - 1);
    const double oracle_se = std::sqrt(oracle_var / static_cast<double>(oracle_samples));
    // Closed form E min = 1.25 for this 4-variable minimum.
    CHECK(oracle_mean == doctest::Approx(1.25).epsilon(0.002));

    const std::vector<std::int64_t> ns{2};
    const MeanSeries series =
        mean_passage_series(make_exponential(1.0), 1, ns, {}, 40000, 5, 2);
    const double se_joint =
        std::sqrt(series.entries[0].stderr_ * series.entries[0].stderr_ +
                  oracle_se * oracle_se);
    CHECK(std::fabs(series.entries[0].mean - oracle_mean) <= 3.0 * se_joint);
}

TEST_CASE("stderr follows sqrt scaling in the sample count") {
    const std::vector<std::int64_t> ns{16};
    const auto law = make_exponential(1.0);
    const double se1 = mean_passage_series(law, 1, ns, {}, 2000, 3, 2).entries[0].stderr_;
    const double se2 = mean_passage_series(law, 1, ns, {}, 4000, 3, 2).entries[0].stderr_;
    const double se4 = mean_passage_series(law, 1, ns, {}, 8000, 3, 2).entries[0].stderr_;
    CHECK(se2 / se1 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.2));
    CHECK(se4 / se1 == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("time constant estimation") {
    SUBCASE("constant law gives mu_hat = 1 exactly") {
        const std::vector<std::int64_t> ns{8, 16, 32};
        const MeanSeries series =
            mean_passage_series(make_constant(1.0), 1, ns, {}, 16, 1, 1);
        const TimeConstantEstimate est = estimate_time_constant(series);
        CHECK(est.mu_hat == 1.0);
        CHECK(est.n_used == 32);
        CHECK(est.ratios.size() == 3);
        CHECK(est.note == "upper-biased");
    }
    SUBCASE("dyadic ratios are nonincreasing within 3 sigma") {
        const std::vector<std::int64_t> ns{8, 16, 32, 64};
        const MeanSeries series =
            mean_passage_series(make_exponential(1.0), 1, ns, {}, 4000, 17, 2);
        // mu_hat overestimates mu, so excesses may dip below zero only within
        // noise.
        const TimeConstantEstimate mu = estimate_time_constant(series);
        for (const auto& e : series.entries) {
            CHECK(e.mean - static_cast<double>(e.n) * mu.mu_hat >= -3.0 * e.stderr_);
        }
        for (std::size_t i = 1; i < series.entries.size(); ++i) {
            const auto& lo = series.entries[i - 1];
            const auto& hi = series.entries[i];
            const double ratio_lo = lo.mean / static_cast<double>(lo.n);
            const double ratio_hi = hi.mean / static_cast<double>(hi.n);
            const double se = std::sqrt(
                std::pow(lo.stderr_ / static_cast<double>(lo.n), 2.0) +
                std::pow(hi.stderr_ / static_cast<double>(hi.n), 2.0));
            CHECK(ratio_hi <= ratio_lo + 3.0 * se);
            // Subadditivity of the means themselves.
            const double sub_se = std::sqrt(hi.stderr_ * hi.stderr_ +
                                            4.0 * lo.stderr_ * lo.stderr_);
            CHECK(hi.mean <= 2.0 * lo.mean + 3.0 * sub_se);
        }
    }
}

TEST_CASE("scale functions") {
    SUBCASE("direct formula evaluation") {
        const ScaleValues at55 = scale_functions(55.0, 1.0);
        CHECK(at55.theta == doctest::Approx(std::pow(std::log(55.0), 1.5)).epsilon(1e-14));
        const ScaleValues psi4 = scale_functions(std::exp(4.0), 1.0);
        CHECK(psi4.psi == doctest::Approx(2.0 / std::log(4.0)).epsilon(1e-12));
        CHECK(psi4.psi == doctest::Approx(1.4426950408889634).epsilon(1e-10));
        CHECK(scale_functions(21.0, 1.0).phi == 9);  // (log 21)^2 = 9.269...
    }
    SUBCASE("recompute property on an integer grid") {
        for (std::int64_t m = 16; m <= 4096; m += 37) {
            const ScaleValues sv = scale_functions(static_cast<double>(m), 2.5);
            const double lg = std::log(static_cast<double>(m));
            CHECK(sv.psi == 2.5 * std::sqrt(lg) / std::log(lg));
            CHECK(sv.theta == std::pow(lg, 1.5));
            CHECK(sv.phi == static_cast<std::int64_t>(std::floor(lg * lg)));
        }
    }
    SUBCASE("domain guard") {
        CHECK_THROWS_AS(scale_functions(8.0, 1.0), ConfigError);
        CHECK_THROWS_AS(scale_functions(64.0, -1.0), ConfigError);
    }
}

TEST_CASE("increment classification") {
    SUBCASE("zero excess is fast and unexcessive") {
        const IncrementClass cls = classify_increment(0.0, 256.0, 1.0);
        CHECK_FALSE(cls.slow);
        CHECK_FALSE(cls.excessive);
    }
    SUBCASE("just above the excessive threshold is excessive and slow") {
        const ScaleValues sv = scale_functions(256.0, 1.0);
        const double s = std::sqrt(256.0) * sv.theta * 1.0001;
        const IncrementClass cls = classify_increment(s, 256.0, 1.0);
        CHECK(cls.excessive);
        CHECK(cls.slow);  // theta(n) >= 1/psi(n) at this scale
    }
    SUBCASE("thresholds are monotone in s_hat") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> unif(0.0, 400.0);
        for (int trial = 0; trial < 200; ++trial) {
            double a = unif(rng), b = unif(rng);
            if (a > b) std::swap(a, b);
            const IncrementClass lo = classify_increment(a, 128.0, 1.0);
            const IncrementClass hi = classify_increment(b, 128.0, 1.0);
            CHECK((!lo.slow || hi.slow));
            CHECK((!lo.excessive || hi.excessive));
        }
    }
}

TEST_CASE("rate fits") {
    const std::vector<std::int64_t> dyadic{32, 64, 128, 256, 512, 1024, 2048, 4096,
                                           8192, 16384};
    SUBCASE("sqrt_log synthetic recovered with its constant") {
        const MeanSeries series = synthetic_series(dyadic, 1.0, "sqrt_log", 5.0, 0.0, 1);
        const RateFit fit = rate_fit(series, exact_mu(1.0, dyadic.back()));
        REQUIRE(fit.fitted);
        CHECK(fit.best == "sqrt_log");
        for (const auto& cand : fit.candidates) {
            if (cand.name == "sqrt_log")
                CHECK(cand.constant == doctest::Approx(5.0).epsilon(0.05));
        }
    }
    SUBCASE("kpz synthetic recovered") {
        const MeanSeries series = synthetic_series(dyadic, 1.0, "kpz", 2.0, 0.0, 2);
        const RateFit fit = rate_fit(series, exact_mu(1.0, dyadic.back()));
        REQUIRE(fit.fitted);
        CHECK(fit.best == "kpz");
    }
    SUBCASE("constant law reports no positive excess") {
        MeanSeries series;
        for (std::int64_t n : std::vector<std::int64_t>{8, 16, 32, 64, 128})
            series.entries.push_back(MeanSeriesEntry{n, static_cast<double>(n), 0.0, 100, 0.0});
        const RateFit fit = rate_fit(series, exact_mu(1.0, 128));
        CHECK_FALSE(fit.fitted);
        CHECK(fit.note == "no positive excess");
        CHECK(fit.excluded_ns.size() == 5);
    }
    SUBCASE("fifty randomized trials recover the generating rate") {
        const char* rates[] = {"sqrt_log", "sqrt_loglog", "kpz", "sqrt_n_over_log"};
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> cdist(0.5, 10.0);
        int correct = 0;
        int constant_ok = 0;
        for (int trial = 0; trial < 50; ++trial) {
            const char* rate = rates[trial % 4];
            const double c = cdist(rng);
            const MeanSeries series =
                synthetic_series(dyadic, 1.0, rate, c, 0.005, 1000 + static_cast<std::uint64_t>(trial));
            const RateFit fit = rate_fit(series, exact_mu(1.0, dyadic.back()));
            REQUIRE(fit.fitted);
            if (fit.best == rate) ++correct;
            for (const auto& cand : fit.candidates) {
                if (cand.name == rate && std::fabs(cand.constant - c) / c < 0.05)
                    ++constant_ok;
            }
        }
        CHECK(correct == 50);
        CHECK(constant_ok == 50);
    }
    SUBCASE("preconditions") {
        MeanSeries tiny;
        for (std::int64_t n : std::vector<std::int64_t>{8, 16, 32})
            tiny.entries.push_back(MeanSeriesEntry{n, static_cast<double>(n), 0.01, 10, 0.001});
        CHECK_THROWS_AS(rate_fit(tiny, exact_mu(1.0, 32)), ConfigError);
    }
}

TEST_CASE("fluctuation fits") {
    SUBCASE("iid-sum surrogate has chi = 1/2") {
        std::mt19937_64 rng(7);
        std::exponential_distribution<double> exp1(1.0);
        const std::vector<std::int64_t> ns{64, 128, 256, 512};
        std::vector<std::vector<double>> samples(ns.size());
        for (std::size_t i = 0; i < ns.size(); ++i) {
            samples[i].reserve(4000);
            for (int s = 0; s < 4000; ++s) {
                double sum = 0.0;
                for (std::int64_t j = 0; j < ns[i]; ++j) sum += exp1(rng);
                samples[i].push_back(sum);
            }
        }
        const FluctuationFit fit = fluctuation_fit(ns, samples);
        CHECK(std::fabs(fit.chi_hat - 0.5) <= 0.05);
        for (const auto& row : fit.rows) CHECK(row.stddev > 0.0);
    }
    SUBCASE("degenerate variance raises") {
        const std::vector<std::int64_t> ns{16, 32, 64, 128};
        CHECK_THROWS_WITH_AS(
            fluctuation_exponent(make_constant(1.0), 1, ns, 50, 1, 1),
            "degenerate variance", DomainError);
    }
}

TEST_CASE("excess mean field") {
    const auto law = make_exponential(1.0);
    // mu_hat from a longer series so the excess estimates keep a positive margin.
    const std::vector<std::int64_t> mu_ns{128};
    const MeanSeries mu_series = mean_passage_series(law, 1, mu_ns, {}, 2000, 900, 2);
    const double mu_hat = estimate_time_constant(mu_series).mu_hat;

    const ExcessMeanField field =
        excess_mean_field(law, 1, 32, 6, 2000, 55, mu_hat, 1.0, 2);
    CHECK(field.m == 32);
    REQUIRE(!field.cells.empty());

    SUBCASE("nonnegative within noise and symmetric within noise") {
        for (const ExcessCell& cell : field.cells) {
            CHECK(cell.s_hat >= -3.0 * cell.stderr_);
            Transverse neg = cell.x;
            for (auto& c : neg) c = -c;
            const ExcessCell* mirror = field.find(neg);
            REQUIRE(mirror != nullptr);
            const double joint =
                std::sqrt(cell.stderr_ * cell.stderr_ + mirror->stderr_ * mirror->stderr_);
            CHECK(std::fabs(cell.s_hat - mirror->s_hat) <= 3.0 * joint);
        }
    }
    SUBCASE("window respects parity and the reach cone") {
        CHECK(field.find(Transverse{1}) == nullptr);   // odd parity at even m
        CHECK(field.find(Transverse{0}) != nullptr);
        CHECK(field.find(Transverse{6}) != nullptr);
    }
    SUBCASE("h shell estimate present at m >= 16") {
        REQUIRE(field.h_shell_estimate.has_value());
        CHECK(*field.h_shell_estimate >= 0);
        CHECK(*field.h_shell_estimate <= 6);
    }
}

TEST_CASE("excess surfaces and table fallback") {
    const auto law = make_exponential(1.0);
    const auto fields = excess_mean_surface(law, 1, 6, 200, 77, 0.4, 1.0, 2);
    REQUIRE(fields.size() == 6);
    CHECK(fields[0].m == 1);
    CHECK(fields[5].m == 6);

    ExcessFieldTable table;
    for (const auto& f : fields) table.add(f);

    SUBCASE("direct hit is not flagged") {
        const auto v = table.excess(4, Transverse{2});
        REQUIRE(v.has_value());
        CHECK_FALSE(v->estimated);
    }
    SUBCASE("missing m falls back to the nearest layer, flagged") {
        const auto v = table.excess(9, Transverse{0});
        REQUIRE(v.has_value());
        CHECK(v->estimated);
    }
    SUBCASE("missing cell falls back to the nearest cell, flagged") {
        const auto v = table.excess(4, Transverse{100});
        REQUIRE(v.has_value());
        CHECK(v->estimated);
    }
    SUBCASE("empty table yields nothing") {
        const ExcessFieldTable empty;
        CHECK_FALSE(empty.excess(4, Transverse{0}).has_value());
    }
}

TEST_SUITE_END();
