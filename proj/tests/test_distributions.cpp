#include <doctest.h>

#include <cmath>
#include <random>

#include "fpp/distribution_checks.hpp"
#include "fpp/errors.hpp"
#include "fpp/normal.hpp"
#include "fpp/numerics.hpp"
#include "fpp/passage_law.hpp"

using namespace fpp;

namespace {

// Two uniform lumps with a gap: support not an interval.
class SplitLaw final : public PassageLaw {
public:
    const std::string& name() const override {
        static const std::string n = "split";
        return n;
    }
    Support support() const override { return {0.0, 3.0}; }
    double density(double y) const override {
        if ((y >= 0.0 && y <= 1.0) || (y >= 2.0 && y <= 3.0)) return 0.5;
        return 0.0;
    }
    double cdf(double y) const override {
        if (y <= 0.0) return 0.0;
        if (y <= 1.0) return 0.5 * y;
        if (y <= 2.0) return 0.5;
        if (y <= 3.0) return 0.5 + 0.5 * (y - 2.0);
        return 1.0;
    }
    double quantile(double p) const override {
        return p <= 0.5 ? 2.0 * p : 2.0 + 2.0 * (p - 0.5);
    }
    std::string spec_string() const override { return "split"; }
};

double quad_cdf(const PassageLaw& law, double y) {
    const double lo = law.support().lower;
    return adaptive_simpson([&](double t) { return law.density(t); }, lo, y, 1e-12).value;
}

}  // namespace

TEST_SUITE_BEGIN("distributions");

TEST_CASE("gaussian kernel accuracy") {
    CHECK(norm_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-12));
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(norm_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));

    // Phi(Phi^{-1}(p)) = p to 1e-10 across [1e-8, 1-1e-8].
    for (double lp = -8.0; lp <= -0.31; lp += 0.07) {
        const double p = std::pow(10.0, lp);
        CHECK(std::fabs(norm_cdf(norm_quantile(p)) - p) <= 1e-10);
        CHECK(std::fabs(norm_cdf(norm_quantile(1.0 - p)) - (1.0 - p)) <= 1e-10);
    }
    CHECK_THROWS_AS(norm_quantile(0.0), DomainError);
    CHECK_THROWS_AS(norm_quantile(1.0), DomainError);
}

TEST_CASE("sampling is the quantile map") {
    const auto exp1 = make_exponential(1.0);
    CHECK(sample(*exp1, 1.0 - std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sample(*exp1, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    const auto uni = make_uniform(0.0, 1.0);
    CHECK(sample(*uni, 0.25) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_THROWS_AS(sample(*exp1, 0.0), DomainError);
    CHECK_THROWS_AS(sample(*exp1, 1.0), DomainError);
}

TEST_CASE("sample is nondecreasing in u") {
    for (const LawPtr& law : {make_exponential(1.0), make_gamma(2.0, 1.0),
                              make_uniform(0.0, 1.0), make_weibull(2.0, 1.0)}) {
        double prev = -1.0;
        for (int i = 1; i < 400; ++i) {
            const double u = i / 400.0;
            const double v = sample(*law, u);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("quantile round trips") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unif(1e-6, 1.0 - 1e-6);
    for (const LawPtr& law : {make_exponential(1.0), make_gamma(2.0, 1.0),
                              make_gamma(0.5, 1.0), make_uniform(0.0, 1.0),
                              make_weibull(2.0, 1.0)}) {
        for (int i = 0; i < 1000; ++i) {
            const double p = unif(rng);
            CHECK(law->cdf(law->quantile(p)) == doctest::Approx(p).epsilon(1e-8));
        }
    }
}

TEST_CASE("upsilon closed forms") {
    const auto exp1 = make_exponential(1.0);
    // F(ln 2) = 1/2, so Phi^{-1} lands at 0 and the ratio is phi(0)/f(ln 2).
    CHECK(upsilon(*exp1, std::log(2.0)) ==
          doctest::Approx(0.7978845608028654).epsilon(1e-10));
    const auto uni = make_uniform(0.0, 1.0);
    CHECK(upsilon(*uni, 0.5) == doctest::Approx(0.3989422804014327).epsilon(1e-10));
    CHECK_THROWS_AS(upsilon(*uni, 1.5), DomainError);
    CHECK_THROWS_AS(upsilon(*exp1, -0.5), DomainError);
}

TEST_CASE("upsilon against a quadrature oracle") {
    // Recompute F by integrating the density, independently of the law's cdf.
    for (const LawPtr& law : {make_exponential(1.0), make_gamma(2.0, 1.0),
                              make_weibull(2.0, 1.0)}) {
        for (double y : {0.25, 0.8, 1.7}) {
            const double f = law->density(y);
            const double oracle = norm_pdf(norm_quantile(quad_cdf(*law, y))) / f;
            CHECK(upsilon(*law, y) == doctest::Approx(oracle).epsilon(1e-6));
        }
    }
    // Exp(1): Upsilon(y)/sqrt(y) stays finite as y -> 0.
    const auto exp1 = make_exponential(1.0);
    const double ratio = upsilon(*exp1, 0.01) / std::sqrt(0.01);
    CHECK(std::isfinite(ratio));
    CHECK(ratio > 0.0);
    CHECK(ratio < 1.0);
}

TEST_CASE("nearly gamma scans") {
    SUBCASE("exponential passes with room") {
        const auto report =
            nearly_gamma_scan(*make_exponential(1.0), {0.01, 50.0, 500}, 10.0);
        CHECK(report.pass);
        CHECK(report.interval_connected);
        CHECK(report.continuity_flag);
        CHECK(report.a_fit > 0.0);
        CHECK(report.a_fit < 10.0);
        for (const auto& [y, u] : report.grid) CHECK(u > 0.0);
    }
    SUBCASE("uniform passes") {
        const auto report =
            nearly_gamma_scan(*make_uniform(0.0, 1.0), {0.01, 0.99, 200}, 10.0);
        CHECK(report.pass);
        for (const auto& [y, u] : report.grid) CHECK(u > 0.0);
    }
    SUBCASE("gamma(2) and weibull(2) pass") {
        CHECK(nearly_gamma_scan(*make_gamma(2.0, 1.0), {0.01, 50.0, 400}, 100.0).pass);
        CHECK(nearly_gamma_scan(*make_weibull(2.0, 1.0), {0.01, 6.0, 400}, 100.0).pass);
    }
    SUBCASE("disconnected support fails for that reason") {
        const SplitLaw split;
        const auto report = nearly_gamma_scan(split, {0.05, 2.95, 200}, 100.0);
        CHECK_FALSE(report.pass);
        CHECK_FALSE(report.interval_connected);
        CHECK_FALSE(report.point_errors.empty());
    }
    SUBCASE("atomic laws are rejected") {
        CHECK_THROWS_WITH_AS(nearly_gamma_scan(*make_constant(1.0), {0.1, 0.9, 10}, 10.0),
                             "nearly_gamma_scan: law has no density", DomainError);
    }
    SUBCASE("a_fit is stable under grid doubling") {
        struct Case {
            LawPtr law;
            GridSpec grid;
        };
        const Case cases[] = {
            {make_exponential(1.0), {0.01, 50.0, 400}},
            {make_gamma(2.0, 1.0), {0.01, 50.0, 400}},
            {make_uniform(0.0, 1.0), {0.01, 0.99, 400}},
            {make_weibull(2.0, 1.0), {0.01, 6.0, 400}},
        };
        for (const Case& c : cases) {
            const double coarse = nearly_gamma_scan(*c.law, c.grid, 100.0).a_fit;
            GridSpec denser = c.grid;
            denser.count *= 2;
            const double fine = nearly_gamma_scan(*c.law, denser, 100.0).a_fit;
            CHECK(std::fabs(fine - coarse) / coarse < 0.05);
        }
    }
}

TEST_CASE("endpoint sufficient conditions") {
    SUBCASE("exponential certifies via the hazard branch") {
        const auto report = sufficient_condition_check(*make_exponential(1.0));
        CHECK(report.verdict == EndpointCondition::condition_ii);
        REQUIRE(report.hazard_min.has_value());
        CHECK(*report.hazard_min == doctest::Approx(1.0).epsilon(0.02));
        CHECK(*report.hazard_max == doctest::Approx(1.0).epsilon(0.02));
        CHECK(report.alpha_hat == doctest::Approx(0.0).epsilon(0.02));
    }
    SUBCASE("uniform certifies via finite endpoints") {
        const auto report = sufficient_condition_check(*make_uniform(0.0, 1.0));
        CHECK(report.verdict == EndpointCondition::condition_i);
        CHECK(report.alpha_hat == doctest::Approx(0.0).epsilon(1e-6));
        REQUIRE(report.beta_hat.has_value());
        CHECK(*report.beta_hat == doctest::Approx(0.0).epsilon(1e-6));
    }
    SUBCASE("gamma(1/2) has exponent -1/2 at the origin") {
        const auto report = sufficient_condition_check(*make_gamma(0.5, 1.0));
        CHECK(report.verdict == EndpointCondition::condition_ii);
        CHECK(report.alpha_hat == doctest::Approx(-0.5).epsilon(0.02));
    }
}

TEST_CASE("exponential moment check") {
    SUBCASE("exp(1) at t=1/2 integrates to 2") {
        const auto report = exp_moment_check(*make_exponential(1.0), 0.5, 40.0);
        CHECK(report.finite);
        CHECK(report.value == doctest::Approx(2.0).epsilon(1e-6));
    }
    SUBCASE("exp(1) at t=2 diverges") {
        const auto report = exp_moment_check(*make_exponential(1.0), 2.0, 40.0);
        CHECK_FALSE(report.finite);
    }
    SUBCASE("uniform at t=1 integrates to e-1") {
        const auto report = exp_moment_check(*make_uniform(0.0, 1.0), 1.0, 40.0);
        CHECK(report.finite);
        CHECK(report.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(exp_moment_check(*make_exponential(1.0), -1.0, 40.0), ConfigError);
}

TEST_CASE("law spec parsing") {
    CHECK(parse_law("exp:rate=1.0")->name() == "exponential");
    CHECK(parse_law("gamma:shape=2,rate=1")->name() == "gamma");
    CHECK(parse_law("uniform:a=0,b=1")->name() == "uniform");
    CHECK(parse_law("weibull:shape=2,scale=1")->name() == "weibull");
    CHECK(parse_law("const:value=1")->name() == "constant");
    CHECK(parse_law("exp:rate=2")->quantile(0.5) ==
          doctest::Approx(std::log(2.0) / 2.0).epsilon(1e-12));

    CHECK_THROWS_AS(parse_law("exp:rate=-1"), ConfigError);
    CHECK_THROWS_AS(parse_law("cauchy:scale=1"), ConfigError);
    CHECK_THROWS_AS(parse_law("exp:rte=1"), ConfigError);
    CHECK_THROWS_AS(parse_law("weibull:shape=0.5"), ConfigError);
    CHECK_THROWS_AS(parse_law("uniform:a=-1,b=1"), ConfigError);
}

TEST_SUITE_END();
