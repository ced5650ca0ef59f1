#pragma once

#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace fpp {

// Support interval of a weight law; upper may be +infinity.
struct Support {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();

    bool upper_finite() const { return upper < std::numeric_limits<double>::infinity(); }
};

// A nonnegative weight law nu with density, distribution function and
// quantile. The quantile is the generalized inverse of the cdf on (0,1).
class PassageLaw {
public:
    virtual ~PassageLaw() = default;

    virtual const std::string& name() const = 0;
    virtual Support support() const = 0;

    // False for atomic laws (no density); the nearly-gamma machinery rejects
    // those, the passage engine accepts them.
    virtual bool has_density() const { return true; }

    virtual double density(double y) const = 0;
    virtual double cdf(double y) const = 0;
    virtual double quantile(double p) const = 0;

    // Survival function 1 - F(y); overridden where the upper tail can be
    // computed without cancellation.
    virtual double sf(double y) const { return 1.0 - cdf(y); }

    // Batch quantile evaluation; the DP engine's hot path. Overrides keep the
    // loop free of per-element virtual dispatch.
    virtual void quantile_many(std::span<const double> u, std::span<double> out) const {
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = quantile(u[i]);
    }

    // Round-trippable CLI spec, e.g. "exp:rate=1".
    virtual std::string spec_string() const = 0;
};

using LawPtr = std::shared_ptr<const PassageLaw>;

LawPtr make_exponential(double rate);
LawPtr make_gamma(double shape, double rate);
LawPtr make_uniform(double a, double b);
LawPtr make_weibull(double shape, double scale);
LawPtr make_constant(double value);

// Parses "exp:rate=1.0", "gamma:shape=2,rate=1", "uniform:a=0,b=1",
// "weibull:shape=2,scale=1", "const:value=1". Throws ConfigError.
LawPtr parse_law(std::string_view spec);

// quantile(u) for u in (0,1); throws DomainError outside.
double sample(const PassageLaw& law, double u);

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

}  // namespace fpp
