#include "fpp/passage_law.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "fpp/errors.hpp"
#include "fpp/normal.hpp"

namespace fpp {

namespace {

// Series expansion of P(a,x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x) = 1 - P(a,x), valid for x >= a + 1.
double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (a <= 0.0) throw ConfigError("regularized_gamma_p: shape must be positive");
    if (x <= 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_contfrac(a, x);
}

double regularized_gamma_q(double a, double x) {
    if (a <= 0.0) throw ConfigError("regularized_gamma_q: shape must be positive");
    if (x <= 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_contfrac(a, x);
}

namespace {

class ExponentialLaw final : public PassageLaw {
public:
    explicit ExponentialLaw(double rate) : rate_(rate), name_("exponential") {
        if (!(rate > 0.0)) throw ConfigError("exp law: rate must be positive");
    }
    const std::string& name() const override { return name_; }
    Support support() const override { return {0.0, std::numeric_limits<double>::infinity()}; }
    double density(double y) const override {
        return y < 0.0 ? 0.0 : rate_ * std::exp(-rate_ * y);
    }
    double cdf(double y) const override {
        return y <= 0.0 ? 0.0 : -std::expm1(-rate_ * y);
    }
    double sf(double y) const override {
        return y <= 0.0 ? 1.0 : std::exp(-rate_ * y);
    }
    double quantile(double p) const override { return -std::log1p(-p) / rate_; }
    void quantile_many(std::span<const double> u, std::span<double> out) const override {
        const double inv = 1.0 / rate_;
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = -std::log1p(-u[i]) * inv;
    }
    std::string spec_string() const override {
        std::ostringstream os;
        os << "exp:rate=" << rate_;
        return os.str();
    }

private:
    double rate_;
    std::string name_;
};

class GammaLaw final : public PassageLaw {
public:
    GammaLaw(double shape, double rate) : shape_(shape), rate_(rate), name_("gamma") {
        if (!(shape > 0.0)) throw ConfigError("gamma law: shape must be positive");
        if (!(rate > 0.0)) throw ConfigError("gamma law: rate must be positive");
        log_norm_ = shape_ * std::log(rate_) - std::lgamma(shape_);
    }
    const std::string& name() const override { return name_; }
    Support support() const override { return {0.0, std::numeric_limits<double>::infinity()}; }
    double density(double y) const override {
        if (y < 0.0) return 0.0;
        if (y == 0.0) {
            if (shape_ < 1.0) return std::numeric_limits<double>::infinity();
            if (shape_ == 1.0) return rate_;
            return 0.0;
        }
        return std::exp(log_norm_ + (shape_ - 1.0) * std::log(y) - rate_ * y);
    }
    double cdf(double y) const override {
        return y <= 0.0 ? 0.0 : regularized_gamma_p(shape_, rate_ * y);
    }
    double sf(double y) const override {
        return y <= 0.0 ? 1.0 : regularized_gamma_q(shape_, rate_ * y);
    }
    double quantile(double p) const override {
        // Wilson-Hilferty start, then Newton on the cdf.
        const double g = std::lgamma(shape_);
        const double z = norm_quantile(p);
        const double c = 1.0 - 1.0 / (9.0 * shape_);
        double x = shape_ * std::pow(c + z / (3.0 * std::sqrt(shape_)), 3.0);
        if (!(x > 0.0)) x = std::exp((std::log(p * shape_) + g) / shape_);
        // Newton iterations with bisection fallback.
        double lo = 0.0, hi = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 200; ++it) {
            const double fx = regularized_gamma_p(shape_, x) - p;
            (fx < 0.0 ? lo : hi) = x;
            const double pdf = std::exp((shape_ - 1.0) * std::log(x) - x - g);
            double step = pdf > 0.0 ? fx / pdf : 0.0;
            double next = x - step;
            if (!(next > lo) || !(next < hi) || pdf == 0.0)
                next = std::isinf(hi) ? x * 2.0 : 0.5 * (lo + hi);
            if (std::fabs(next - x) <= 1e-14 * std::max(1.0, x)) {
                x = next;
                break;
            }
            x = next;
        }
        return x / rate_;
    }
    std::string spec_string() const override {
        std::ostringstream os;
        os << "gamma:shape=" << shape_ << ",rate=" << rate_;
        return os.str();
    }

private:
    double shape_;
    double rate_;
    double log_norm_;
    std::string name_;
};

class UniformLaw final : public PassageLaw {
public:
    UniformLaw(double a, double b) : a_(a), b_(b), name_("uniform") {
        if (!(a >= 0.0)) throw ConfigError("uniform law: a must be >= 0");
        if (!(b > a)) throw ConfigError("uniform law: b must exceed a");
    }
    const std::string& name() const override { return name_; }
    Support support() const override { return {a_, b_}; }
    double density(double y) const override {
        return (y < a_ || y > b_) ? 0.0 : 1.0 / (b_ - a_);
    }
    double cdf(double y) const override {
        if (y <= a_) return 0.0;
        if (y >= b_) return 1.0;
        return (y - a_) / (b_ - a_);
    }
    double quantile(double p) const override { return a_ + p * (b_ - a_); }
    void quantile_many(std::span<const double> u, std::span<double> out) const override {
        const double w = b_ - a_;
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = a_ + u[i] * w;
    }
    std::string spec_string() const override {
        std::ostringstream os;
        os << "uniform:a=" << a_ << ",b=" << b_;
        return os.str();
    }

private:
    double a_;
    double b_;
    std::string name_;
};

class WeibullLaw final : public PassageLaw {
public:
    WeibullLaw(double shape, double scale) : shape_(shape), scale_(scale), name_("weibull") {
        if (!(shape >= 1.0)) throw ConfigError("weibull law: shape must be >= 1");
        if (!(scale > 0.0)) throw ConfigError("weibull law: scale must be positive");
    }
    const std::string& name() const override { return name_; }
    Support support() const override { return {0.0, std::numeric_limits<double>::infinity()}; }
    double density(double y) const override {
        if (y < 0.0) return 0.0;
        if (y == 0.0) return shape_ == 1.0 ? 1.0 / scale_ : 0.0;
        const double t = y / scale_;
        return (shape_ / scale_) * std::pow(t, shape_ - 1.0) * std::exp(-std::pow(t, shape_));
    }
    double cdf(double y) const override {
        return y <= 0.0 ? 0.0 : -std::expm1(-std::pow(y / scale_, shape_));
    }
    double sf(double y) const override {
        return y <= 0.0 ? 1.0 : std::exp(-std::pow(y / scale_, shape_));
    }
    double quantile(double p) const override {
        return scale_ * std::pow(-std::log1p(-p), 1.0 / shape_);
    }
    void quantile_many(std::span<const double> u, std::span<double> out) const override {
        const double inv_shape = 1.0 / shape_;
        for (std::size_t i = 0; i < u.size(); ++i)
            out[i] = scale_ * std::pow(-std::log1p(-u[i]), inv_shape);
    }
    std::string spec_string() const override {
        std::ostringstream os;
        os << "weibull:shape=" << shape_ << ",scale=" << scale_;
        return os.str();
    }

private:
    double shape_;
    double scale_;
    std::string name_;
};

class ConstantLaw final : public PassageLaw {
public:
    explicit ConstantLaw(double value) : value_(value), name_("constant") {
        if (!(value >= 0.0)) throw ConfigError("const law: value must be >= 0");
    }
    const std::string& name() const override { return name_; }
    Support support() const override { return {value_, value_}; }
    bool has_density() const override { return false; }
    double density(double) const override { return 0.0; }
    double cdf(double y) const override { return y >= value_ ? 1.0 : 0.0; }
    double quantile(double) const override { return value_; }
    void quantile_many(std::span<const double> u, std::span<double> out) const override {
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = value_;
    }
    std::string spec_string() const override {
        std::ostringstream os;
        os << "const:value=" << value_;
        return os.str();
    }

private:
    double value_;
    std::string name_;
};

std::map<std::string, double> parse_kv_params(std::string_view text) {
    std::map<std::string, double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string_view::npos) comma = text.size();
        const std::string_view item = text.substr(pos, comma - pos);
        const std::size_t eq = item.find('=');
        if (eq == std::string_view::npos || eq == 0)
            throw ConfigError("law spec: malformed parameter '" + std::string(item) + "'");
        const std::string key{item.substr(0, eq)};
        const std::string val{item.substr(eq + 1)};
        try {
            std::size_t used = 0;
            out[key] = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
        } catch (const std::exception&) {
            throw ConfigError("law spec: parameter '" + key + "' has non-numeric value '" + val + "'");
        }
        pos = comma + 1;
    }
    return out;
}

double take_param(std::map<std::string, double>& params, const std::string& key,
                  const char* law) {
    auto it = params.find(key);
    if (it == params.end())
        throw ConfigError(std::string("law spec: ") + law + " requires parameter '" + key + "'");
    const double v = it->second;
    params.erase(it);
    return v;
}

double take_param_or(std::map<std::string, double>& params, const std::string& key,
                     double fallback) {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    const double v = it->second;
    params.erase(it);
    return v;
}

}  // namespace

LawPtr make_exponential(double rate) { return std::make_shared<ExponentialLaw>(rate); }
LawPtr make_gamma(double shape, double rate) { return std::make_shared<GammaLaw>(shape, rate); }
LawPtr make_uniform(double a, double b) { return std::make_shared<UniformLaw>(a, b); }
LawPtr make_weibull(double shape, double scale) { return std::make_shared<WeibullLaw>(shape, scale); }
LawPtr make_constant(double value) { return std::make_shared<ConstantLaw>(value); }

LawPtr parse_law(std::string_view spec) {
    const std::size_t colon = spec.find(':');
    const std::string family{colon == std::string_view::npos ? spec : spec.substr(0, colon)};
    auto params = parse_kv_params(colon == std::string_view::npos ? std::string_view{}
                                                                  : spec.substr(colon + 1));
    LawPtr law;
    if (family == "exp") {
        law = make_exponential(take_param_or(params, "rate", 1.0));
    } else if (family == "gamma") {
        const double shape = take_param(params, "shape", "gamma");
        law = make_gamma(shape, take_param_or(params, "rate", 1.0));
    } else if (family == "uniform") {
        const double a = take_param_or(params, "a", 0.0);
        law = make_uniform(a, take_param_or(params, "b", 1.0));
    } else if (family == "weibull") {
        const double shape = take_param(params, "shape", "weibull");
        law = make_weibull(shape, take_param_or(params, "scale", 1.0));
    } else if (family == "const") {
        law = make_constant(take_param_or(params, "value", 1.0));
    } else {
        throw ConfigError("law spec: unknown family '" + family + "'");
    }
    if (!params.empty())
        throw ConfigError("law spec: unknown parameter '" + params.begin()->first + "'");
    return law;
}

double sample(const PassageLaw& law, double u) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("sample: variate must lie in (0,1)");
    return law.quantile(u);
}

}  // namespace fpp
