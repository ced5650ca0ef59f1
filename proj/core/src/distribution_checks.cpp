#include "fpp/distribution_checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fpp/errors.hpp"
#include "fpp/normal.hpp"
#include "fpp/numerics.hpp"

namespace fpp {

namespace {

constexpr double kContinuityJumpLimit = 0.25;  // of the grid density maximum
constexpr double kBoundedRatioLimit = 100.0;   // hazard max/min considered bounded
constexpr double kResidualLimit = 1.2;         // log-fit spread considered bounded

std::vector<double> geometric_grid(double lo, double hi, int count) {
    std::vector<double> grid(static_cast<std::size_t>(count));
    const double ratio = std::log(hi / lo) / (count - 1);
    for (int i = 0; i < count; ++i)
        grid[static_cast<std::size_t>(i)] = lo * std::exp(ratio * i);
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

}  // namespace

double upsilon(const PassageLaw& law, double y) {
    if (!law.has_density()) throw DomainError("upsilon: law has no density");
    const Support sup = law.support();
    if (!(y > sup.lower) || (sup.upper_finite() && !(y < sup.upper)))
        throw DomainError("upsilon: y outside support interior");
    const double f = law.density(y);
    if (!(f > 0.0)) throw DomainError("upsilon: density vanishes at y");
    // Work through the smaller tail so Phi^{-1} keeps precision when F is
    // close to 1.
    const double p = law.cdf(y);
    const double q = law.sf(y);
    if (!(p > 0.0) || !(q > 0.0))
        throw DomainError("upsilon: cdf saturates at y");
    const double z = p <= q ? norm_quantile(p) : -norm_quantile(q);
    return norm_pdf(z) / f;
}

NearlyGammaReport nearly_gamma_scan(const PassageLaw& law, const GridSpec& spec,
                                    double a_max) {
    if (!law.has_density())
        throw DomainError("nearly_gamma_scan: law has no density");
    if (spec.count < 2) throw ConfigError("nearly_gamma_scan: grid count must be >= 2");
    const Support sup = law.support();
    if (!(spec.y_min > sup.lower) || !(spec.y_max > spec.y_min) ||
        (sup.upper_finite() && !(spec.y_max < sup.upper)))
        throw ConfigError("nearly_gamma_scan: grid must lie inside the support interior");

    NearlyGammaReport report;
    report.a_max = a_max;

    // Geometric spacing concentrates points near the lower endpoint, where
    // the sqrt(y) envelope is most strained.
    const std::vector<double> ys = geometric_grid(spec.y_min, spec.y_max, spec.count);

    std::vector<double> densities(ys.size(), 0.0);
    std::vector<bool> positive(ys.size(), false);
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double y = ys[i];
        try {
            const double u = upsilon(law, y);
            report.grid.emplace_back(y, u);
            report.a_fit = std::max(report.a_fit, u / std::sqrt(y));
            positive[i] = true;
        } catch (const DomainError& err) {
            std::ostringstream os;
            os << "y=" << y << ": " << err.what();
            report.point_errors.push_back(os.str());
        }
        densities[i] = law.density(y);
    }

    // A zero-density stretch between positive cells marks a support gap.
    std::size_t first_pos = ys.size(), last_pos = 0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (positive[i]) {
            first_pos = std::min(first_pos, i);
            last_pos = i;
        }
    }
    if (first_pos == ys.size()) {
        report.interval_connected = false;
        report.continuity_flag = false;
        report.pass = false;
        return report;
    }
    for (std::size_t i = first_pos; i <= last_pos; ++i) {
        if (!positive[i]) {
            report.interval_connected = false;
            break;
        }
    }

    double f_max = 0.0;
    for (std::size_t i = first_pos; i <= last_pos; ++i)
        f_max = std::max(f_max, densities[i]);
    double max_jump = 0.0;
    for (std::size_t i = first_pos; i < last_pos; ++i)
        max_jump = std::max(max_jump, std::fabs(densities[i + 1] - densities[i]));
    report.continuity_flag = f_max > 0.0 && max_jump <= kContinuityJumpLimit * f_max;

    report.pass = report.interval_connected && report.continuity_flag &&
                  report.a_fit <= a_max;
    return report;
}

namespace {

// Exponent of f near an endpoint: slope of log f(offset) against log(offset).
struct ExponentFit {
    double exponent;
    double spread;
    bool ok;
};

ExponentFit fit_endpoint_exponent(const PassageLaw& law, double endpoint, int side,
                                  const ProbeWindow& window) {
    std::vector<double> lx, ly;
    const std::vector<double> ts = geometric_grid(window.t_lo, window.t_hi, window.points);
    for (double t : ts) {
        const double x = endpoint + side * t;
        const double f = law.density(x);
        if (!(f > 0.0) || !std::isfinite(f)) return {0.0, 0.0, false};
        lx.push_back(std::log(t));
        ly.push_back(std::log(f));
    }
    const LineFit fit = fit_line(lx, ly);
    return {fit.slope, fit.max_abs_residual, true};
}

// Survival integral int_x^inf f by quadrature on [x, x_hi] plus an
// exponential-tail extension fitted at x_hi.
std::optional<double> tail_integral(const PassageLaw& law, double x, double x_hi) {
    auto f = [&law](double y) { return law.density(y); };
    const QuadResult quad = adaptive_simpson(f, x, x_hi, 1e-12);
    if (!quad.converged) return std::nullopt;
    const double f_hi = law.density(x_hi);
    const double f_hi2 = law.density(x_hi * 1.05);
    double tail = 0.0;
    if (f_hi > 0.0 && f_hi2 > 0.0 && f_hi2 < f_hi) {
        const double lambda = std::log(f_hi / f_hi2) / (0.05 * x_hi);
        if (lambda > 0.0) tail = f_hi / lambda;
    }
    return quad.value + tail;
}

}  // namespace

SufficiencyReport sufficient_condition_check(const PassageLaw& law,
                                             const ProbeWindow& window) {
    if (!law.has_density())
        throw DomainError("sufficient_condition_check: law has no density");
    SufficiencyReport report;
    const Support sup = law.support();

    const ExponentFit lower = fit_endpoint_exponent(law, sup.lower, +1, window);
    if (!lower.ok) {
        report.diagnostic = "density not evaluable near the lower endpoint";
        return report;
    }
    report.alpha_hat = lower.exponent;
    report.alpha_spread = lower.spread;
    if (!(lower.exponent > -1.0) || lower.spread > kResidualLimit) {
        report.diagnostic = "lower endpoint exponent condition failed";
        return report;
    }

    if (sup.upper_finite()) {
        const ExponentFit upper = fit_endpoint_exponent(law, sup.upper, -1, window);
        if (!upper.ok) {
            report.diagnostic = "density not evaluable near the upper endpoint";
            return report;
        }
        report.beta_hat = upper.exponent;
        if (upper.exponent > -1.0 && upper.spread <= kResidualLimit) {
            report.verdict = EndpointCondition::condition_i;
            report.diagnostic = "finite endpoint exponents certified";
        } else {
            report.diagnostic = "upper endpoint exponent condition failed";
        }
        return report;
    }

    // b = infinity: hazard ratio f(x) / int_x^inf f on a quantile window.
    const double x_lo = law.quantile(0.90);
    const double x_hi_probe = law.quantile(0.995);
    const double x_far = law.quantile(1.0 - 1e-9);
    double h_min = std::numeric_limits<double>::infinity();
    double h_max = 0.0;
    const std::vector<double> xs = geometric_grid(std::max(x_lo, 1e-12), x_hi_probe, 8);
    for (double x : xs) {
        const std::optional<double> surv = tail_integral(law, x, x_far);
        if (!surv || !(*surv > 0.0)) {
            report.diagnostic = "tail quadrature did not converge";
            return report;
        }
        const double hazard = law.density(x) / *surv;
        h_min = std::min(h_min, hazard);
        h_max = std::max(h_max, hazard);
    }
    report.hazard_min = h_min;
    report.hazard_max = h_max;
    if (h_min > 0.0 && h_max / h_min <= kBoundedRatioLimit) {
        report.verdict = EndpointCondition::condition_ii;
        report.diagnostic = "hazard ratio bounded on the probe window";
    } else {
        report.diagnostic = "hazard ratio unbounded on the probe window";
    }
    return report;
}

ExpMomentReport exp_moment_check(const PassageLaw& law, double t, double tail_cut) {
    if (!(t > 0.0)) throw ConfigError("exp_moment_check: t must be positive");
    if (!law.has_density())
        throw DomainError("exp_moment_check: law has no density");
    ExpMomentReport report;
    const Support sup = law.support();
    auto integrand = [&](double y) { return std::exp(t * y) * law.density(y); };

    if (sup.upper_finite()) {
        const QuadResult quad = adaptive_simpson(integrand, sup.lower, sup.upper, 1e-12);
        report.finite = quad.converged;
        report.value = quad.value;
        report.note = quad.converged ? "finite support" : "quadrature failed";
        return report;
    }

    const double cut = std::max(tail_cut, sup.lower + 1.0);
    const double f_cut = law.density(cut);
    const double f_cut2 = law.density(cut * 1.1);
    double lambda = 0.0;
    if (f_cut > 0.0 && f_cut2 > 0.0 && f_cut2 < f_cut)
        lambda = std::log(f_cut / f_cut2) / (0.1 * cut);
    else if (f_cut == 0.0)
        lambda = std::numeric_limits<double>::infinity();  // density already dead

    if (!(lambda > t)) {
        report.finite = false;
        report.note = "fitted tail decay rate does not dominate t";
        const QuadResult quad = adaptive_simpson(integrand, sup.lower, cut, 1e-10);
        report.value = quad.value;
        return report;
    }

    const QuadResult quad = adaptive_simpson(integrand, sup.lower, cut, 1e-12);
    if (!quad.converged) {
        report.finite = false;
        report.note = "quadrature failed below the tail cut";
        return report;
    }
    double tail = 0.0;
    if (std::isfinite(lambda) && f_cut > 0.0)
        tail = f_cut * std::exp(t * cut) / (lambda - t);
    report.finite = true;
    report.value = quad.value + tail;
    report.tail_bound = tail;
    report.note = "tail bounded by fitted exponential decay";
    return report;
}

}  // namespace fpp
