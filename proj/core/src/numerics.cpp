#include "fpp/numerics.hpp"

#include <cmath>

#include "fpp/errors.hpp"

namespace fpp {

namespace {

constexpr long kMaxEvaluations = 400000;

struct SimpsonState {
    const std::function<double(double)>* f;
    long evaluations = 0;
    bool bad_value = false;

    double eval(double x) {
        ++evaluations;
        if (evaluations > kMaxEvaluations) {
            bad_value = true;
            return 0.0;
        }
        double v = (*f)(x);
        if (!std::isfinite(v)) bad_value = true;
        return v;
    }
};

double simpson_recurse(SimpsonState& st, double a, double b, double fa, double fm,
                       double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = st.eval(lm);
    const double frm = st.eval(rm);
    if (st.bad_value) return whole;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0) {
        st.bad_value = st.bad_value || std::fabs(delta) > tol * 15.0;
        return left + right + delta / 15.0;
    }
    if (std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_recurse(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

QuadResult adaptive_simpson(const std::function<double(double)>& f, double a,
                            double b, double tol, int max_depth) {
    QuadResult out;
    if (!(b > a)) {
        out.value = 0.0;
        out.converged = (b == a);
        return out;
    }
    SimpsonState st{&f};
    const double fa = st.eval(a);
    const double m = 0.5 * (a + b);
    const double fm = st.eval(m);
    const double fb = st.eval(b);
    if (st.bad_value) {
        out.converged = false;
        out.evaluations = st.evaluations;
        return out;
    }
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // Tolerance is relative to the integral's own magnitude once that exceeds 1.
    const double tol_eff = tol * std::max(1.0, std::fabs(whole));
    out.value = simpson_recurse(st, a, b, fa, fm, fb, whole, tol_eff, max_depth);
    out.converged = !st.bad_value && std::isfinite(out.value);
    out.evaluations = st.evaluations;
    return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ConfigError("fit_line: need at least two matched points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw ConfigError("fit_line: abscissae are all equal");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        fit.max_abs_residual = std::max(fit.max_abs_residual, std::fabs(r));
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}

Moments compute_moments(std::span<const double> values) {
    if (values.size() < 2) throw ConfigError("compute_moments: need >= 2 values");
    Moments m;
    m.count = static_cast<long long>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    m.mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.variance = ss / static_cast<double>(values.size() - 1);
    m.stddev = std::sqrt(m.variance);
    m.stderr_mean = m.stddev / std::sqrt(static_cast<double>(values.size()));
    return m;
}

}  // namespace fpp
