#pragma once

#include <functional>
#include <span>

namespace fpp {

struct QuadResult {
    double value = 0.0;
    bool converged = false;
    long evaluations = 0;
};

// Adaptive Simpson quadrature on [a, b]. Non-finite integrand values mark the
// result as non-converged.
QuadResult adaptive_simpson(const std::function<double(double)>& f, double a,
                            double b, double tol, int max_depth = 48);

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double max_abs_residual = 0.0;
    double rms_residual = 0.0;
};

// Ordinary least squares fit y = intercept + slope * x. Requires >= 2 points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Mean and unbiased sample variance in index order (bit-stable reduction).
struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    double stddev = 0.0;
    double stderr_mean = 0.0;
    long long count = 0;
};
Moments compute_moments(std::span<const double> values);

}  // namespace fpp
