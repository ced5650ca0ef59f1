#pragma once

namespace fpp {

// Standard normal density.
double norm_pdf(double x);

// Standard normal distribution function.
double norm_cdf(double x);

// Standard normal quantile (Wichura's PPND16). Absolute error below 1e-9 on
// [1e-8, 1 - 1e-8]. Throws DomainError for p outside (0, 1).
double norm_quantile(double p);

}  // namespace fpp
