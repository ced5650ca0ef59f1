#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fpp/passage_law.hpp"

namespace fpp {

// The transform Upsilon(y) = phi(Phi^{-1}(F(y))) / f(y). Throws DomainError
// for y outside the support interior or where the density vanishes.
double upsilon(const PassageLaw& law, double y);

struct GridSpec {
    double y_min = 0.0;
    double y_max = 0.0;
    int count = 0;
};

struct NearlyGammaReport {
    bool interval_connected = true;
    bool continuity_flag = true;
    double a_fit = 0.0;          // max over the grid of Upsilon(y)/sqrt(y)
    double a_max = 0.0;
    bool pass = false;
    std::vector<std::pair<double, double>> grid;  // (y, Upsilon(y)) at valid points
    std::vector<std::string> point_errors;
    std::string to_json() const;
};

// Scans Upsilon/sqrt(y) on a geometric grid inside the support. Per-point
// domain errors are recorded, not fatal. Laws without a density are rejected.
NearlyGammaReport nearly_gamma_scan(const PassageLaw& law, const GridSpec& grid,
                                    double a_max);

enum class EndpointCondition { condition_i, condition_ii, inconclusive };

struct ProbeWindow {
    double t_lo = 1e-4;   // smallest offset from the endpoint
    double t_hi = 1e-2;   // largest offset
    int points = 12;
};

struct SufficiencyReport {
    EndpointCondition verdict = EndpointCondition::inconclusive;
    double alpha_hat = 0.0;             // lower endpoint exponent
    double alpha_spread = 0.0;          // max |log-fit residual| at the lower end
    std::optional<double> beta_hat;     // set when the finite-b branch ran
    std::optional<double> hazard_min;   // set when the hazard branch ran
    std::optional<double> hazard_max;
    std::string diagnostic;
};

// Fits local endpoint exponents of the density and, for infinite upper
// endpoints, probes boundedness of the hazard ratio f(x) / int_x^inf f (tail
// integral by quadrature). Reports which sufficient condition certified.
SufficiencyReport sufficient_condition_check(const PassageLaw& law,
                                             const ProbeWindow& window = {});

struct ExpMomentReport {
    bool finite = false;
    double value = 0.0;       // quadrature plus fitted-tail estimate
    double tail_bound = 0.0;  // bound on the contribution beyond tail_cut
    std::string note;
};

// Quadrature of e^{t y} f(y) with an exponential tail-decay fit beyond
// tail_cut; finite only when the fitted tail provably converges.
ExpMomentReport exp_moment_check(const PassageLaw& law, double t, double tail_cut);

}  // namespace fpp
