#pragma once

#include <string>
#include <utility>
#include <vector>

#include "optliq/impact.hpp"
#include "optliq/lob.hpp"

namespace optliq {

enum class Scenario { Under, Over, Average };
enum class Target { TPI, PPI };

std::string to_string(Scenario scenario);
std::string to_string(Target target);

// One point of a measured impact curve: (rate nu_i, mean impact).
using ImpactPoint = std::pair<double, double>;

struct FitResult {
    ImpactForm form;          // raw calibrated signs (negative for sells)
    double sse = 0.0;         // total squared residuals over the curve
    double mean_sq_resid = 0.0;
    double std_sq_resid = 0.0;
    double r_squared = 0.0;
    Scenario scenario = Scenario::Average;
    Target target = Target::TPI;
};

FitResult fit_linear(const std::vector<ImpactPoint>& curve,
                     Scenario scenario = Scenario::Average,
                     Target target = Target::TPI);

// Least squares of r1*nu^r2 + r3: golden-section search over the exponent with
// closed-form inner least squares for (r1, r3).
FitResult fit_power(const std::vector<ImpactPoint>& curve,
                    Scenario scenario = Scenario::Average,
                    Target target = Target::TPI);

struct MetricComparison {
    double linear = 0.0;
    double power = 0.0;
    // -1: linear wins (smaller error / larger R^2), +1: power wins, 0: tie
    int winner = 0;
};

struct FitComparison {
    MetricComparison sse, mean_sq_resid, std_sq_resid, r_squared;
};

FitComparison compare_fits(const FitResult& linear, const FitResult& power);

// sqrt of summed squared log returns, no annualization.
double realized_volatility(const std::vector<double>& mid_prices);

// Mean best-ask minus best-bid over the series.
double average_spread(const std::vector<LobSnapshot>& snapshots);

ImpactForm to_solver_form(const FitResult& fit);

// Extracts (rate, mean impact) pairs for one target from a measured curve,
// dropping volumes that were infeasible on every snapshot.
std::vector<ImpactPoint> curve_points(const std::vector<ImpactSample>& curve,
                                      Target target);

}  // namespace optliq
