#pragma once

#include "optliq/impact.hpp"

namespace optliq {

// Closed-form value functions and policies for linear TPI f(nu) = a1*nu + a2
// with linear PPI g(nu) = b1*nu or quadratic PPI g(nu) = c1*nu^2 + c2*nu
// (no independent term in g in either case). These are the verification
// oracles for the finite-difference solver.

// H(t,S,q) = q(S - delta/2 - a2) - (b1/2 + a1/(T-t)) q^2
double value_linear(double t, double S, double q, const ProblemSpec& spec);

// nu*(t) = q/(T-t); 0 at q = 0.
double policy_linear(double t, double q, double T);

// H(t,S,q) = q(S - delta/2 - a2) - (c2/2) q^2 - 4(c1 q + a1)^3 / (9 c1^2 (T-t)),
// piecewise 0 at q = 0.
double value_quadratic(double t, double S, double q, const ProblemSpec& spec);

// nu*(t) = 2(c1 q + a1) / (3 c1 (T-t)); 0 at q = 0 by convention (no
// admissible liquidation exists with empty inventory).
double policy_quadratic(double t, double q, const ProblemSpec& spec);

// True if the spec is in the family covered by the closed forms above.
bool has_analytic_solution(const ProblemSpec& spec);

// Dispatches on the PPI kind; used by convergence studies.
double analytic_value(double t, double S, double q, const ProblemSpec& spec);
double analytic_policy(double t, double q, const ProblemSpec& spec);

}  // namespace optliq
