#pragma once

#include <stdexcept>
#include <string>

namespace optliq {

// Functional forms for temporary (f) and permanent (g) price impact.
// Linear:    p0*nu + p1                        (a1, a2) / (b1, b2)
// Quadratic: p0*nu^2 + p1*nu + p2              (c1, c2, c3)
// Power:     p0*nu^p1 + p2, exponent p1 > 0    (r1, r2, r3) / (p1, p2, p3)
enum class ImpactKind { Linear, Quadratic, Power };

struct ImpactForm {
    ImpactKind kind = ImpactKind::Linear;
    double p0 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;

    static ImpactForm linear(double slope, double intercept) {
        return {ImpactKind::Linear, slope, intercept, 0.0};
    }
    static ImpactForm quadratic(double c1, double c2, double c3 = 0.0) {
        return {ImpactKind::Quadratic, c1, c2, c3};
    }
    static ImpactForm power(double coeff, double exponent, double intercept) {
        if (exponent <= 0.0)
            throw std::invalid_argument("power impact requires exponent > 0");
        return {ImpactKind::Power, coeff, exponent, intercept};
    }
    static ImpactForm zero() { return linear(0.0, 0.0); }
};

// Full problem instance for the liquidation control problem.
struct ProblemSpec {
    ImpactForm tpi;        // f(nu), price offset paid instantaneously
    ImpactForm ppi;        // g(nu), lasting drift of the mid price
    double sigma = 0.0;    // volatility, price units per sqrt(time)
    double delta = 0.0;    // bid-ask spread
    double horizon = 1.0;  // T
    double upsilon = 1.0;  // initial inventory
};

void validate(const ProblemSpec& spec);

// f(nu) / g(nu) for nu >= 0.
double eval(const ImpactForm& form, double nu);
// d/dnu of the form, defined for nu > 0 (and at 0 where finite).
double deriv(const ImpactForm& form, double nu);

// Calibrated coefficients are negative for sells; the solver wants the
// additive inverse of everything except exponents. Involution.
ImpactForm to_solver_form(const ImpactForm& form);

// Hamiltonian integrand L(nu) = -g(nu)*dH_ds - nu*dH_dq + (S - delta/2 - f(nu))*nu.
double hamiltonian_integrand(const ProblemSpec& spec, double dH_ds, double dH_dq,
                             double S, double nu);

// Solves the first-order condition
//   -g'(nu)*dH_ds - dH_dq + S - delta/2 - (f'(nu)*nu + f(nu)) = 0
// for nu in [0, nu_max]; closed-form when f is linear and g is linear or
// quadratic, bracketed bisection otherwise. When no interior root exists the
// boundary value maximizing the Hamiltonian integrand is returned.
double foc_optimal_rate(const ProblemSpec& spec, double dH_ds, double dH_dq,
                        double S, double nu_max);

}  // namespace optliq
