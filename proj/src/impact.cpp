#include "optliq/impact.hpp"

#include <cmath>
#include <limits>

namespace optliq {

void validate(const ProblemSpec& spec) {
    if (!(spec.sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
    if (!(spec.delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
    if (!(spec.horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
    if (!(spec.upsilon > 0.0)) throw std::invalid_argument("upsilon must be > 0");
    if (spec.tpi.kind == ImpactKind::Power && spec.tpi.p1 <= 0.0)
        throw std::invalid_argument("tpi power exponent must be > 0");
    if (spec.ppi.kind == ImpactKind::Power && spec.ppi.p1 <= 0.0)
        throw std::invalid_argument("ppi power exponent must be > 0");
}

double eval(const ImpactForm& form, double nu) {
    if (!(nu >= 0.0)) throw std::domain_error("impact eval requires nu >= 0");
    switch (form.kind) {
        case ImpactKind::Linear:
            return form.p0 * nu + form.p1;
        case ImpactKind::Quadratic:
            return form.p0 * nu * nu + form.p1 * nu + form.p2;
        case ImpactKind::Power:
            return form.p0 * std::pow(nu, form.p1) + form.p2;
    }
    throw std::logic_error("unreachable impact kind");
}

double deriv(const ImpactForm& form, double nu) {
    if (!(nu >= 0.0)) throw std::domain_error("impact deriv requires nu >= 0");
    switch (form.kind) {
        case ImpactKind::Linear:
            return form.p0;
        case ImpactKind::Quadratic:
            return 2.0 * form.p0 * nu + form.p1;
        case ImpactKind::Power:
            return form.p0 * form.p1 * std::pow(nu, form.p1 - 1.0);
    }
    throw std::logic_error("unreachable impact kind");
}

ImpactForm to_solver_form(const ImpactForm& form) {
    ImpactForm out = form;
    out.p0 = -out.p0;
    if (form.kind == ImpactKind::Power) {
        // exponent p1 stays put
        out.p2 = -out.p2;
    } else {
        out.p1 = -out.p1;
        out.p2 = -out.p2;
    }
    return out;
}

double hamiltonian_integrand(const ProblemSpec& spec, double dH_ds, double dH_dq,
                             double S, double nu) {
    return -eval(spec.ppi, nu) * dH_ds - nu * dH_dq +
           (S - 0.5 * spec.delta - eval(spec.tpi, nu)) * nu;
}

namespace {

// FOC residual: dL/dnu. Positive means increasing nu raises the Hamiltonian.
double foc_residual(const ProblemSpec& spec, double dH_ds, double dH_dq,
                    double S, double nu) {
    return -deriv(spec.ppi, nu) * dH_ds - dH_dq + S - 0.5 * spec.delta -
           (deriv(spec.tpi, nu) * nu + eval(spec.tpi, nu));
}

double pick_boundary(const ProblemSpec& spec, double dH_ds, double dH_dq,
                     double S, double nu_max) {
    const double at_zero = hamiltonian_integrand(spec, dH_ds, dH_dq, S, 0.0);
    const double at_max = hamiltonian_integrand(spec, dH_ds, dH_dq, S, nu_max);
    return at_max > at_zero ? nu_max : 0.0;
}

// Global argmax when the running cost is not concave (power exponent < 1 makes
// the Hamiltonian bimodal for dH_ds > 0: a local max pinned at nu = 0 plus an
// interior one). Scan the residual on a log grid, refine every +/- crossing,
// and compare all candidates by Hamiltonian value.
double pick_global(const ProblemSpec& spec, double dH_ds, double dH_dq,
                   double S, double nu_max, double lo0, double bisect_tol) {
    constexpr int kScan = 128;
    const double ratio = std::pow(nu_max / lo0, 1.0 / kScan);
    double best = 0.0;
    double best_val = hamiltonian_integrand(spec, dH_ds, dH_dq, S, 0.0);
    double left = lo0;
    double fleft = foc_residual(spec, dH_ds, dH_dq, S, left);
    for (int n = 1; n <= kScan; ++n) {
        const double right = n == kScan ? nu_max : lo0 * std::pow(ratio, n);
        const double fright = foc_residual(spec, dH_ds, dH_dq, S, right);
        if (fleft > 0.0 && fright <= 0.0) {
            double lo = left, hi = right;
            while (hi - lo > bisect_tol) {
                const double mid = 0.5 * (lo + hi);
                if (foc_residual(spec, dH_ds, dH_dq, S, mid) >= 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            const double cand = 0.5 * (lo + hi);
            const double val = hamiltonian_integrand(spec, dH_ds, dH_dq, S, cand);
            if (val > best_val) {
                best_val = val;
                best = cand;
            }
        }
        left = right;
        fleft = fright;
    }
    const double at_max = hamiltonian_integrand(spec, dH_ds, dH_dq, S, nu_max);
    if (at_max > best_val) return nu_max;
    return best;
}

}  // namespace

double foc_optimal_rate(const ProblemSpec& spec, double dH_ds, double dH_dq,
                        double S, double nu_max) {
    if (!(nu_max > 0.0)) throw std::domain_error("nu_max must be > 0");
    if (!std::isfinite(dH_ds) || !std::isfinite(dH_dq))
        throw std::domain_error("non-finite value-function gradients");

    const bool tpi_linear = spec.tpi.kind == ImpactKind::Linear;
    if (tpi_linear && spec.ppi.kind != ImpactKind::Power) {
        // f = a1*nu + a2, g linear (b1*nu + b2) or quadratic (c1*nu^2 + c2*nu).
        const double a1 = spec.tpi.p0;
        const double a2 = spec.tpi.p1;
        double num = S - 0.5 * spec.delta - a2 - dH_dq;
        double den;
        if (spec.ppi.kind == ImpactKind::Linear) {
            num -= spec.ppi.p0 * dH_ds;
            den = 2.0 * a1;
        } else {
            num -= spec.ppi.p1 * dH_ds;
            den = 2.0 * (spec.ppi.p0 * dH_ds + a1);
        }
        if (den > 0.0) {
            const double root = num / den;
            if (root <= 0.0) return 0.0;
            if (root >= nu_max) return nu_max;
            return root;
        }
        return pick_boundary(spec, dH_ds, dH_dq, S, nu_max);
    }

    // General case: bracketed bisection. Power derivatives blow up at nu = 0
    // for exponents < 1, so the left bracket starts a hair inside.
    const double lo0 = nu_max * 1e-14;
    double lo = lo0, hi = nu_max;
    double flo = foc_residual(spec, dH_ds, dH_dq, S, lo);
    double fhi = foc_residual(spec, dH_ds, dH_dq, S, hi);
    const double tol = 1e-10;
    if (!(flo > 0.0) || !(fhi < 0.0)) {
        // No sign change with the expected orientation: the Hamiltonian may
        // still peak in the interior (it is bimodal for power exponents < 1),
        // so fall back to a global candidate search.
        return pick_global(spec, dH_ds, dH_dq, S, nu_max, lo0, tol);
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = foc_residual(spec, dH_ds, dH_dq, S, mid);
        if (fmid >= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace optliq
