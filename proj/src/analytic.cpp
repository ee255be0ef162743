#include "optliq/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace optliq {

namespace {

void require_before_horizon(double t, double T) {
    if (!(t < T)) throw std::domain_error("analytic forms are defined only for t < T");
}

void require_linear_tpi(const ProblemSpec& spec) {
    if (spec.tpi.kind != ImpactKind::Linear)
        throw std::domain_error("analytic solution requires linear TPI");
}

}  // namespace

double value_linear(double t, double S, double q, const ProblemSpec& spec) {
    require_before_horizon(t, spec.horizon);
    require_linear_tpi(spec);
    if (spec.ppi.kind != ImpactKind::Linear)
        throw std::domain_error("value_linear requires linear PPI");
    if (!(q >= 0.0)) throw std::domain_error("q must be >= 0");
    const double a1 = spec.tpi.p0, a2 = spec.tpi.p1, b1 = spec.ppi.p0;
    return q * (S - 0.5 * spec.delta - a2) -
           (0.5 * b1 + a1 / (spec.horizon - t)) * q * q;
}

double policy_linear(double t, double q, double T) {
    require_before_horizon(t, T);
    if (q == 0.0) return 0.0;
    return q / (T - t);
}

double value_quadratic(double t, double S, double q, const ProblemSpec& spec) {
    require_before_horizon(t, spec.horizon);
    require_linear_tpi(spec);
    if (spec.ppi.kind != ImpactKind::Quadratic)
        throw std::domain_error("value_quadratic requires quadratic PPI");
    const double c1 = spec.ppi.p0, c2 = spec.ppi.p1;
    if (c1 == 0.0) throw std::domain_error("value_quadratic requires c1 != 0");
    if (!(q >= 0.0)) throw std::domain_error("q must be >= 0");
    if (q == 0.0) return 0.0;
    const double a1 = spec.tpi.p0, a2 = spec.tpi.p1;
    const double x = c1 * q + a1;
    return q * (S - 0.5 * spec.delta - a2) - 0.5 * c2 * q * q -
           4.0 * x * x * x / (9.0 * c1 * c1 * (spec.horizon - t));
}

double policy_quadratic(double t, double q, const ProblemSpec& spec) {
    require_before_horizon(t, spec.horizon);
    const double c1 = spec.ppi.p0;
    if (c1 == 0.0) throw std::domain_error("policy_quadratic requires c1 != 0");
    if (q == 0.0) return 0.0;
    const double a1 = spec.tpi.p0;
    return 2.0 * (c1 * q + a1) / (3.0 * c1 * (spec.horizon - t));
}

bool has_analytic_solution(const ProblemSpec& spec) {
    if (spec.tpi.kind != ImpactKind::Linear) return false;
    if (spec.ppi.kind == ImpactKind::Linear) return true;
    return spec.ppi.kind == ImpactKind::Quadratic && spec.ppi.p0 != 0.0;
}

double analytic_value(double t, double S, double q, const ProblemSpec& spec) {
    if (spec.ppi.kind == ImpactKind::Linear) return value_linear(t, S, q, spec);
    return value_quadratic(t, S, q, spec);
}

double analytic_policy(double t, double q, const ProblemSpec& spec) {
    if (spec.ppi.kind == ImpactKind::Linear) return policy_linear(t, q, spec.horizon);
    return policy_quadratic(t, q, spec);
}

}  // namespace optliq
