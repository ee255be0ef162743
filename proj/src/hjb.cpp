#include "optliq/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "optliq/analytic.hpp"

namespace optliq {

void validate(const SolverGrid& grid) {
    if (grid.n_t < 2 || grid.n_s < 2 || grid.n_q < 2)
        throw std::invalid_argument("grid counts must be >= 2");
    if (!(grid.horizon > 0.0) || !(grid.s_max > 0.0) || !(grid.q_max > 0.0))
        throw std::invalid_argument("grid extents must be > 0");
}

SolveResult solve(const ProblemSpec& spec, const SolverGrid& grid,
                  const SolveOptions& options) {
    validate(spec);
    validate(grid);

    const int nt = grid.n_t, ns = grid.n_s, nq = grid.n_q;
    const double dt = grid.dt(), ds = grid.ds(), dq = grid.dq();
    const double penalty =
        options.penalty >= 0.0 ? options.penalty : 1e6 * grid.s_max * grid.q_max;

    SolveResult result;
    result.value.grid = grid;
    result.value.penalty = penalty;
    result.value.h.assign(static_cast<std::size_t>(nt + 1) * (ns + 1) * (nq + 1), 0.0);
    result.policy.grid = grid;
    result.policy.price_index = ns / 2;
    result.policy.nu.assign(static_cast<std::size_t>(nt) * (nq + 1), 0.0);
    if (options.full_policy)
        result.full_policy.assign(
            static_cast<std::size_t>(nt) * (ns + 1) * (nq + 1), 0.0);

    ValueSurface& H = result.value;
    // Boundaries: H(t,0,q)=0, H(t,S,0)=0, H(t,S_max,q)=S_max*q, H(T,.,q>0)=-P.
    for (int k = 0; k <= nt; ++k)
        for (int j = 0; j <= nq; ++j) H.at(k, ns, j) = grid.s_max * j * dq;
    for (int i = 1; i < ns; ++i)
        for (int j = 1; j <= nq; ++j) H.at(nt, i, j) = -penalty;

    const double alpha = spec.sigma * spec.sigma * dt / (2.0 * ds * ds);
    const double tol = options.tol_factor * (grid.q_max / dt);

    // Per-(j,i) policy of the previously completed time layer; warm start.
    std::vector<std::vector<double>> nu_prev(nq + 1, std::vector<double>(ns + 1, 0.0));

    std::vector<double> lo(ns - 1), di(ns - 1), up(ns - 1), rhs(ns - 1);
    std::vector<double> cp(ns - 1), dp(ns - 1);
    std::vector<double> hrow(ns + 1), nu(ns + 1), nu_new(ns + 1);

    for (int k = nt - 1; k >= 0; --k) {
        for (int j = 1; j <= nq; ++j) {
            const double cap = j * dq / dt;
            if (k == nt - 1)
                std::fill(nu.begin(), nu.end(), cap);
            else
                nu = nu_prev[j];

            int iters = 0;
            for (int it = 0; it < options.max_iters; ++it) {
                iters = it + 1;
                // Row system: (1+2a+g_i) H_i - (a+b_i) H_{i-1} - (a-b_i) H_{i+1} = Z
                for (int i = 1; i < ns; ++i) {
                    const double beta = eval(spec.ppi, nu[i]) * dt / (2.0 * ds);
                    const double gamma = nu[i] * dt / dq;
                    lo[i - 1] = -(alpha + beta);
                    di[i - 1] = 1.0 + 2.0 * alpha + gamma;
                    up[i - 1] = -(alpha - beta);
                    const double s_i = i * ds;
                    rhs[i - 1] = H.at(k + 1, i, j) + gamma * H.at(k, i, j - 1) +
                                 dt * (s_i - 0.5 * spec.delta - eval(spec.tpi, nu[i])) *
                                     nu[i];
                }
                rhs[0] -= lo[0] * H.at(k, 0, j);
                rhs[ns - 2] -= up[ns - 2] * H.at(k, ns, j);

                // Thomas elimination (rows are strictly diagonally dominant).
                const int n = ns - 1;
                cp[0] = up[0] / di[0];
                dp[0] = rhs[0] / di[0];
                for (int i = 1; i < n; ++i) {
                    const double m = di[i] - lo[i] * cp[i - 1];
                    cp[i] = up[i] / m;
                    dp[i] = (rhs[i] - lo[i] * dp[i - 1]) / m;
                }
                hrow[ns - 1] = dp[n - 1];
                for (int i = n - 2; i >= 0; --i)
                    hrow[i + 1] = dp[i] - cp[i] * hrow[i + 2];
                hrow[0] = H.at(k, 0, j);
                hrow[ns] = H.at(k, ns, j);

                // FOC update: dH/ds central on the current iterate, dH/dq
                // backward against the already-final row j-1.
                double dmax = 0.0;
                for (int i = 1; i < ns; ++i) {
                    const double hs = (hrow[i + 1] - hrow[i - 1]) / (2.0 * ds);
                    const double hq = (hrow[i] - H.at(k, i, j - 1)) / dq;
                    nu_new[i] = foc_optimal_rate(spec, hs, hq, i * ds, cap);
                }
                nu_new[0] = nu_new[1];
                nu_new[ns] = nu_new[ns - 1];
                for (int i = 0; i <= ns; ++i) {
                    dmax = std::max(dmax, std::abs(nu_new[i] - nu[i]));
                    nu[i] = nu_new[i];
                }
                if (dmax < tol) break;
                if (it == options.max_iters - 1)
                    throw std::runtime_error(
                        "policy iteration failed to converge at layer k=" +
                        std::to_string(k) + ", j=" + std::to_string(j) +
                        " (last update " + std::to_string(dmax) + ")");
            }
            result.worst_iterations = std::max(result.worst_iterations, iters);

            for (int i = 1; i < ns; ++i) {
                if (!std::isfinite(hrow[i]))
                    throw std::runtime_error("non-finite value surface entry");
                H.at(k, i, j) = hrow[i];
            }
            nu_prev[j] = nu;
            result.policy.at(k, j) = nu[result.policy.price_index];
            if (options.full_policy)
                for (int i = 0; i <= ns; ++i)
                    result.full_policy[(static_cast<std::size_t>(k) * (ns + 1) + i) *
                                           (nq + 1) +
                                       j] = nu[i];
        }
        result.policy.at(k, 0) = 0.0;
    }
    return result;
}

PolicyPath extract_policy_path(const PolicySurface& policy, double q0) {
    const SolverGrid& grid = policy.grid;
    if (!(q0 > 0.0) || q0 > grid.q_max)
        throw std::domain_error("q0 must lie in (0, Q_max]");

    const double dt = grid.dt(), dq = grid.dq();
    PolicyPath path;
    path.reserve(grid.n_t + 1);
    double q = q0;
    for (int k = 0; k < grid.n_t; ++k) {
        // linear interpolation of nu in q
        double x = q / dq;
        if (x < 0.0) x = 0.0;
        if (x > grid.n_q) x = grid.n_q;
        const int j0 = std::min(static_cast<int>(x), grid.n_q - 1);
        const double w = x - j0;
        double rate = (1.0 - w) * policy.at(k, j0) + w * policy.at(k, j0 + 1);
        if (rate < 0.0) rate = 0.0;
        const double cap = q / dt;  // never oversell
        if (rate >= cap) {
            // capped step liquidates the remaining inventory exactly
            path.push_back({k * dt, cap, q});
            q = 0.0;
        } else {
            path.push_back({k * dt, rate, q});
            q -= rate * dt;
            if (q < 0.0) q = 0.0;
        }
    }
    path.push_back({grid.horizon, 0.0, q});
    return path;
}

std::vector<RefinementRecord> convergence_study(const ProblemSpec& spec,
                                                const SolverGrid& base_grid,
                                                GridAxis axis, int refinements) {
    if (!has_analytic_solution(spec))
        throw std::invalid_argument(
            "convergence_study requires a spec with an analytic oracle");
    if (refinements < 1) throw std::invalid_argument("refinements must be >= 1");

    std::vector<RefinementRecord> records;
    // Oracle-error field at t=0 restricted to base-grid interior nodes,
    // kept per level so the scheme order can be read off the successive
    // error differences (the part of the error the refined axis controls).
    std::vector<std::vector<double>> fields;
    std::vector<double> diff_norms;

    for (int level = 0; level <= refinements; ++level) {
        SolverGrid grid = base_grid;
        const int factor = 1 << level;
        switch (axis) {
            case GridAxis::T: grid.n_t *= factor; break;
            case GridAxis::S: grid.n_s *= factor; break;
            case GridAxis::Q: grid.n_q *= factor; break;
        }
        const SolveResult result = solve(spec, grid);

        const int si = grid.n_s / base_grid.n_s;
        const int sj = grid.n_q / base_grid.n_q;
        std::vector<double> field;
        double max_err = 0.0;
        for (int i = 1; i < base_grid.n_s; ++i)
            for (int j = 1; j <= base_grid.n_q; ++j) {
                const double s = i * base_grid.ds();
                const double q = j * base_grid.dq();
                const double err =
                    result.value.at(0, i * si, j * sj) - analytic_value(0.0, s, q, spec);
                field.push_back(err);
                max_err = std::max(max_err, std::abs(err));
            }

        RefinementRecord rec;
        switch (axis) {
            case GridAxis::T: rec.spacing = grid.dt(); break;
            case GridAxis::S: rec.spacing = grid.ds(); break;
            case GridAxis::Q: rec.spacing = grid.dq(); break;
        }
        rec.error = max_err;
        rec.estimated_order = std::numeric_limits<double>::quiet_NaN();

        if (!fields.empty()) {
            const std::vector<double>& prev = fields.back();
            double d = 0.0;
            for (std::size_t m = 0; m < field.size(); ++m)
                d = std::max(d, std::abs(field[m] - prev[m]));
            diff_norms.push_back(d);
            if (diff_norms.size() >= 2) {
                const double prev_d = diff_norms[diff_norms.size() - 2];
                rec.estimated_order = std::log2(prev_d / d);
            }
        }
        fields.push_back(std::move(field));
        records.push_back(rec);
    }
    return records;
}

ChiSquareResult compare_policies(const PolicySurface& numeric,
                                 const std::function<double(double, double)>& analytic,
                                 double epsilon) {
    const SolverGrid& grid = numeric.grid;
    ChiSquareResult out;
    for (int k = 0; k < grid.n_t; ++k)
        for (int j = 0; j <= grid.n_q; ++j) {
            const double ana = analytic(k * grid.dt(), j * grid.dq());
            if (!(ana > epsilon)) continue;
            const double d = numeric.at(k, j) - ana;
            out.statistic += d * d / ana;
            ++out.cells;
        }
    if (out.cells == 0)
        throw std::domain_error("compare_policies: no cells above the rate floor");
    return out;
}

namespace {

// Acklam's rational approximation to the standard normal quantile.
double normal_quantile(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile requires 0<p<1");
    const double plow = 0.02425, phigh = 1.0 - plow;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > phigh) {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double chi_square_critical(std::size_t dof, double alpha) {
    if (dof == 0) throw std::domain_error("dof must be positive");
    // Wilson-Hilferty cube approximation, excellent for large dof.
    const double z = normal_quantile(1.0 - alpha);
    const double k = static_cast<double>(dof);
    const double u = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
    return k * u * u * u;
}

double price_independence_check(const SolveResult& result) {
    if (result.full_policy.empty())
        throw std::invalid_argument(
            "price_independence_check needs a solve with full_policy=true");
    const SolverGrid& grid = result.value.grid;
    double worst = 0.0;
    for (int k = 0; k < grid.n_t; ++k)
        for (int j = 1; j <= grid.n_q; ++j) {
            double mn = std::numeric_limits<double>::infinity(), mx = -mn;
            for (int i = 1; i < grid.n_s; ++i) {
                const double v = result.full_policy_at(k, i, j);
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
            worst = std::max(worst, mx - mn);
        }
    return worst;
}

namespace {

void append_num(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

}  // namespace

std::string value_surface_csv(const ValueSurface& surface) {
    std::string out = "k,i,j,h\n";
    const SolverGrid& g = surface.grid;
    for (int k = 0; k <= g.n_t; ++k)
        for (int i = 0; i <= g.n_s; ++i)
            for (int j = 0; j <= g.n_q; ++j) {
                out += std::to_string(k) + ',' + std::to_string(i) + ',' +
                       std::to_string(j) + ',';
                append_num(out, surface.at(k, i, j));
                out += '\n';
            }
    return out;
}

std::string policy_surface_csv(const PolicySurface& policy) {
    std::string out = "k,j,nu\n";
    const SolverGrid& g = policy.grid;
    for (int k = 0; k < g.n_t; ++k)
        for (int j = 0; j <= g.n_q; ++j) {
            out += std::to_string(k) + ',' + std::to_string(j) + ',';
            append_num(out, policy.at(k, j));
            out += '\n';
        }
    return out;
}

std::string policy_path_csv(const PolicyPath& path) {
    std::string out = "t,nu,q\n";
    for (const auto& p : path) {
        append_num(out, p.t);
        out += ',';
        append_num(out, p.nu);
        out += ',';
        append_num(out, p.q);
        out += '\n';
    }
    return out;
}

}  // namespace optliq
