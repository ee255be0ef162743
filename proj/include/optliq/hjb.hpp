#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "optliq/impact.hpp"

namespace optliq {

// Uniform discretization of [0,T] x [0,S_max] x [0,Q_max].
struct SolverGrid {
    int n_t = 360;
    int n_s = 10;
    int n_q = 100;
    double horizon = 1.0;
    double s_max = 300.0;
    double q_max = 1.0;

    double dt() const { return horizon / n_t; }
    double ds() const { return s_max / n_s; }
    double dq() const { return q_max / n_q; }
};

void validate(const SolverGrid& grid);

// H[k][i][j] on the (t,s,q) grid, flattened.
struct ValueSurface {
    SolverGrid grid;
    double penalty = 0.0;  // magnitude P standing in for -infinity at t = T
    std::vector<double> h;  // (n_t+1) * (n_s+1) * (n_q+1)

    double at(int k, int i, int j) const {
        return h[(static_cast<std::size_t>(k) * (grid.n_s + 1) + i) * (grid.n_q + 1) + j];
    }
    double& at(int k, int i, int j) {
        return h[(static_cast<std::size_t>(k) * (grid.n_s + 1) + i) * (grid.n_q + 1) + j];
    }
};

// nu[k][j] at the reference (mid) price index, k = 0..n_t-1.
struct PolicySurface {
    SolverGrid grid;
    int price_index = 0;  // i at which the policy is recorded
    std::vector<double> nu;  // n_t * (n_q+1)

    double at(int k, int j) const {
        return nu[static_cast<std::size_t>(k) * (grid.n_q + 1) + j];
    }
    double& at(int k, int j) {
        return nu[static_cast<std::size_t>(k) * (grid.n_q + 1) + j];
    }
};

struct SolveOptions {
    double penalty = -1.0;      // < 0 means the default 1e6 * S_max * Q_max
    double tol_factor = 1e-8;   // tol_nu = tol_factor * (Q_max / dt)
    int max_iters = 100;
    bool full_policy = false;   // retain nu[k][i][j] for diagnostics
};

struct SolveResult {
    ValueSurface value;
    PolicySurface policy;
    // Diagnostic per-price policy, n_t * (n_s+1) * (n_q+1); empty unless requested.
    std::vector<double> full_policy;
    int worst_iterations = 0;  // max policy-iteration count over all rows

    double full_policy_at(int k, int i, int j) const {
        const auto& g = value.grid;
        return full_policy[(static_cast<std::size_t>(k) * (g.n_s + 1) + i) * (g.n_q + 1) + j];
    }
};

// Implicit directional scheme: central differences in s, backward in q,
// backward in t; each (k,j) row is a tridiagonal solve across i, with the
// trade rate obtained by policy iteration against the FOC.
SolveResult solve(const ProblemSpec& spec, const SolverGrid& grid,
                  const SolveOptions& options = {});

struct PolicyPathPoint {
    double t = 0.0;
    double nu = 0.0;
    double q = 0.0;
};
using PolicyPath = std::vector<PolicyPathPoint>;

// Forward-integrates q_{k+1} = q_k - nu(k, q_k) dt from q0, interpolating nu
// linearly in q between grid nodes.
PolicyPath extract_policy_path(const PolicySurface& policy, double q0);

enum class GridAxis { T, S, Q };

struct RefinementRecord {
    double spacing = 0.0;
    double error = 0.0;           // max |H_num - H_analytic| at t=0, base-grid nodes
    double estimated_order = 0.0; // NaN until enough levels exist
};

// Halves the spacing of one axis `refinements` times and reports the oracle
// error at each level together with the estimated convergence order of the
// scheme along that axis.
std::vector<RefinementRecord> convergence_study(const ProblemSpec& spec,
                                                const SolverGrid& base_grid,
                                                GridAxis axis, int refinements);

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t cells = 0;
};

// Chi-square goodness-of-fit statistic between the numeric policy and an
// analytic policy nu(t, q), over cells where the analytic rate exceeds epsilon.
ChiSquareResult compare_policies(const PolicySurface& numeric,
                                 const std::function<double(double, double)>& analytic,
                                 double epsilon);

// Upper critical value of chi-square at significance alpha (Wilson-Hilferty).
double chi_square_critical(std::size_t dof, double alpha = 0.05);

// Max over (k,j) of the spread of nu across interior price indices; requires a
// solve run with full_policy = true.
double price_independence_check(const SolveResult& result);

// CSV export: one row per node "k,i,j,h" / "k,j,nu" / "t,nu,q".
std::string value_surface_csv(const ValueSurface& surface);
std::string policy_surface_csv(const PolicySurface& policy);
std::string policy_path_csv(const PolicyPath& path);

}  // namespace optliq
