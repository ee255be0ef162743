#pragma once

#include <string>
#include <vector>

#include "optliq/hjb.hpp"
#include "optliq/lob.hpp"

namespace optliq {

// Liquidation schedule replayed against a snapshot series under the
// resilient-book assumption (each snapshot is taken as recorded; earlier
// trades leave no trace).
struct Strategy {
    enum class Kind { NumericPolicy, Naive, ParametricInventory };

    Kind kind = Kind::Naive;
    std::string label = "NS";
    PolicyPath path;        // NumericPolicy: solver path on the unit grid
    int naive_index = -1;   // Naive: execution step; -1 means the final step
    double d2 = 1.0;        // ParametricInventory: q(t) = Y(1 - (t/T)^d2)

    static Strategy naive(int index = -1, std::string label = "NS");
    static Strategy numeric(PolicyPath path, std::string label);
    static Strategy parametric(double d2, std::string label = "");
};

struct Fill {
    double t = 0.0;
    double shares = 0.0;
    double price = 0.0;    // volume-weighted execution price
    double revenue = 0.0;  // shares * price
};

struct ExecutionReport {
    std::string label;
    std::vector<Fill> fills;
    double total_shares = 0.0;
    double revenue = 0.0;
    double ratio_vs_ns = 1.0;       // set by compare_strategies / replay baseline
    std::size_t carried_steps = 0;  // steps whose demand exceeded snapshot depth
    double unfilled = 0.0;          // inventory left after the final step
    double upsilon = 0.0;
    double tau = 0.0;
    std::size_t steps = 0;
};

struct ReplayOptions {
    // insufficient depth: fill what is there and carry the remainder forward
    // (default), or fail hard
    bool fail_on_insufficient_depth = false;
    int naive_index = -1;  // override for Strategy::Kind::Naive with index -1
};

ExecutionReport replay(const Strategy& strategy,
                       const std::vector<LobSnapshot>& snapshots, double upsilon,
                       double tau, double horizon,
                       const ReplayOptions& options = {});

struct RankedStrategy {
    std::string label;
    double revenue = 0.0;
    double ratio_vs_ns = 0.0;
};

// Sorted best-first by ratio; ties broken by label.
std::vector<RankedStrategy> compare_strategies(
    const std::vector<ExecutionReport>& reports, const ExecutionReport& baseline);

// Cumulative-revenue ratio vs the naive strategy for each d2 in the list.
std::vector<std::pair<double, double>> inventory_sweep(
    const std::vector<double>& d2_values, const std::vector<LobSnapshot>& snapshots,
    double upsilon, double tau, double horizon, const ReplayOptions& options = {});

struct UpsilonSweepRow {
    double upsilon = 0.0;
    std::vector<RankedStrategy> ranking;
};

std::vector<UpsilonSweepRow> upsilon_sweep(const std::vector<Strategy>& strategies,
                                           const std::vector<LobSnapshot>& snapshots,
                                           const std::vector<double>& upsilon_values,
                                           double tau, double horizon,
                                           const ReplayOptions& options = {});

std::string ranking_csv(const std::vector<RankedStrategy>& ranking);

}  // namespace optliq
