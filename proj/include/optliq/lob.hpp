#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace optliq {

struct LobLevel {
    double price = 0.0;
    double qty = 0.0;
};

// One timestamped two-sided book; bids strictly decreasing in price, asks
// strictly increasing.
struct LobSnapshot {
    double ts = 0.0;
    std::vector<LobLevel> bids;
    std::vector<LobLevel> asks;

    double best_bid() const { return bids.at(0).price; }
    double best_ask() const { return asks.at(0).price; }
    double mid() const { return 0.5 * (best_bid() + best_ask()); }
    double bid_depth() const {
        double total = 0.0;
        for (const auto& lvl : bids) total += lvl.qty;
        return total;
    }
};

void validate(const LobSnapshot& snapshot);

struct ParseError : std::runtime_error {
    std::size_t line;
    ParseError(std::size_t line_, const std::string& what_)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what_),
          line(line_) {}
};

struct InsufficientLiquidity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// JSON Lines, one snapshot per line:
//   {"ts": seconds, "bids": [[price,qty],...], "asks": [[price,qty],...]}
std::vector<LobSnapshot> parse_snapshots(const std::string& text);
std::vector<LobSnapshot> load_snapshots(const std::string& path);
std::string snapshots_to_jsonl(const std::vector<LobSnapshot>& snapshots);

// Volume-weighted price of selling Q against the bid side, walking the book
// best-first with a partial fill at the last level consumed.
double execution_price(const LobSnapshot& book, double Q);

// Temporary impact: execution price minus best bid (<= 0 for sells).
double measure_tpi(const LobSnapshot& book, double Q);

// Permanent impact: mid after removing Q from the bid side minus mid before
// (<= 0 for sells; sign matches the calibrated coefficient tables).
double measure_ppi(const LobSnapshot& book, double Q);

struct ImpactSample {
    double rate = 0.0;      // nu_i = Q_i / tau
    double volume = 0.0;    // Q_i
    double mean_tpi = 0.0;
    double mean_ppi = 0.0;
    std::size_t count = 0;    // snapshots measured
    std::size_t skipped = 0;  // snapshots lacking depth for this volume
};

// Equally spaced volume ladder Q_i = i * (nu_max * tau) / m, i = 1..m.
std::vector<double> volume_ladder(double nu_max, double tau, int m);

// Mean TPI/PPI per volume over all snapshots with sufficient depth. Volumes
// infeasible everywhere stay in the output with count = 0.
std::vector<ImpactSample> impact_curve(const std::vector<LobSnapshot>& snapshots,
                                       const std::vector<double>& volumes,
                                       double tau);

}  // namespace optliq
