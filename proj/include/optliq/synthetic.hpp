#pragma once

#include <cstdint>

#include "optliq/lob.hpp"

namespace optliq {

// Deterministic synthetic book series used as a test/demo fixture in place of
// the recorded exchange data, which is not shipped.
//
// Level quantities are constant in time. Down the book they are flat for the
// first `growth_start` levels and then grow linearly with distance from the
// top (qty_j = level_qty * (1 + growth * (j - growth_start + 1))), a crude
// stand-in for the thickening tails of real books. growth = 0 gives a flat
// ladder. The best bid can drift linearly across the series, and a seeded
// uniform jitter can perturb quantities when noise > 0.
struct SyntheticBookConfig {
    double best_bid = 100.0;
    double tick = 0.01;
    double level_qty = 150.0;
    double spread = 0.1;
    int depth = 100;          // levels per side
    int growth_start = -1;    // -1: no growth section
    double growth = 0.0;      // per-level relative increment past growth_start
    double drift_per_step = 0.0;
    double tau = 5.0;         // snapshot spacing, seconds
    double noise = 0.0;       // relative qty jitter amplitude
    std::uint64_t seed = 0;
};

LobSnapshot make_snapshot(const SyntheticBookConfig& config, int step);
std::vector<LobSnapshot> make_series(const SyntheticBookConfig& config, int steps);

}  // namespace optliq
