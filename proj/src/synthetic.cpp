#include "optliq/synthetic.hpp"

#include <random>
#include <stdexcept>

namespace optliq {

namespace {

double level_quantity(const SyntheticBookConfig& config, int level) {
    if (config.growth_start >= 0 && level >= config.growth_start)
        return config.level_qty *
               (1.0 + config.growth * (level - config.growth_start + 1));
    return config.level_qty;
}

}  // namespace

LobSnapshot make_snapshot(const SyntheticBookConfig& config, int step) {
    if (config.depth < 1) throw std::invalid_argument("depth must be >= 1");
    if (!(config.tick > 0.0)) throw std::invalid_argument("tick must be > 0");
    if (!(config.level_qty > 0.0))
        throw std::invalid_argument("level_qty must be > 0");
    if (!(config.spread > 0.0)) throw std::invalid_argument("spread must be > 0");

    // per-(step,level) jitter derived from the seed, independent of call order
    std::mt19937_64 rng(config.seed * 0x9e3779b97f4a7c15ULL + step);
    std::uniform_real_distribution<double> jitter(-config.noise, config.noise);

    LobSnapshot snap;
    snap.ts = step * config.tau;
    const double bid0 = config.best_bid + config.drift_per_step * step;
    const double ask0 = bid0 + config.spread;
    snap.bids.reserve(config.depth);
    snap.asks.reserve(config.depth);
    for (int j = 0; j < config.depth; ++j) {
        double qty = level_quantity(config, j);
        if (config.noise > 0.0) qty *= 1.0 + jitter(rng);
        snap.bids.push_back({bid0 - j * config.tick, qty});
    }
    for (int j = 0; j < config.depth; ++j) {
        double qty = level_quantity(config, j);
        if (config.noise > 0.0) qty *= 1.0 + jitter(rng);
        snap.asks.push_back({ask0 + j * config.tick, qty});
    }
    return snap;
}

std::vector<LobSnapshot> make_series(const SyntheticBookConfig& config, int steps) {
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    std::vector<LobSnapshot> out;
    out.reserve(steps);
    for (int k = 0; k < steps; ++k) out.push_back(make_snapshot(config, k));
    return out;
}

}  // namespace optliq
