#include "optliq/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace optliq {

Strategy Strategy::naive(int index, std::string label) {
    Strategy s;
    s.kind = Kind::Naive;
    s.naive_index = index;
    s.label = std::move(label);
    return s;
}

Strategy Strategy::numeric(PolicyPath path, std::string label) {
    if (path.size() < 2) throw std::invalid_argument("numeric strategy needs a path");
    Strategy s;
    s.kind = Kind::NumericPolicy;
    s.path = std::move(path);
    s.label = std::move(label);
    return s;
}

Strategy Strategy::parametric(double d2, std::string label) {
    if (!(d2 > 0.0)) throw std::domain_error("parametric inventory needs d2 > 0");
    Strategy s;
    s.kind = Kind::ParametricInventory;
    s.d2 = d2;
    if (label.empty()) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "PI(%g)", d2);
        label = buf;
    }
    s.label = std::move(label);
    return s;
}

namespace {

// Fraction of the inventory sold by the start of step k (k = 0..steps);
// exactly 0 at k=0 and exactly 1 at k=steps.
double sold_fraction(const Strategy& strategy, int k, int steps, int naive_index) {
    if (k <= 0) return 0.0;
    if (k >= steps) return 1.0;
    switch (strategy.kind) {
        case Strategy::Kind::Naive: {
            int idx = strategy.naive_index >= 0 ? strategy.naive_index : naive_index;
            if (idx < 0) idx = steps - 1;
            return k > idx ? 1.0 : 0.0;
        }
        case Strategy::Kind::ParametricInventory:
            return std::pow(static_cast<double>(k) / steps, strategy.d2);
        case Strategy::Kind::NumericPolicy: {
            // interpolate the path inventory at unit time u = k/steps
            const PolicyPath& path = strategy.path;
            const double q0 = path.front().q;
            const double t0 = path.front().t;
            const double span = path.back().t - t0;
            const double u = t0 + span * k / steps;
            auto it = std::lower_bound(
                path.begin(), path.end(), u,
                [](const PolicyPathPoint& p, double t) { return p.t < t; });
            if (it == path.begin()) return 0.0;
            if (it == path.end()) return 1.0;
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            const double w = hi.t > lo.t ? (u - lo.t) / (hi.t - lo.t) : 0.0;
            const double q = lo.q + w * (hi.q - lo.q);
            return (q0 - q) / q0;
        }
    }
    return 0.0;
}

}  // namespace

ExecutionReport replay(const Strategy& strategy,
                       const std::vector<LobSnapshot>& snapshots, double upsilon,
                       double tau, double horizon, const ReplayOptions& options) {
    if (!(upsilon > 0.0)) throw std::invalid_argument("upsilon must be > 0");
    if (!(tau > 0.0) || !(horizon > 0.0))
        throw std::invalid_argument("tau and horizon must be > 0");
    const int steps = static_cast<int>(std::llround(horizon / tau));
    if (steps < 1) throw std::invalid_argument("horizon shorter than one interval");
    if (snapshots.size() < static_cast<std::size_t>(steps))
        throw std::invalid_argument("snapshot series does not cover the horizon");
    if (strategy.kind == Strategy::Kind::Naive) {
        const int idx = strategy.naive_index >= 0 ? strategy.naive_index
                                                  : options.naive_index;
        if (idx >= steps)
            throw std::invalid_argument("naive execution index outside the window");
    }

    ExecutionReport report;
    report.label = strategy.label;
    report.upsilon = upsilon;
    report.tau = tau;
    report.steps = static_cast<std::size_t>(steps);

    double filled = 0.0;
    for (int k = 0; k < steps; ++k) {
        // demand is the schedule target minus what was actually filled, so
        // any depth shortfall carries itself forward automatically
        const double target =
            (k == steps - 1)
                ? upsilon
                : upsilon * sold_fraction(strategy, k + 1, steps, options.naive_index);
        const double demand = target - filled;
        if (!(demand > 0.0)) continue;

        const LobSnapshot& snap = snapshots[k];
        const double depth = snap.bid_depth();
        const double take = std::min(demand, depth);
        if (take < demand) {
            if (options.fail_on_insufficient_depth)
                throw InsufficientLiquidity("step demand exceeds snapshot depth");
            ++report.carried_steps;
        }
        if (take > 0.0) {
            const double price = execution_price(snap, take);
            Fill fill;
            fill.t = k * tau;
            fill.shares = take;
            fill.price = price;
            fill.revenue = take * price;
            report.fills.push_back(fill);
            filled += take;
            report.revenue += fill.revenue;
        }
    }
    report.total_shares = filled;
    report.unfilled = upsilon - filled;
    return report;
}

std::vector<RankedStrategy> compare_strategies(
    const std::vector<ExecutionReport>& reports, const ExecutionReport& baseline) {
    if (!(baseline.revenue > 0.0))
        throw std::domain_error("baseline revenue must be positive");
    for (const auto& report : reports)
        if (report.upsilon != baseline.upsilon || report.tau != baseline.tau ||
            report.steps != baseline.steps)
            throw std::domain_error("mismatched replay configuration");

    std::vector<RankedStrategy> out;
    out.reserve(reports.size());
    for (const auto& report : reports)
        out.push_back({report.label, report.revenue, report.revenue / baseline.revenue});
    std::sort(out.begin(), out.end(), [](const RankedStrategy& a, const RankedStrategy& b) {
        if (a.ratio_vs_ns != b.ratio_vs_ns) return a.ratio_vs_ns > b.ratio_vs_ns;
        return a.label < b.label;
    });
    return out;
}

std::vector<std::pair<double, double>> inventory_sweep(
    const std::vector<double>& d2_values, const std::vector<LobSnapshot>& snapshots,
    double upsilon, double tau, double horizon, const ReplayOptions& options) {
    for (double d2 : d2_values)
        if (!(d2 > 0.0)) throw std::domain_error("d2 values must be > 0");
    const ExecutionReport ns =
        replay(Strategy::naive(options.naive_index), snapshots, upsilon, tau, horizon,
               options);
    if (!(ns.revenue > 0.0)) throw std::domain_error("degenerate naive baseline");

    std::vector<std::pair<double, double>> out;
    out.reserve(d2_values.size());
    for (double d2 : d2_values) {
        const ExecutionReport report =
            replay(Strategy::parametric(d2), snapshots, upsilon, tau, horizon, options);
        out.emplace_back(d2, report.revenue / ns.revenue);
    }
    return out;
}

std::vector<UpsilonSweepRow> upsilon_sweep(const std::vector<Strategy>& strategies,
                                           const std::vector<LobSnapshot>& snapshots,
                                           const std::vector<double>& upsilon_values,
                                           double tau, double horizon,
                                           const ReplayOptions& options) {
    for (std::size_t i = 1; i < upsilon_values.size(); ++i)
        if (!(upsilon_values[i] > upsilon_values[i - 1]))
            throw std::invalid_argument("upsilon ladder must be increasing");

    std::vector<UpsilonSweepRow> out;
    out.reserve(upsilon_values.size());
    for (double upsilon : upsilon_values) {
        const ExecutionReport ns = replay(Strategy::naive(options.naive_index),
                                          snapshots, upsilon, tau, horizon, options);
        std::vector<ExecutionReport> reports;
        reports.reserve(strategies.size());
        for (const auto& strategy : strategies)
            reports.push_back(replay(strategy, snapshots, upsilon, tau, horizon, options));
        out.push_back({upsilon, compare_strategies(reports, ns)});
    }
    return out;
}

std::string ranking_csv(const std::vector<RankedStrategy>& ranking) {
    std::string out = "label,revenue,ratio_vs_ns\n";
    char buf[96];
    for (const auto& row : ranking) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g\n", row.label.c_str(),
                      row.revenue, row.ratio_vs_ns);
        out += buf;
    }
    return out;
}

}  // namespace optliq
