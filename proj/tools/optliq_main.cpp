#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "optliq/analytic.hpp"
#include "optliq/calibrate.hpp"
#include "optliq/hjb.hpp"
#include "optliq/io.hpp"
#include "optliq/lob.hpp"
#include "optliq/simulate.hpp"
#include "optliq/synthetic.hpp"

using json = nlohmann::json;
using namespace optliq;

namespace {

// ---- config plumbing -------------------------------------------------------

struct CliFlags {
    std::string config_path;
    std::string out_dir;
    std::string scenario;
    std::vector<std::string> strategies;
    std::string d2_sweep;
    std::string upsilon_sweep;
    std::int64_t seed = -1;
};

json default_config() {
    // reference parameter defaults plus the synthetic fixtures standing in for the
    // exchange data, so every command runs out of the box
    json cfg;
    cfg["out"] = "out";
    cfg["synthetic"] = {{"best_bid", 100.0}, {"tick", 0.01},  {"level_qty", 150.0},
                        {"spread", 0.1},     {"depth", 140},  {"growth_start", 40},
                        {"growth", 1.0},     {"drift_per_step", 0.0},
                        {"tau", 5.0},        {"noise", 0.0},  {"seed", 0},
                        {"steps", 3}};
    cfg["calibrate"] = {{"m", 50},
                        {"tau", 5.0},
                        {"scenarios",
                         {{"under", 50.0}, {"over", 7000.0}, {"average", 1200.0}}}};
    cfg["solve"] = {
        {"grid",
         {{"n_t", 360}, {"n_s", 10}, {"n_q", 100}, {"horizon", 1.0},
          {"s_max", 300.0}, {"q_max", 1.0}}},
        {"sigma", 0.009388},
        {"delta", 0.100069},
        {"upsilon", 0.5},
        {"q0", 0.5},
        {"runs",
         {{{"label", "UTLPL"},
           {"tpi", {{"kind", "linear"}, {"p0", 0.00079754}, {"p1", 0.00066177}}},
           {"ppi", {{"kind", "linear"}, {"p0", 0.00095264}, {"p1", -0.00229332}}}}}}};
    cfg["simulate"] = {{"upsilon", 4000.0},
                       {"tau", 5.0},
                       {"horizon", 1800.0},
                       {"naive_index", -1},
                       {"strategies",
                        {{{"kind", "parametric"}, {"d2", 0.5}, {"label", "PI(0.5)"}},
                         {{"kind", "parametric"}, {"d2", 1.0}, {"label", "PI(1)"}},
                         {{"kind", "parametric"}, {"d2", 5.0}, {"label", "PI(5)"}}}},
                       {"synthetic",
                        {{"best_bid", 100.0}, {"tick", 0.04}, {"level_qty", 40.0},
                         {"spread", 0.1}, {"depth", 150}, {"growth_start", -1},
                         {"growth", 0.0}, {"drift_per_step", 0.4 / 360.0},
                         {"tau", 5.0}, {"noise", 0.0}, {"seed", 0}, {"steps", 360}}}};
    cfg["verify"] = {
        {"sigma", 60.0},
        {"delta", 0.100069},
        {"upsilon", 0.5},
        {"tpi", {{"kind", "linear"}, {"p0", 0.05}, {"p1", 3.0}}},
        {"ppi", {{"kind", "linear"}, {"p0", 0.05}, {"p1", 0.0}}},
        {"refinements", 3},
        {"bases",
         {{"t", {{"n_t", 90}, {"n_s", 5}, {"n_q", 25}}},
          {"s", {{"n_t", 5760}, {"n_s", 20}, {"n_q", 25}}},
          {"q", {{"n_t", 2880}, {"n_s", 5}, {"n_q", 25}}}}},
        {"chi_square",
         {{"sigma", 0.009388},
          {"tpi", {{"kind", "linear"}, {"p0", 0.00079754}, {"p1", 0.00066177}}},
          {"ppi", {{"kind", "linear"}, {"p0", 0.00095264}, {"p1", 0.0}}},
          {"epsilon", 1e-3}}}};
    return cfg;
}

void merge_into(json& base, const json& overlay) {
    if (!overlay.is_object() || !base.is_object()) {
        base = overlay;
        return;
    }
    for (auto it = overlay.begin(); it != overlay.end(); ++it) {
        if (base.contains(it.key()))
            merge_into(base[it.key()], it.value());
        else
            base[it.key()] = it.value();
    }
}

json load_config(const CliFlags& flags) {
    json cfg = default_config();
    if (!flags.config_path.empty()) {
        if (!std::filesystem::exists(flags.config_path))
            throw std::invalid_argument("config file not found: " + flags.config_path);
        merge_into(cfg, json::parse(read_file(flags.config_path)));
    }
    if (!flags.out_dir.empty()) cfg["out"] = flags.out_dir;
    if (flags.seed >= 0) {
        cfg["synthetic"]["seed"] = flags.seed;
        cfg["simulate"]["synthetic"]["seed"] = flags.seed;
    }
    if (!flags.d2_sweep.empty()) cfg["simulate"]["d2_sweep"] = flags.d2_sweep;
    if (!flags.upsilon_sweep.empty())
        cfg["simulate"]["upsilon_sweep"] = flags.upsilon_sweep;
    return cfg;
}

ImpactForm parse_form(const json& node) {
    const std::string kind = node.at("kind").get<std::string>();
    if (kind == "linear")
        return ImpactForm::linear(node.at("p0").get<double>(),
                                  node.at("p1").get<double>());
    if (kind == "quadratic")
        return ImpactForm::quadratic(node.at("p0").get<double>(),
                                     node.at("p1").get<double>(),
                                     node.value("p2", 0.0));
    if (kind == "power")
        return ImpactForm::power(node.at("p0").get<double>(),
                                 node.at("p1").get<double>(),
                                 node.at("p2").get<double>());
    throw std::invalid_argument("unknown impact form kind: " + kind);
}

json form_to_json(const ImpactForm& form) {
    const char* kind = form.kind == ImpactKind::Linear      ? "linear"
                       : form.kind == ImpactKind::Quadratic ? "quadratic"
                                                            : "power";
    return {{"kind", kind}, {"p0", form.p0}, {"p1", form.p1}, {"p2", form.p2}};
}

SyntheticBookConfig parse_synthetic(const json& node) {
    SyntheticBookConfig cfg;
    cfg.best_bid = node.value("best_bid", cfg.best_bid);
    cfg.tick = node.value("tick", cfg.tick);
    cfg.level_qty = node.value("level_qty", cfg.level_qty);
    cfg.spread = node.value("spread", cfg.spread);
    cfg.depth = node.value("depth", cfg.depth);
    cfg.growth_start = node.value("growth_start", cfg.growth_start);
    cfg.growth = node.value("growth", cfg.growth);
    cfg.drift_per_step = node.value("drift_per_step", cfg.drift_per_step);
    cfg.tau = node.value("tau", cfg.tau);
    cfg.noise = node.value("noise", cfg.noise);
    cfg.seed = node.value("seed", std::uint64_t{0});
    return cfg;
}

std::vector<LobSnapshot> load_series(const json& cfg, const json& synthetic_node) {
    if (cfg.contains("snapshots")) {
        const std::string path = cfg.at("snapshots").get<std::string>();
        if (!std::filesystem::exists(path))
            throw std::invalid_argument("snapshot file not found: " + path);
        return load_snapshots(path);
    }
    const int steps = synthetic_node.value("steps", 1);
    return make_series(parse_synthetic(synthetic_node), steps);
}

SolverGrid parse_grid(const json& node) {
    SolverGrid grid;
    grid.n_t = node.value("n_t", grid.n_t);
    grid.n_s = node.value("n_s", grid.n_s);
    grid.n_q = node.value("n_q", grid.n_q);
    grid.horizon = node.value("horizon", grid.horizon);
    grid.s_max = node.value("s_max", grid.s_max);
    grid.q_max = node.value("q_max", grid.q_max);
    return grid;
}

struct SweepRange {
    double lo = 0.0, hi = 0.0, step = 0.0;
};

SweepRange parse_sweep(const std::string& text) {
    SweepRange range;
    char rest = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &range.lo, &range.hi, &range.step,
                    &rest) != 3 ||
        !(range.step > 0.0) || range.hi < range.lo)
        throw std::invalid_argument("sweep must be LO:HI:STEP with STEP > 0: " + text);
    return range;
}

std::vector<double> sweep_values(const SweepRange& range) {
    std::vector<double> values;
    for (int i = 0;; ++i) {
        const double v = range.lo + i * range.step;
        if (v > range.hi * (1.0 + 1e-12)) break;
        values.push_back(v);
    }
    return values;
}

std::filesystem::path out_dir(const json& cfg) {
    return std::filesystem::path(cfg.at("out").get<std::string>());
}

void write_manifest(const json& cfg, const std::string& command,
                    const std::vector<std::string>& outputs) {
    json manifest;
    manifest["command"] = command;
    manifest["library_version"] = kLibraryVersion;
    manifest["config"] = cfg;
    manifest["outputs"] = outputs;
    write_file_atomic((out_dir(cfg) / (command + "_manifest.json")).string(),
                      manifest.dump(2) + "\n");
}

json fit_to_json(const FitResult& fit) {
    return {{"form", form_to_json(fit.form)},
            {"solver_form", form_to_json(to_solver_form(fit))},
            {"sse", fit.sse},
            {"mean_sq_resid", fit.mean_sq_resid},
            {"std_sq_resid", fit.std_sq_resid},
            {"r_squared", fit.r_squared}};
}

PolicyPath read_path_csv(const std::string& path) {
    if (!std::filesystem::exists(path))
        throw std::invalid_argument("path file not found: " + path);
    std::istringstream in(read_file(path));
    std::string line;
    PolicyPath out;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "t,nu,q") continue;
        PolicyPathPoint p;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &p.t, &p.nu, &p.q) != 3)
            throw ParseError(lineno, "malformed path row in " + path);
        out.push_back(p);
    }
    if (out.size() < 2)
        throw std::invalid_argument("path file too short: " + path);
    return out;
}

// ---- commands --------------------------------------------------------------

int cmd_calibrate(const json& cfg, const CliFlags& flags) {
    const auto series = load_series(cfg, cfg.at("synthetic"));
    const json& section = cfg.at("calibrate");
    const int m = section.at("m").get<int>();
    const double tau = section.at("tau").get<double>();

    std::vector<std::pair<std::string, Scenario>> scenarios = {
        {"under", Scenario::Under}, {"over", Scenario::Over},
        {"average", Scenario::Average}};
    if (!flags.scenario.empty()) {
        std::erase_if(scenarios, [&](const auto& s) { return s.first != flags.scenario; });
        if (scenarios.empty())
            throw std::invalid_argument("unknown scenario: " + flags.scenario);
    }

    std::vector<double> mids;
    for (const auto& snap : series) mids.push_back(snap.mid());

    std::vector<std::string> outputs;
    const auto dir = out_dir(cfg);
    for (const auto& [name, tag] : scenarios) {
        const double nu_max = section.at("scenarios").at(name).get<double>();
        const auto volumes = volume_ladder(nu_max, tau, m);
        const auto curve = impact_curve(series, volumes, tau);

        std::ostringstream csv;
        csv << "rate,volume,mean_tpi,mean_ppi,count,skipped\n";
        char buf[256];
        for (const auto& s : curve) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%zu,%zu\n",
                          s.rate, s.volume, s.mean_tpi, s.mean_ppi, s.count,
                          s.skipped);
            csv << buf;
        }
        const auto csv_path = dir / ("curve_" + name + ".csv");
        write_file_atomic(csv_path.string(), csv.str());
        outputs.push_back(csv_path.string());

        json report;
        report["scenario"] = name;
        report["nu_max"] = nu_max;
        report["m"] = m;
        report["tau"] = tau;
        for (const Target target : {Target::TPI, Target::PPI}) {
            const auto points = curve_points(curve, target);
            const auto lin = fit_linear(points, tag, target);
            const auto pw = fit_power(points, tag, target);
            const auto cmp = compare_fits(lin, pw);
            json entry;
            entry["linear"] = fit_to_json(lin);
            entry["power"] = fit_to_json(pw);
            entry["winner_sse"] = cmp.sse.winner;
            entry["winner_r_squared"] = cmp.r_squared.winner;
            report[target == Target::TPI ? "tpi" : "ppi"] = entry;
        }
        const auto report_path = dir / ("calibration_" + name + ".json");
        write_file_atomic(report_path.string(), report.dump(2) + "\n");
        outputs.push_back(report_path.string());
    }

    json market;
    market["realized_volatility"] = realized_volatility(mids);
    market["average_spread"] = average_spread(series);
    market["snapshots"] = series.size();
    const auto market_path = dir / "market.json";
    write_file_atomic(market_path.string(), market.dump(2) + "\n");
    outputs.push_back(market_path.string());

    write_manifest(cfg, "calibrate", outputs);
    std::printf("calibrate: %zu scenario(s), %zu snapshot(s)\n", scenarios.size(),
                series.size());
    return 0;
}

int cmd_solve(const json& cfg, const CliFlags&) {
    const json& section = cfg.at("solve");
    const SolverGrid grid = parse_grid(section.at("grid"));
    validate(grid);

    ProblemSpec base;
    base.sigma = section.at("sigma").get<double>();
    base.delta = section.at("delta").get<double>();
    base.horizon = grid.horizon;
    base.upsilon = section.at("upsilon").get<double>();
    const double q0 = section.at("q0").get<double>();

    std::vector<std::string> outputs;
    const auto dir = out_dir(cfg);
    for (const json& run : section.at("runs")) {
        const std::string label = run.at("label").get<std::string>();
        ProblemSpec spec = base;
        spec.tpi = parse_form(run.at("tpi"));
        spec.ppi = parse_form(run.at("ppi"));
        validate(spec);

        const auto result = solve(spec, grid);
        const auto path = extract_policy_path(result.policy, q0);

        const auto surface_path = dir / ("surface_" + label + ".csv");
        const auto policy_path = dir / ("policy_" + label + ".csv");
        const auto path_path = dir / ("path_" + label + ".csv");
        write_file_atomic(surface_path.string(), value_surface_csv(result.value));
        write_file_atomic(policy_path.string(), policy_surface_csv(result.policy));
        write_file_atomic(path_path.string(), policy_path_csv(path));
        outputs.push_back(surface_path.string());
        outputs.push_back(policy_path.string());
        outputs.push_back(path_path.string());
        std::printf("solve %s: worst policy iterations %d\n", label.c_str(),
                    result.worst_iterations);
    }
    write_manifest(cfg, "solve", outputs);
    return 0;
}

int cmd_simulate(const json& cfg, const CliFlags& flags) {
    const json& section = cfg.at("simulate");
    const auto series = load_series(section, section.at("synthetic"));
    const double upsilon = section.at("upsilon").get<double>();
    const double tau = section.at("tau").get<double>();
    const double horizon = section.at("horizon").get<double>();
    ReplayOptions options;
    options.naive_index = section.value("naive_index", -1);

    std::vector<Strategy> strategies;
    for (const json& node : section.at("strategies")) {
        const std::string kind = node.at("kind").get<std::string>();
        const std::string label = node.value("label", "");
        if (kind == "parametric")
            strategies.push_back(Strategy::parametric(node.at("d2").get<double>(),
                                                      label));
        else if (kind == "numeric")
            strategies.push_back(Strategy::numeric(
                read_path_csv(node.at("path_csv").get<std::string>()), label));
        else if (kind == "naive")
            strategies.push_back(Strategy::naive(node.value("index", -1),
                                                 label.empty() ? "NS" : label));
        else
            throw std::invalid_argument("unknown strategy kind: " + kind);
    }
    if (!flags.strategies.empty())
        std::erase_if(strategies, [&](const Strategy& s) {
            for (const auto& keep : flags.strategies)
                if (s.label == keep) return false;
            return true;
        });
    if (strategies.empty()) throw std::invalid_argument("no strategies selected");

    const auto ns = replay(Strategy::naive(options.naive_index), series, upsilon,
                           tau, horizon, options);
    std::vector<ExecutionReport> reports;
    for (const auto& strategy : strategies)
        reports.push_back(replay(strategy, series, upsilon, tau, horizon, options));
    const auto ranking = compare_strategies(reports, ns);

    std::vector<std::string> outputs;
    const auto dir = out_dir(cfg);
    const auto ranking_path = dir / "ranking.csv";
    write_file_atomic(ranking_path.string(), ranking_csv(ranking));
    outputs.push_back(ranking_path.string());

    json report_json;
    report_json["ns_revenue"] = ns.revenue;
    for (const auto& report : reports) {
        json entry;
        entry["revenue"] = report.revenue;
        entry["total_shares"] = report.total_shares;
        entry["carried_steps"] = report.carried_steps;
        entry["unfilled"] = report.unfilled;
        entry["ratio_vs_ns"] = report.revenue / ns.revenue;
        report_json["strategies"][report.label] = entry;
    }
    const auto reports_path = dir / "simulate_reports.json";
    write_file_atomic(reports_path.string(), report_json.dump(2) + "\n");
    outputs.push_back(reports_path.string());

    if (section.contains("d2_sweep")) {
        const auto range = parse_sweep(section.at("d2_sweep").get<std::string>());
        const auto sweep =
            inventory_sweep(sweep_values(range), series, upsilon, tau, horizon,
                            options);
        std::ostringstream csv;
        csv << "d2,ratio_vs_ns\n";
        char buf[128];
        for (const auto& [d2, ratio] : sweep) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", d2, ratio);
            csv << buf;
        }
        const auto sweep_path = dir / "d2_sweep.csv";
        write_file_atomic(sweep_path.string(), csv.str());
        outputs.push_back(sweep_path.string());
    }

    if (section.contains("upsilon_sweep")) {
        const auto range = parse_sweep(section.at("upsilon_sweep").get<std::string>());
        const auto rows = upsilon_sweep(strategies, series, sweep_values(range),
                                        tau, horizon, options);
        std::ostringstream csv;
        csv << "upsilon,label,revenue,ratio_vs_ns\n";
        char buf[256];
        for (const auto& row : rows)
            for (const auto& entry : row.ranking) {
                std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g\n", row.upsilon,
                              entry.label.c_str(), entry.revenue,
                              entry.ratio_vs_ns);
                csv << buf;
            }
        const auto sweep_path = dir / "upsilon_sweep.csv";
        write_file_atomic(sweep_path.string(), csv.str());
        outputs.push_back(sweep_path.string());
    }

    write_manifest(cfg, "simulate", outputs);
    std::printf("simulate: %zu strategies, NS revenue %.6f\n", strategies.size(),
                ns.revenue);
    return 0;
}

int cmd_verify(const json& cfg, const CliFlags&) {
    const json& section = cfg.at("verify");

    ProblemSpec study;
    study.tpi = parse_form(section.at("tpi"));
    study.ppi = parse_form(section.at("ppi"));
    study.sigma = section.at("sigma").get<double>();
    study.delta = section.at("delta").get<double>();
    study.horizon = 1.0;
    study.upsilon = section.at("upsilon").get<double>();
    const int refinements = section.at("refinements").get<int>();

    json report;
    const std::pair<const char*, GridAxis> axes[] = {
        {"t", GridAxis::T}, {"s", GridAxis::S}, {"q", GridAxis::Q}};
    for (const auto& [name, axis] : axes) {
        const SolverGrid base = parse_grid(section.at("bases").at(name));
        const auto records = convergence_study(study, base, axis, refinements);
        json rows = json::array();
        for (const auto& r : records)
            rows.push_back({{"spacing", r.spacing},
                            {"error", r.error},
                            {"estimated_order",
                             std::isnan(r.estimated_order)
                                 ? json()
                                 : json(r.estimated_order)}});
        report["convergence"][name] = rows;
        std::printf("verify: axis %s estimated order %.3f\n", name,
                    records.back().estimated_order);
    }

    const json& chi = section.at("chi_square");
    ProblemSpec lin;
    lin.tpi = parse_form(chi.at("tpi"));
    lin.ppi = parse_form(chi.at("ppi"));
    lin.sigma = chi.at("sigma").get<double>();
    lin.delta = section.at("delta").get<double>();
    lin.horizon = 1.0;
    lin.upsilon = section.at("upsilon").get<double>();
    SolverGrid grid;  // reference grid
    SolveOptions opt;
    opt.full_policy = true;
    const auto result = solve(lin, grid, opt);
    const double horizon = grid.horizon;
    const auto stat = compare_policies(
        result.policy,
        [horizon](double t, double q) { return policy_linear(t, q, horizon); },
        chi.at("epsilon").get<double>());
    const double critical = chi_square_critical(stat.cells);
    report["chi_square"] = {{"statistic", stat.statistic},
                            {"cells", stat.cells},
                            {"critical_5pct", critical},
                            {"below_critical", stat.statistic < critical}};
    std::printf("verify: chi-square %.6g over %zu cells (5%% critical %.6g)\n",
                stat.statistic, stat.cells, critical);

    const double deviation = price_independence_check(result);
    const double nu_max = grid.q_max / grid.dt();
    report["price_independence"] = {{"max_deviation", deviation},
                                    {"nu_max", nu_max},
                                    {"tolerance", 1e-6 * nu_max}};
    std::printf("verify: price-independence max deviation %.6g (tolerance %.6g)\n",
                deviation, 1e-6 * nu_max);

    const auto dir = out_dir(cfg);
    const auto report_path = dir / "verify_report.json";
    write_file_atomic(report_path.string(), report.dump(2) + "\n");
    write_manifest(cfg, "verify", {report_path.string()});
    return 0;
}

int dispatch(const std::string& command, const CliFlags& flags) {
    try {
        const json cfg = load_config(flags);
        std::filesystem::create_directories(out_dir(cfg));
        if (command == "calibrate") return cmd_calibrate(cfg, flags);
        if (command == "solve") return cmd_solve(cfg, flags);
        if (command == "simulate") return cmd_simulate(cfg, flags);
        return cmd_verify(cfg, flags);
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "error: config: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: numerical failure: %s\n", e.what());
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal liquidation toolkit"};
    app.require_subcommand(1);

    CliFlags flags;
    std::string command;
    for (const char* name : {"calibrate", "solve", "simulate", "verify"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", flags.config_path, "JSON config file");
        sub->add_option("--out", flags.out_dir, "output directory");
        sub->add_option("--scenario", flags.scenario,
                        "restrict to one scenario: under, over, average");
        sub->add_option("--strategy", flags.strategies,
                        "strategy label to include (repeatable)");
        sub->add_option("--d2-sweep", flags.d2_sweep, "LO:HI:STEP");
        sub->add_option("--upsilon-sweep", flags.upsilon_sweep, "LO:HI:STEP");
        sub->add_option("--seed", flags.seed, "synthetic-data seed");
        sub->callback([&command, name] { command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return dispatch(command, flags);
}
