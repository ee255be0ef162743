#include "optliq/lob.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace optliq {

void validate(const LobSnapshot& snapshot) {
    if (snapshot.bids.empty() || snapshot.asks.empty())
        throw std::invalid_argument("snapshot needs at least one level per side");
    for (const auto& lvl : snapshot.bids)
        if (!(lvl.qty > 0.0)) throw std::invalid_argument("bid quantity must be > 0");
    for (const auto& lvl : snapshot.asks)
        if (!(lvl.qty > 0.0)) throw std::invalid_argument("ask quantity must be > 0");
    for (std::size_t i = 1; i < snapshot.bids.size(); ++i)
        if (!(snapshot.bids[i].price < snapshot.bids[i - 1].price))
            throw std::invalid_argument("bid prices must be strictly decreasing");
    for (std::size_t i = 1; i < snapshot.asks.size(); ++i)
        if (!(snapshot.asks[i].price > snapshot.asks[i - 1].price))
            throw std::invalid_argument("ask prices must be strictly increasing");
    if (!(snapshot.best_bid() < snapshot.best_ask()))
        throw std::invalid_argument("best bid must be below best ask");
}

namespace {

std::vector<LobLevel> parse_side(const nlohmann::json& arr, std::size_t line,
                                 const char* name) {
    if (!arr.is_array()) throw ParseError(line, std::string(name) + " must be an array");
    std::vector<LobLevel> out;
    out.reserve(arr.size());
    for (const auto& lvl : arr) {
        if (!lvl.is_array() || lvl.size() != 2 || !lvl[0].is_number() ||
            !lvl[1].is_number())
            throw ParseError(line, std::string(name) + " level must be [price,qty]");
        out.push_back({lvl[0].get<double>(), lvl[1].get<double>()});
    }
    return out;
}

}  // namespace

std::vector<LobSnapshot> parse_snapshots(const std::string& text) {
    std::vector<LobSnapshot> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
        if (doc.is_discarded()) throw ParseError(lineno, "invalid JSON");
        if (!doc.contains("ts") || !doc["ts"].is_number())
            throw ParseError(lineno, "missing numeric field 'ts'");
        if (!doc.contains("bids")) throw ParseError(lineno, "missing field 'bids'");
        if (!doc.contains("asks")) throw ParseError(lineno, "missing field 'asks'");
        LobSnapshot snap;
        snap.ts = doc["ts"].get<double>();
        snap.bids = parse_side(doc["bids"], lineno, "bids");
        snap.asks = parse_side(doc["asks"], lineno, "asks");
        try {
            validate(snap);
        } catch (const std::invalid_argument& e) {
            throw ParseError(lineno, e.what());
        }
        out.push_back(std::move(snap));
    }
    return out;
}

std::vector<LobSnapshot> load_snapshots(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open snapshot file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_snapshots(buf.str());
}

std::string snapshots_to_jsonl(const std::vector<LobSnapshot>& snapshots) {
    std::string out;
    for (const auto& snap : snapshots) {
        nlohmann::json doc;
        doc["ts"] = snap.ts;
        auto side = [](const std::vector<LobLevel>& levels) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& lvl : levels) arr.push_back({lvl.price, lvl.qty});
            return arr;
        };
        doc["bids"] = side(snap.bids);
        doc["asks"] = side(snap.asks);
        out += doc.dump();
        out += '\n';
    }
    return out;
}

double execution_price(const LobSnapshot& book, double Q) {
    if (!(Q > 0.0)) throw std::domain_error("execution volume must be > 0");
    double remaining = Q;
    double notional = 0.0;
    for (const auto& lvl : book.bids) {
        const double take = std::min(remaining, lvl.qty);
        notional += take * lvl.price;
        remaining -= take;
        if (remaining <= 0.0) return notional / Q;
    }
    throw InsufficientLiquidity("volume exceeds total bid depth");
}

double measure_tpi(const LobSnapshot& book, double Q) {
    return execution_price(book, Q) - book.best_bid();
}

double measure_ppi(const LobSnapshot& book, double Q) {
    if (!(Q > 0.0)) throw std::domain_error("execution volume must be > 0");
    const double mid_before = book.mid();
    double remaining = Q;
    for (const auto& lvl : book.bids) {
        if (remaining < lvl.qty) {
            const double mid_after = 0.5 * (lvl.price + book.best_ask());
            return mid_after - mid_before;
        }
        remaining -= lvl.qty;
    }
    throw InsufficientLiquidity("volume consumes the entire bid side");
}

std::vector<double> volume_ladder(double nu_max, double tau, int m) {
    if (m < 2) throw std::invalid_argument("ladder needs m >= 2");
    if (!(nu_max > 0.0) || !(tau > 0.0))
        throw std::invalid_argument("nu_max and tau must be > 0");
    std::vector<double> out(m);
    for (int i = 1; i <= m; ++i) out[i - 1] = i * (nu_max * tau) / m;
    return out;
}

std::vector<ImpactSample> impact_curve(const std::vector<LobSnapshot>& snapshots,
                                       const std::vector<double>& volumes,
                                       double tau) {
    if (snapshots.empty()) throw std::invalid_argument("no snapshots");
    if (volumes.size() < 2) throw std::invalid_argument("need at least two volumes");
    for (std::size_t i = 1; i < volumes.size(); ++i)
        if (!(volumes[i] > volumes[i - 1]))
            throw std::invalid_argument("volumes must be strictly increasing");

    std::vector<ImpactSample> out;
    out.reserve(volumes.size());
    for (double Q : volumes) {
        ImpactSample sample;
        sample.volume = Q;
        sample.rate = Q / tau;
        double tpi_sum = 0.0, ppi_sum = 0.0;
        for (const auto& snap : snapshots) {
            // PPI needs a surviving best bid, so feasibility is the strict one
            if (!(Q < snap.bid_depth())) {
                ++sample.skipped;
                continue;
            }
            tpi_sum += measure_tpi(snap, Q);
            ppi_sum += measure_ppi(snap, Q);
            ++sample.count;
        }
        if (sample.count > 0) {
            sample.mean_tpi = tpi_sum / sample.count;
            sample.mean_ppi = ppi_sum / sample.count;
        }
        out.push_back(sample);
    }
    return out;
}

}  // namespace optliq
