#include "optliq/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace optliq {

std::string to_string(Scenario scenario) {
    switch (scenario) {
        case Scenario::Under: return "under";
        case Scenario::Over: return "over";
        case Scenario::Average: return "average";
    }
    return "?";
}

std::string to_string(Target target) {
    return target == Target::TPI ? "TPI" : "PPI";
}

namespace {

// Residual diagnostics over the curve; sse and R^2 are on the mean curve,
// one residual per rate. Squared-residual std is the population value.
void fill_diagnostics(FitResult& fit, const std::vector<ImpactPoint>& curve) {
    const std::size_t n = curve.size();
    double ybar = 0.0;
    for (const auto& [nu, y] : curve) ybar += y;
    ybar /= n;

    double sse = 0.0, tss = 0.0;
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = curve[i].second - eval(fit.form, curve[i].first);
        sq[i] = r * r;
        sse += sq[i];
        const double d = curve[i].second - ybar;
        tss += d * d;
    }
    fit.sse = sse;
    fit.mean_sq_resid = sse / n;
    double var = 0.0;
    for (double s : sq) {
        const double d = s - fit.mean_sq_resid;
        var += d * d;
    }
    fit.std_sq_resid = std::sqrt(var / n);
    fit.r_squared = tss > 0.0 ? 1.0 - sse / tss : (sse == 0.0 ? 1.0 : 0.0);
}

void check_curve(const std::vector<ImpactPoint>& curve, std::size_t min_points) {
    if (curve.size() < min_points)
        throw std::invalid_argument("not enough curve points for the fit");
    double lo = curve.front().first, hi = lo;
    for (const auto& [nu, y] : curve) {
        lo = std::min(lo, nu);
        hi = std::max(hi, nu);
    }
    if (!(hi > lo))
        throw std::invalid_argument("degenerate fit: all rates identical");
}

// OLS of y = a*x + b; returns (a, b, sse).
struct LineFit {
    double slope = 0.0, intercept = 0.0, sse = 0.0;
};

LineFit ols(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (det == 0.0) throw std::invalid_argument("degenerate fit: singular system");
    LineFit fit;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy * sxx - sx * sxy) / det;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - fit.slope * x[i] - fit.intercept;
        fit.sse += r * r;
    }
    return fit;
}

}  // namespace

FitResult fit_linear(const std::vector<ImpactPoint>& curve, Scenario scenario,
                     Target target) {
    check_curve(curve, 2);
    std::vector<double> x, y;
    x.reserve(curve.size());
    y.reserve(curve.size());
    for (const auto& [nu, imp] : curve) {
        x.push_back(nu);
        y.push_back(imp);
    }
    const LineFit line = ols(x, y);
    FitResult fit;
    fit.form = ImpactForm::linear(line.slope, line.intercept);
    fit.scenario = scenario;
    fit.target = target;
    fill_diagnostics(fit, curve);
    return fit;
}

FitResult fit_power(const std::vector<ImpactPoint>& curve, Scenario scenario,
                    Target target) {
    check_curve(curve, 3);
    for (const auto& [nu, imp] : curve)
        if (!(nu > 0.0))
            throw std::invalid_argument("power fit requires strictly positive rates");

    std::vector<double> y;
    y.reserve(curve.size());
    for (const auto& [nu, imp] : curve) y.push_back(imp);

    std::vector<double> x(curve.size());
    auto sse_at = [&](double exponent) {
        for (std::size_t i = 0; i < curve.size(); ++i)
            x[i] = std::pow(curve[i].first, exponent);
        return ols(x, y).sse;
    };

    // Coarse scan to bracket the best exponent, then golden-section inside.
    constexpr double kLo = 0.05, kHi = 5.0;
    constexpr int kScan = 200;
    double best_e = kLo;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kScan; ++i) {
        const double e = kLo + (kHi - kLo) * i / kScan;
        const double s = sse_at(e);
        if (s < best_sse) {
            best_sse = s;
            best_e = e;
        }
    }
    const double step = (kHi - kLo) / kScan;
    double a = std::max(kLo, best_e - step);
    double b = std::min(kHi, best_e + step);
    constexpr double kInvPhi = 0.6180339887498949;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = sse_at(c), fd = sse_at(d);
    while (b - a > 1e-10) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = sse_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = sse_at(d);
        }
    }
    const double exponent = 0.5 * (a + b);
    for (std::size_t i = 0; i < curve.size(); ++i)
        x[i] = std::pow(curve[i].first, exponent);
    const LineFit line = ols(x, y);

    FitResult fit;
    fit.form = ImpactForm::power(line.slope, exponent, line.intercept);
    fit.scenario = scenario;
    fit.target = target;
    fill_diagnostics(fit, curve);
    return fit;
}

FitComparison compare_fits(const FitResult& linear, const FitResult& power) {
    if (linear.scenario != power.scenario || linear.target != power.target)
        throw std::domain_error("compare_fits: fits come from different curves");
    auto lower_wins = [](double lin, double pow_) {
        MetricComparison m{lin, pow_, 0};
        if (lin < pow_) m.winner = -1;
        if (pow_ < lin) m.winner = +1;
        return m;
    };
    FitComparison cmp;
    cmp.sse = lower_wins(linear.sse, power.sse);
    cmp.mean_sq_resid = lower_wins(linear.mean_sq_resid, power.mean_sq_resid);
    cmp.std_sq_resid = lower_wins(linear.std_sq_resid, power.std_sq_resid);
    cmp.r_squared = lower_wins(linear.r_squared, power.r_squared);
    // for R^2, larger is better
    cmp.r_squared.winner = -cmp.r_squared.winner;
    return cmp;
}

double realized_volatility(const std::vector<double>& mid_prices) {
    if (mid_prices.size() < 2)
        throw std::domain_error("need at least two prices");
    double sum = 0.0;
    for (std::size_t i = 1; i < mid_prices.size(); ++i) {
        if (!(mid_prices[i] > 0.0) || !(mid_prices[i - 1] > 0.0))
            throw std::domain_error("prices must be positive");
        const double r = std::log(mid_prices[i]) - std::log(mid_prices[i - 1]);
        sum += r * r;
    }
    return std::sqrt(sum);
}

double average_spread(const std::vector<LobSnapshot>& snapshots) {
    if (snapshots.empty()) throw std::domain_error("no snapshots");
    double sum = 0.0;
    for (const auto& snap : snapshots) sum += snap.best_ask() - snap.best_bid();
    return sum / snapshots.size();
}

ImpactForm to_solver_form(const FitResult& fit) { return to_solver_form(fit.form); }

std::vector<ImpactPoint> curve_points(const std::vector<ImpactSample>& curve,
                                      Target target) {
    std::vector<ImpactPoint> out;
    out.reserve(curve.size());
    for (const auto& sample : curve) {
        if (sample.count == 0) continue;
        out.emplace_back(sample.rate,
                         target == Target::TPI ? sample.mean_tpi : sample.mean_ppi);
    }
    return out;
}

}  // namespace optliq
