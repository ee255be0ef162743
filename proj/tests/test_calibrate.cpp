#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "optliq/calibrate.hpp"
#include "optliq/synthetic.hpp"

using namespace optliq;

namespace {

std::vector<ImpactPoint> sample_form(const ImpactForm& form,
                                     const std::vector<double>& rates) {
    std::vector<ImpactPoint> out;
    for (double nu : rates) out.emplace_back(nu, eval(form, nu));
    return out;
}

std::vector<double> rate_ladder(double nu_max, int m) {
    std::vector<double> rates;
    for (int i = 1; i <= m; ++i) rates.push_back(i * nu_max / m);
    return rates;
}

}  // namespace

TEST_CASE("fit_linear recovers an exact line") {
    const auto curve = sample_form(ImpactForm::linear(2.0, 1.0), rate_ladder(10.0, 20));
    const auto fit = fit_linear(curve);
    CHECK(fit.form.kind == ImpactKind::Linear);
    CHECK(fit.form.p0 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.form.p1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.sse <= 1e-20);
    CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("fit_linear: two points interpolate exactly") {
    const std::vector<ImpactPoint> curve = {{1.0, -0.5}, {3.0, -1.7}};
    const auto fit = fit_linear(curve);
    CHECK(fit.form.p0 == doctest::Approx(-0.6).epsilon(1e-12));
    CHECK(fit.form.p1 == doctest::Approx(0.1).epsilon(1e-10));
    CHECK(fit.sse <= 1e-24);
}

TEST_CASE("fit_linear matches hand-solved normal equations on a noisy curve") {
    // y = -0.02 nu - 0.01 + alternating +-0.005
    std::vector<ImpactPoint> curve;
    for (int i = 1; i <= 6; ++i)
        curve.emplace_back(i, -0.02 * i - 0.01 + (i % 2 ? 0.005 : -0.005));
    // normal equations solved separately: slope/intercept below
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : curve) sx += x, sy += y, sxx += x * x, sxy += x * y;
    const double n = curve.size();
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    const auto fit = fit_linear(curve);
    CHECK(fit.form.p0 == doctest::Approx(slope).epsilon(1e-12));
    CHECK(fit.form.p1 == doctest::Approx(intercept).epsilon(1e-12));
}

TEST_CASE("fit_linear degenerate input") {
    const std::vector<ImpactPoint> same = {{2.0, 1.0}, {2.0, 3.0}};
    CHECK_THROWS_AS(fit_linear(same), std::invalid_argument);
    CHECK_THROWS_AS(fit_linear({{1.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("fit_power recovers an exact power law") {
    const auto truth = ImpactForm::power(-3.0, 0.5, 1.0);
    const auto curve = sample_form(truth, rate_ladder(5.0, 25));
    const auto fit = fit_power(curve);
    CHECK(fit.form.kind == ImpactKind::Power);
    CHECK(fit.form.p0 == doctest::Approx(-3.0).epsilon(1e-7));
    CHECK(fit.form.p1 == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(fit.form.p2 == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(fit.sse <= 1e-14);
    CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("fit_power on a pure line matches fit_linear") {
    const auto curve =
        sample_form(ImpactForm::linear(-0.02, -0.003), rate_ladder(50.0, 30));
    const auto pw = fit_power(curve);
    const auto ln = fit_linear(curve);
    CHECK(pw.form.p1 == doctest::Approx(1.0).epsilon(1e-6));
    for (const auto& [nu, y] : curve)
        CHECK(eval(pw.form, nu) == doctest::Approx(eval(ln.form, nu)).epsilon(1e-6));
}

TEST_CASE("fit round-trip within 1e-6 relative error") {
    const auto rates = rate_ladder(20.0, 50);
    const ImpactForm truths[] = {ImpactForm::linear(-0.015, -0.002),
                                 ImpactForm::power(-0.4, 1.3, -0.05),
                                 ImpactForm::power(-0.7, 0.62, 0.01)};
    for (const auto& truth : truths) {
        const auto curve = sample_form(truth, rates);
        const auto fit = truth.kind == ImpactKind::Linear ? fit_linear(curve)
                                                          : fit_power(curve);
        CHECK(std::abs(fit.form.p0 - truth.p0) <= 1e-6 * std::abs(truth.p0));
        CHECK(std::abs(fit.form.p1 - truth.p1) <= 1e-6 * std::abs(truth.p1));
        if (truth.kind == ImpactKind::Power)
            CHECK(std::abs(fit.form.p2 - truth.p2) <= 1e-6 * std::abs(truth.p2));
    }
}

TEST_CASE("fit_power never beats linear by losing: nested-model sse") {
    // a curve that is neither a line nor a pure power law
    std::vector<ImpactPoint> curve;
    for (int i = 1; i <= 40; ++i) {
        const double nu = 0.5 * i;
        curve.emplace_back(nu, -0.01 * nu - 0.002 * std::sqrt(nu) + 0.001 * std::sin(i));
    }
    const auto pw = fit_power(curve);
    const auto ln = fit_linear(curve);
    CHECK(pw.sse <= ln.sse * (1.0 + 1e-9));
    CHECK(pw.r_squared >= ln.r_squared - 1e-9);
}

TEST_CASE("fit diagnostics are internally consistent") {
    std::vector<ImpactPoint> curve;
    for (int i = 1; i <= 10; ++i)
        curve.emplace_back(i, -0.1 * i + (i % 3 == 0 ? 0.02 : -0.01));
    for (const auto& fit : {fit_linear(curve), fit_power(curve)}) {
        double sse = 0, tss = 0, mean_y = 0;
        for (auto& [x, y] : curve) mean_y += y;
        mean_y /= curve.size();
        std::vector<double> sq;
        for (auto& [x, y] : curve) {
            const double r = y - eval(fit.form, x);
            sse += r * r;
            sq.push_back(r * r);
            tss += (y - mean_y) * (y - mean_y);
        }
        CHECK(fit.sse == doctest::Approx(sse).epsilon(1e-10));
        CHECK(fit.mean_sq_resid == doctest::Approx(sse / curve.size()).epsilon(1e-10));
        double var = 0;
        for (double s : sq) var += (s - sse / sq.size()) * (s - sse / sq.size());
        CHECK(fit.std_sq_resid ==
              doctest::Approx(std::sqrt(var / sq.size())).epsilon(1e-10));
        CHECK(fit.r_squared == doctest::Approx(1.0 - sse / tss).epsilon(1e-12));
    }
}

TEST_CASE("compare_fits on published-style diagnostics") {
    // numbers from a reference residual table: power wins every metric
    FitResult lin, pw;
    lin.form = ImpactForm::linear(-0.00095984, 0.00209078);
    lin.sse = 0.0000590;
    lin.mean_sq_resid = 0.0000012;
    lin.std_sq_resid = 0.0000022;
    lin.r_squared = 0.990627;
    pw.form = ImpactForm::power(-0.0011318, 0.97757467, 0.01148375);
    pw.sse = 0.0000162;
    pw.mean_sq_resid = 0.0000003;
    pw.std_sq_resid = 0.0000006;
    pw.r_squared = 0.997424;

    const auto cmp = compare_fits(lin, pw);
    CHECK(cmp.sse.winner == 1);
    CHECK(cmp.mean_sq_resid.winner == 1);
    CHECK(cmp.std_sq_resid.winner == 1);
    CHECK(cmp.r_squared.winner == 1);
    CHECK(cmp.sse.linear == 0.0000590);
    CHECK(cmp.sse.power == 0.0000162);

    // ties
    const auto tie = compare_fits(lin, lin);
    CHECK(tie.sse.winner == 0);
    CHECK(tie.r_squared.winner == 0);

    // mismatched tags
    FitResult other = pw;
    other.target = Target::PPI;
    CHECK_THROWS_AS(compare_fits(lin, other), std::domain_error);
}

TEST_CASE("realized_volatility") {
    CHECK(realized_volatility({100.0, 100.0, 100.0}) == 0.0);
    CHECK(realized_volatility({100.0, 100.0 * std::exp(0.01)}) ==
          doctest::Approx(0.01).epsilon(1e-12));
    // sqrt of summed squared log returns
    const std::vector<double> s = {100.0, 101.0, 99.5, 100.2};
    double acc = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double r = std::log(s[i] / s[i - 1]);
        acc += r * r;
    }
    CHECK(realized_volatility(s) == doctest::Approx(std::sqrt(acc)).epsilon(1e-14));
    CHECK_THROWS_AS(realized_volatility({100.0}), std::domain_error);
    CHECK_THROWS_AS(realized_volatility({100.0, -1.0}), std::domain_error);
}

TEST_CASE("average_spread") {
    SyntheticBookConfig cfg;
    cfg.spread = 0.1;
    cfg.depth = 5;
    const auto series = make_series(cfg, 4);
    CHECK(average_spread(series) == doctest::Approx(0.1).epsilon(1e-12));

    LobSnapshot a, b;
    a.bids = {{100.0, 1.0}};
    a.asks = {{100.1, 1.0}};
    b.bids = {{100.0, 1.0}};
    b.asks = {{100.3, 1.0}};
    CHECK(average_spread({a, b}) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK_THROWS_AS(average_spread({}), std::domain_error);
}

TEST_CASE("to_solver_form from a fit keeps exponent, flips the rest") {
    FitResult fit;
    fit.form = ImpactForm::power(-0.0011318, 0.97757467, 0.01148375);
    const auto conv = to_solver_form(fit);
    CHECK(conv.p0 == 0.0011318);
    CHECK(conv.p1 == 0.97757467);
    CHECK(conv.p2 == -0.01148375);
}

TEST_CASE("curve_points drops empty samples and picks the target") {
    std::vector<ImpactSample> curve(3);
    curve[0] = {1.0, 5.0, -0.1, -0.2, 10, 0};
    curve[1] = {2.0, 10.0, -0.3, -0.4, 7, 3};
    curve[2] = {3.0, 15.0, 0.0, 0.0, 0, 10};  // infeasible everywhere
    const auto tpi = curve_points(curve, Target::TPI);
    const auto ppi = curve_points(curve, Target::PPI);
    REQUIRE(tpi.size() == 2);
    CHECK(tpi[0] == ImpactPoint{1.0, -0.1});
    CHECK(tpi[1] == ImpactPoint{2.0, -0.3});
    CHECK(ppi[1] == ImpactPoint{2.0, -0.4});
}

TEST_CASE("exponent regimes on the synthetic growing book") {
    SyntheticBookConfig cfg;
    cfg.level_qty = 150.0;
    cfg.growth_start = 40;
    cfg.growth = 1.0;
    cfg.depth = 140;
    cfg.tick = 0.01;
    cfg.best_bid = 100.0;
    const auto series = make_series(cfg, 3);
    const double tau = cfg.tau;

    auto exponent_for = [&](double nu_max) {
        const auto volumes = volume_ladder(nu_max, tau, 50);
        const auto curve = impact_curve(series, volumes, tau);
        const auto pts = curve_points(curve, Target::TPI);
        REQUIRE(pts.size() >= 3);
        return fit_power(pts).form.p1;
    };

    CHECK(exponent_for(50.0) > 1.0);      // shallow walk: convex staircase
    CHECK(exponent_for(7000.0) < 1.0);    // deep walk into the growing tail
    const double mid = exponent_for(1200.0);
    CHECK(mid > 0.9);
    CHECK(mid < 1.1);
}
