#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "scalemix/estimators.hpp"
#include "scalemix/scalefn.hpp"
#include "scalemix/theory.hpp"

using namespace scalemix;

namespace {

Ensemble small_ensemble(const std::vector<std::vector<double>>& rows) {
  Ensemble e(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int l = 0; l < e.histories(); ++l) {
    for (int t = 1; t <= e.horizon(); ++t) e.ret(l, t) = rows[l][t - 1];
  }
  return e;
}

ProcessModel heavy_model(double D = 0.358) {
  return ProcessModel(D, MixtureDensity::power_law(1.0, 9.0, 1.0, 0.0), 17);
}

ProcessModel gaussian_model() {
  return ProcessModel(0.5, MixtureDensity::degenerate(1.0), 17);
}

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("detrend") {
  Ensemble e = small_ensemble({{1.0, 5.0}, {2.0, 5.0}, {3.0, 5.0}});
  Ensemble d = detrend(e);
  CHECK(d.ret(0, 1) == -1.0);
  CHECK(d.ret(1, 1) == 0.0);
  CHECK(d.ret(2, 1) == 1.0);
  CHECK(d.ret(0, 2) == 0.0);
  CHECK(d.detrended());

  // Column means vanish relative to the column spread.
  for (int t = 1; t <= d.horizon(); ++t) {
    double mean = 0, var = 0;
    for (int l = 0; l < d.histories(); ++l) mean += d.ret(l, t);
    mean /= d.histories();
    for (int l = 0; l < d.histories(); ++l) {
      var += (d.ret(l, t) - mean) * (d.ret(l, t) - mean);
    }
    const double sd = std::sqrt(var / d.histories());
    CHECK(std::abs(mean) <= 1e-12 * std::max(sd, 1.0));
  }

  // Idempotence is exact.
  Ensemble dd = detrend(d);
  CHECK(dd.data() == d.data());

  // A column that is already centered is unchanged.
  Ensemble z = small_ensemble({{-1.0, 0.5}, {1.0, -0.5}});
  Ensemble zd = detrend(z);
  CHECK(zd.data() == z.data());
}

TEST_CASE("emp_moment basics") {
  Ensemble e = small_ensemble({{0.1, -0.1}});
  CHECK(emp_moment(e, 2, 2.0) == 0.0);
  CHECK(emp_moment(e, 1, 2.0) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK_THROWS_AS(emp_moment(e, 3, 2.0), IndexOutOfRange);
  CHECK_THROWS_AS(emp_moment(e, 1, 0.0), InvalidParameter);
}

TEST_CASE("emp_moment matches the diffusive expectation") {
  const Ensemble e = simulate_ensemble(gaussian_model(), 100000, 11, 2);
  // Var of r(4,4) is 4; E|r|^2 estimated within 3 SE.
  double s = 0, ss = 0;
  for (int l = 0; l < e.histories(); ++l) {
    const double v = std::pow(e.aggregate(l, 4, 4), 2.0);
    s += v;
    ss += v * v;
  }
  const double mean = s / e.histories();
  const double se = std::sqrt((ss / e.histories() - mean * mean) / e.histories());
  CHECK(emp_moment(e, 4, 2.0) == doctest::Approx(mean));
  CHECK(std::abs(mean - 4.0) < 3.0 * se);
}

TEST_CASE("emp_increment_second_moment") {
  Ensemble zeros = small_ensemble({{0.0, 0.0, 0.0}});
  const auto z = emp_increment_second_moment(zeros);
  CHECK(z == std::vector<double>{0.0, 0.0, 0.0});

  const Ensemble e = simulate_ensemble(gaussian_model(), 20000, 3, 2);
  for (double v : emp_increment_second_moment(e)) {
    CHECK(v == doctest::Approx(1.0).epsilon(0.05));  // flat for D = 1/2
  }
}

TEST_CASE("emp_linear_corr rigged cases") {
  Ensemble same = small_ensemble({{1.0, 1.0}, {-2.0, -2.0}, {0.5, 0.5}});
  CHECK(emp_linear_corr(same, 2) == doctest::Approx(1.0).epsilon(1e-12));
  Ensemble anti = small_ensemble({{1.0, -1.0}, {-2.0, 2.0}, {0.5, -0.5}});
  CHECK(emp_linear_corr(anti, 2) == doctest::Approx(-1.0).epsilon(1e-12));
  Ensemble flat = small_ensemble({{0.0, 1.0}, {0.0, -1.0}});
  CHECK_THROWS_AS(emp_linear_corr(flat, 2), DegenerateVariance);
  CHECK_THROWS_AS(emp_linear_corr(same, 1), IndexOutOfRange);
  CHECK_THROWS_AS(emp_linear_corr(same, 3), IndexOutOfRange);
}

TEST_CASE("linear correlation vanishes for the model") {
  const Ensemble e = detrend(simulate_ensemble(heavy_model(), 100000, 17, 2));
  for (int n : {2, 9, 17}) {
    CHECK(std::abs(emp_linear_corr(e, n)) < 3.0 / std::sqrt(100000.0));
  }
}

TEST_CASE("emp_kappa rigged cases") {
  Ensemble mirrored = small_ensemble({{1.0, -1.0}, {-2.0, 2.0}, {0.5, -0.5}});
  // |r_n| == |r_1| gives <r^2> / <|r|>^2 >= 1.
  const double k = emp_kappa(mirrored, 1.0, 1.0, 2);
  double su = (1.0 + 2.0 + 0.5) / 3.0;
  double suv = (1.0 + 4.0 + 0.25) / 3.0;
  CHECK(k == doctest::Approx(suv / (su * su)).epsilon(1e-12));
  CHECK(k >= 1.0);

  Ensemble zeros = small_ensemble({{0.0, 1.0}});
  CHECK_THROWS_AS(emp_kappa(zeros, 1.0, 1.0, 2), ZeroDenominator);
  CHECK_THROWS_AS(emp_kappa(mirrored, 0.0, 1.0, 2), InvalidParameter);
}

TEST_CASE("emp_kappa near one under independence") {
  const Ensemble e = detrend(simulate_ensemble(gaussian_model(), 100000, 23, 2));
  for (int n : {2, 10, 17}) {
    CHECK(emp_kappa(e, 1.0, 1.0, n) == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("emp_kappa matches theory on model data") {
  const ProcessModel model = heavy_model();
  const Ensemble e = detrend(simulate_ensemble(model, 100000, 29, 2));
  StatisticSpec spec{CurveKind::kappa, 1.0, 1.0, {{2, 0}, {9, 0}, {17, 0}}};
  const auto errs = bootstrap_error_bars(model, 100000, 48, spec, 30, 2);
  const auto emp = evaluate_statistic(e, spec);
  const double th = theory::kappa(model.mixture(), 1.0, 1.0);
  for (std::size_t j = 0; j < emp.size(); ++j) {
    CHECK(std::abs(emp[j] - th) < 3.0 * errs[j]);
  }
}

TEST_CASE("emp_vol_autocorr rigged cases") {
  Ensemble mirrored = small_ensemble({{1.0, -1.0}, {-2.0, 2.0}, {0.5, -0.5}});
  CHECK(emp_vol_autocorr(mirrored, 2) == doctest::Approx(1.0).epsilon(1e-12));
  Ensemble flat = small_ensemble({{1.0, 1.0}, {-1.0, 2.0}});
  CHECK_THROWS_AS(emp_vol_autocorr(flat, 2), DegenerateVariance);
}

TEST_CASE("emp_vol_autocorr near zero under independence") {
  const Ensemble e = detrend(simulate_ensemble(gaussian_model(), 100000, 37, 2));
  for (int n : {2, 10, 17}) {
    CHECK(std::abs(emp_vol_autocorr(e, n)) < 0.015);
  }
}

TEST_CASE("emp_K basics") {
  Ensemble e = small_ensemble({{0.1, 0.2, -0.3}, {-0.2, 0.1, 0.4}});
  CHECK(emp_K(e, 0.0, 1.0, 1, 3) == 1.0);
  CHECK(emp_K(e, 1.0, 0.0, 2, 3) == 1.0);
  CHECK_THROWS_AS(emp_K(e, 1.0, 1.0, 3, 2), IndexOutOfRange);
  Ensemble zeros = small_ensemble({{0.0, 1.0}});
  CHECK_THROWS_AS(emp_K(zeros, 1.0, 1.0, 1, 2), ZeroDenominator);
}

TEST_CASE("emp_K at t1 == t2 equals the B-scaled same-variable ratio") {
  const ProcessModel model = heavy_model();
  const Ensemble e = detrend(simulate_ensemble(model, 100000, 43, 2));
  StatisticSpec spec{CurveKind::K, 1.0, 1.0, {{5, 5}}};
  const auto errs = bootstrap_error_bars(model, 100000, 48, spec, 44, 2);
  const double th = theory::K(model, 1.0, 1.0, 5, 5);
  const double gauss_factor = theory::b_alpha(2.0) / std::pow(theory::b_alpha(1.0), 2);
  CHECK(th == doctest::Approx(gauss_factor *
                              theory::kappa(model.mixture(), 1.0, 1.0))
                  .epsilon(1e-8));
  CHECK(std::abs(emp_K(e, 1.0, 1.0, 5, 5) - th) < 3.0 * errs[0]);
}

TEST_CASE("estimate_D on gaussian data") {
  const Ensemble e = detrend(simulate_ensemble(gaussian_model(), 10000, 53, 2));
  const DEstimate est = estimate_D(e, {0.5, 1.0, 1.5, 2.0});
  CHECK(std::abs(est.D - 0.5) < 0.02);
  REQUIRE(est.per_alpha.size() == 4);
  for (const auto& [a, d] : est.per_alpha) {
    CHECK(std::abs(d - est.D) <= 3.0 * std::max(est.std_error, 1e-12));
  }
}

TEST_CASE("estimate_D on anomalous data") {
  const Ensemble e = detrend(simulate_ensemble(heavy_model(0.36), 10000, 59, 2));
  const DEstimate est = estimate_D(e, {0.5, 1.0, 1.5, 2.0});
  CHECK(std::abs(est.D - 0.36) < 0.02);
}

TEST_CASE("estimate_D preconditions") {
  const Ensemble e = detrend(simulate_ensemble(gaussian_model(), 100, 1, 1));
  CHECK_THROWS_AS(estimate_D(e, {1.0}), InsufficientData);
  Ensemble one = small_ensemble({{0.1, 0.2, 0.3, 0.4}});
  CHECK_THROWS_AS(estimate_D(one, {0.5, 1.0}), InsufficientData);
  Ensemble narrow = small_ensemble({{0.1, 0.2}, {0.3, 0.1}});
  CHECK_THROWS_AS(estimate_D(narrow, {0.5, 1.0}), InsufficientData);
}

TEST_CASE("collapse identity entry and invariances") {
  const Ensemble e = detrend(simulate_ensemble(gaussian_model(), 20000, 61, 2));
  const CollapsePlotData data = collapse(e, 0.5, {{1, 1}}, 20);
  REQUIRE(data.entries.size() == 1);
  // s = 1 for (1,1): the histogram is of the raw first column.
  const auto& entry = data.entries[0];
  double mass = 0;
  const double width = entry.bin_centers[1] - entry.bin_centers[0];
  for (double dns : entry.density) {
    CHECK(dns >= 0.0);
    mass += dns * width;
  }
  CHECK(mass <= 1.0 + 1e-12);
  CHECK(mass > 0.95);

  CHECK_THROWS_AS(collapse(e, 0.5, {{1, 1}}, 9), InvalidParameter);
  CHECK_THROWS_AS(collapse(e, 0.5, {{18, 1}}, 20), IndexOutOfRange);
}

TEST_CASE("gaussian ensemble collapses onto one shape") {
  const Ensemble e = detrend(simulate_ensemble(gaussian_model(), 200000, 67, 2));
  const CollapsePlotData data =
      collapse(e, 0.5, {{1, 1}, {5, 5}, {17, 17}, {10, 1}}, 25);
  // Pairwise sup distance between rescaled histograms stays within the
  // pooled bin sampling noise.
  const double m = e.histories();
  for (std::size_t i = 0; i < data.entries.size(); ++i) {
    for (std::size_t j = i + 1; j < data.entries.size(); ++j) {
      const auto& a = data.entries[i];
      const auto& b = data.entries[j];
      const double wa = a.bin_centers[1] - a.bin_centers[0];
      for (std::size_t k = 0; k < a.density.size(); ++k) {
        const double pa = a.density[k] * wa;
        const double pb = b.density[k] * wa;
        const double se =
            std::sqrt(std::max(pa + pb, 1e-12) / (m * wa * wa)) / 1.0;
        CHECK(std::abs(a.density[k] - b.density[k]) < 5.0 * std::max(se, 1e-4));
      }
    }
  }
}

TEST_CASE("model ensemble collapses onto the scaling function") {
  const auto mix = MixtureDensity::power_law(1.0, 9.0, 1.0, 0.0);
  const ProcessModel model(0.358, mix, 17);
  const Ensemble e = detrend(simulate_ensemble(model, 100000, 71, 2));
  const CollapsePlotData data = collapse(e, 0.358, {{5, 5}, {17, 1}}, 31);
  for (const auto& entry : data.entries) {
    const double width = entry.bin_centers[1] - entry.bin_centers[0];
    for (std::size_t b = 0; b < entry.bin_centers.size(); ++b) {
      const double lo = entry.bin_centers[b] - 0.5 * width;
      const double p =
          integrate([&](double x) { return g_density(mix, x); }, lo, lo + width,
                    1e-8).value;
      const double expect = e.histories() * p;
      if (expect < 10.0) continue;
      const double observed = entry.density[b] * e.histories() * width;
      const double z = (observed - expect) / std::sqrt(expect * (1.0 - p));
      CHECK(std::abs(z) < 4.5);
    }
  }
}

TEST_CASE("collapse histories are order invariant") {
  const Ensemble e = detrend(simulate_ensemble(heavy_model(), 5000, 73, 2));
  Ensemble shuffled = e;
  std::vector<int> order(e.histories());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937 gen(3);
  std::shuffle(order.begin(), order.end(), gen);
  for (int l = 0; l < e.histories(); ++l) {
    for (int t = 1; t <= e.horizon(); ++t) {
      shuffled.ret(l, t) = e.ret(order[l], t);
    }
  }
  CHECK(emp_kappa(e, 1, 1, 9) == doctest::Approx(emp_kappa(shuffled, 1, 1, 9)).epsilon(1e-12));
  CHECK(emp_moment(e, 5, 1.5) == doctest::Approx(emp_moment(shuffled, 5, 1.5)).epsilon(1e-12));
  const auto ca = collapse(e, 0.358, {{5, 5}}, 15);
  const auto cb = collapse(shuffled, 0.358, {{5, 5}}, 15);
  for (std::size_t b = 0; b < ca.entries[0].density.size(); ++b) {
    CHECK(ca.entries[0].density[b] ==
          doctest::Approx(cb.entries[0].density[b]).epsilon(1e-9));
  }
}

TEST_CASE("kappa_error_bars conventions") {
  CorrelatorCurve flat;
  flat.kind = CurveKind::kappa;
  flat.points = {{2, 0, 1.3}, {3, 0, 1.3}, {4, 0, 1.3}};
  CHECK(kappa_error_bars(flat) == 0.0);
  CHECK(flat.errors == std::vector<double>(3, 0.0));

  CorrelatorCurve two;
  two.kind = CurveKind::kappa;
  two.points = {{2, 0, 1.0}, {3, 0, 3.0}};
  CHECK(kappa_error_bars(two) == 1.0);  // population convention

  CorrelatorCurve one;
  one.kind = CurveKind::kappa;
  one.points = {{2, 0, 1.0}};
  CHECK_THROWS_AS(kappa_error_bars(one), InsufficientData);
  CorrelatorCurve wrong;
  wrong.kind = CurveKind::linear;
  wrong.points = {{2, 0, 0.0}, {3, 0, 0.0}};
  CHECK_THROWS_AS(kappa_error_bars(wrong), InvalidParameter);
}

TEST_CASE("kappa_error_bars comparable to the parametric bootstrap") {
  const ProcessModel model = heavy_model();
  const Ensemble e = detrend(simulate_ensemble(model, 12820, 79, 2));
  CorrelatorCurve curve;
  curve.kind = CurveKind::kappa;
  curve.alpha = curve.beta = 1.0;
  std::vector<std::pair<int, int>> pts;
  for (int n = 2; n <= 17; ++n) {
    curve.points.push_back({n, 0, emp_kappa(e, 1, 1, n)});
    pts.emplace_back(n, 0);
  }
  const double err_const = kappa_error_bars(curve);
  const auto errs = bootstrap_error_bars(model, 12820, 120,
                                         {CurveKind::kappa, 1.0, 1.0, pts}, 80, 2);
  const double mean_se =
      std::accumulate(errs.begin(), errs.end(), 0.0) / errs.size();
  CHECK(err_const / mean_se > 0.5);
  CHECK(err_const / mean_se < 2.0);
}

TEST_CASE("bootstrap with identical replicate seeds is degenerate") {
  const ProcessModel model = gaussian_model();
  StatisticSpec spec{CurveKind::kappa, 1.0, 1.0, {{2, 0}, {5, 0}}};
  const auto errs =
      bootstrap_error_bars(model, 500, std::vector<std::uint64_t>{9, 9}, spec, 2);
  CHECK(errs == std::vector<double>{0.0, 0.0});
}

TEST_CASE("bootstrap errors shrink like one over sqrt M") {
  const ProcessModel model = heavy_model();
  StatisticSpec spec{CurveKind::vol_autocorr, 1, 1, {{2, 0}}};
  const auto e1 = bootstrap_error_bars(model, 1282, 100, spec, 83, 2);
  const auto e4 = bootstrap_error_bars(model, 4 * 1282, 100, spec, 84, 2);
  CHECK(e4[0] / e1[0] > 0.35);
  CHECK(e4[0] / e1[0] < 0.65);
}

TEST_CASE("bootstrap errors bracket zero linear correlation") {
  const ProcessModel model = heavy_model();
  const Ensemble e = detrend(simulate_ensemble(model, 12820, 87, 2));
  std::vector<std::pair<int, int>> pts;
  for (int n = 2; n <= 17; ++n) pts.emplace_back(n, 0);
  StatisticSpec spec{CurveKind::linear, 1.0, 1.0, pts};
  const auto errs = bootstrap_error_bars(model, 12820, 100, spec, 88, 2);
  const auto emp = evaluate_statistic(e, spec);
  for (std::size_t j = 0; j < emp.size(); ++j) {
    CHECK(std::abs(emp[j]) < 3.0 * errs[j]);
  }
}

TEST_CASE("bootstrap validates reps") {
  const ProcessModel model = gaussian_model();
  StatisticSpec spec{CurveKind::kappa, 1.0, 1.0, {{2, 0}}};
  CHECK_THROWS_AS(bootstrap_error_bars(model, 100, 1, spec, 1, 1),
                  InvalidParameter);
}

TEST_CASE("multi-statistic bootstrap matches single runs") {
  const ProcessModel model = gaussian_model();
  StatisticSpec s1{CurveKind::kappa, 1.0, 1.0, {{2, 0}, {5, 0}}};
  StatisticSpec s2{CurveKind::vol_autocorr, 1.0, 1.0, {{3, 0}}};
  const auto multi = bootstrap_error_bars_multi(model, 2000, 24, {s1, s2}, 91, 2);
  const auto single1 = bootstrap_error_bars(model, 2000, 24, s1, 91, 2);
  const auto single2 = bootstrap_error_bars(model, 2000, 24, s2, 91, 2);
  CHECK(multi[0] == single1);
  CHECK(multi[1] == single2);
}

}  // TEST_SUITE
