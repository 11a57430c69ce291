#include "scalemix/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "scalemix/scalefn.hpp"

namespace scalemix {

namespace {

double population_sd(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / n);
}

void check_lag(const Ensemble& e, int n, const char* op) {
  if (n < 2 || n > e.horizon()) {
    throw IndexOutOfRange(std::string(op) + ": requires 2 <= n <= horizon");
  }
}

}  // namespace

std::string curve_kind_name(CurveKind kind) {
  switch (kind) {
    case CurveKind::kappa: return "kappa";
    case CurveKind::vol_autocorr: return "vol_autocorr";
    case CurveKind::K: return "K";
    case CurveKind::linear: return "linear";
  }
  return "unknown";
}

Ensemble detrend(const Ensemble& e) {
  if (e.detrended()) return e;
  Ensemble out = e;
  const double m = static_cast<double>(e.histories());
  for (int t = 1; t <= e.horizon(); ++t) {
    double mean = 0.0;
    for (int l = 0; l < e.histories(); ++l) mean += e.ret(l, t);
    mean /= m;
    for (int l = 0; l < e.histories(); ++l) out.ret(l, t) = e.ret(l, t) - mean;
  }
  out.set_detrended(true);
  return out;
}

double emp_moment(const Ensemble& e, int t, double alpha) {
  if (t < 1 || t > e.horizon()) {
    throw IndexOutOfRange("emp_moment: requires 1 <= t <= horizon");
  }
  if (!(alpha > 0.0)) throw InvalidParameter("emp_moment: requires alpha > 0");
  double sum = 0.0;
  for (int l = 0; l < e.histories(); ++l) {
    sum += std::pow(std::abs(e.aggregate(l, t, t)), alpha);
  }
  return sum / e.histories();
}

std::vector<double> emp_increment_second_moment(const Ensemble& e) {
  std::vector<double> out(e.horizon(), 0.0);
  for (int t = 1; t <= e.horizon(); ++t) {
    double sum = 0.0;
    for (int l = 0; l < e.histories(); ++l) {
      const double r = e.ret(l, t);
      sum += r * r;
    }
    out[t - 1] = sum / e.histories();
  }
  return out;
}

double emp_linear_corr(const Ensemble& e, int n) {
  check_lag(e, n, "emp_linear_corr");
  const double m = static_cast<double>(e.histories());
  double cross = 0.0, sq1 = 0.0, sqn = 0.0;
  for (int l = 0; l < e.histories(); ++l) {
    const double r1 = e.ret(l, 1);
    const double rn = e.ret(l, n);
    cross += r1 * rn;
    sq1 += r1 * r1;
    sqn += rn * rn;
  }
  if (sq1 == 0.0 || sqn == 0.0) {
    throw DegenerateVariance("emp_linear_corr: a column is identically zero");
  }
  return (cross / m) / std::sqrt((sq1 / m) * (sqn / m));
}

double emp_kappa(const Ensemble& e, double alpha, double beta, int n) {
  check_lag(e, n, "emp_kappa");
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw InvalidParameter("emp_kappa: requires alpha, beta > 0");
  }
  double su = 0.0, sv = 0.0, suv = 0.0;
  for (int l = 0; l < e.histories(); ++l) {
    const double u = std::pow(std::abs(e.ret(l, 1)), alpha);
    const double v = std::pow(std::abs(e.ret(l, n)), beta);
    su += u;
    sv += v;
    suv += u * v;
  }
  if (su == 0.0 || sv == 0.0) {
    throw ZeroDenominator("emp_kappa: an absolute-moment sum vanishes");
  }
  return e.histories() * suv / (su * sv);
}

double emp_vol_autocorr(const Ensemble& e, int n) {
  check_lag(e, n, "emp_vol_autocorr");
  const double m = static_cast<double>(e.histories());
  double su = 0.0, sv = 0.0, suv = 0.0, suu = 0.0;
  for (int l = 0; l < e.histories(); ++l) {
    const double u = std::abs(e.ret(l, 1));
    const double v = std::abs(e.ret(l, n));
    su += u;
    sv += v;
    suv += u * v;
    suu += u * u;
  }
  const double denom = suu - su * su / m;
  if (denom == 0.0) {
    throw DegenerateVariance("emp_vol_autocorr: |r_1| has zero variance");
  }
  return (suv - su * sv / m) / denom;
}

double emp_K(const Ensemble& e, double alpha, double beta, int t1, int t2) {
  if (t1 < 1 || t2 < t1 || t2 > e.horizon()) {
    throw IndexOutOfRange("emp_K: requires 1 <= t1 <= t2 <= horizon");
  }
  if (!(alpha >= 0.0) || !(beta >= 0.0)) {
    throw InvalidParameter("emp_K: requires alpha, beta >= 0");
  }
  double su = 0.0, sv = 0.0, suv = 0.0;
  for (int l = 0; l < e.histories(); ++l) {
    const double u = std::pow(std::abs(e.aggregate(l, t1, t1)), alpha);
    const double v = std::pow(std::abs(e.aggregate(l, t2, t2)), beta);
    su += u;
    sv += v;
    suv += u * v;
  }
  if (su == 0.0 || sv == 0.0) {
    throw ZeroDenominator("emp_K: an absolute-moment sum vanishes");
  }
  return e.histories() * suv / (su * sv);
}

DEstimate estimate_D(const Ensemble& e, const std::vector<double>& alphas) {
  if (alphas.size() < 2) {
    throw InsufficientData("estimate_D: needs at least 2 exponents");
  }
  if (e.horizon() < 3) {
    throw InsufficientData("estimate_D: needs horizon >= 3");
  }
  if (e.histories() < 2) {
    throw InsufficientData("estimate_D: needs at least 2 histories");
  }
  const int n = e.horizon();
  std::vector<double> log_t(n);
  for (int t = 1; t <= n; ++t) log_t[t - 1] = std::log(static_cast<double>(t));
  double xbar = 0.0;
  for (double x : log_t) xbar += x;
  xbar /= n;
  double sxx = 0.0;
  for (double x : log_t) sxx += (x - xbar) * (x - xbar);

  DEstimate est;
  std::vector<double> d_values;
  for (double alpha : alphas) {
    std::vector<double> log_m(n);
    for (int t = 1; t <= n; ++t) {
      const double m = emp_moment(e, t, alpha);
      if (!(m > 0.0) || !std::isfinite(m)) {
        throw InsufficientData("estimate_D: non-positive moment at t=" +
                               std::to_string(t));
      }
      log_m[t - 1] = std::log(m);
    }
    double ybar = 0.0;
    for (double y : log_m) ybar += y;
    ybar /= n;
    double sxy = 0.0;
    for (int t = 0; t < n; ++t) sxy += (log_t[t] - xbar) * (log_m[t] - ybar);
    const double d_alpha = sxy / sxx / alpha;
    est.per_alpha.emplace_back(alpha, d_alpha);
    d_values.push_back(d_alpha);
  }
  double mean = 0.0;
  for (double d : d_values) mean += d;
  est.D = mean / d_values.size();
  est.std_error = population_sd(d_values);
  return est;
}

CollapsePlotData collapse(const Ensemble& e, double D,
                          const std::vector<std::pair<int, int>>& spec,
                          int bins) {
  if (bins < 10) throw InvalidParameter("collapse: requires bins >= 10");
  CollapsePlotData out;
  const int m = e.histories();
  for (const auto& [t, T] : spec) {
    const double s = return_scale(D, t, T);
    if (t > e.horizon()) {
      throw IndexOutOfRange("collapse: t exceeds the ensemble horizon");
    }
    std::vector<double> x(m);
    for (int l = 0; l < m; ++l) x[l] = e.aggregate(l, t, T) / s;
    const double sd = population_sd(x);
    if (sd == 0.0) {
      throw DegenerateVariance("collapse: rescaled returns are constant");
    }
    const double lo = -5.0 * sd;
    const double width = 10.0 * sd / bins;
    CollapseEntry entry;
    entry.t = t;
    entry.T = T;
    entry.bin_centers.resize(bins);
    entry.density.assign(bins, 0.0);
    for (int b = 0; b < bins; ++b) entry.bin_centers[b] = lo + (b + 0.5) * width;
    for (double v : x) {
      const int b = static_cast<int>(std::floor((v - lo) / width));
      if (b >= 0 && b < bins) entry.density[b] += 1.0;
    }
    for (double& dpt : entry.density) dpt /= m * width;
    out.entries.push_back(std::move(entry));
  }
  return out;
}

double kappa_error_bars(CorrelatorCurve& curve) {
  if (curve.kind != CurveKind::kappa) {
    throw InvalidParameter("kappa_error_bars: curve must be a kappa curve");
  }
  if (curve.points.size() < 2) {
    throw InsufficientData("kappa_error_bars: needs at least 2 points");
  }
  std::vector<double> values;
  values.reserve(curve.points.size());
  for (const auto& p : curve.points) values.push_back(p.value);
  const double err = population_sd(values);
  curve.errors.assign(curve.points.size(), err);
  return err;
}

std::vector<double> evaluate_statistic(const Ensemble& e,
                                       const StatisticSpec& spec) {
  std::vector<double> out;
  out.reserve(spec.points.size());
  for (const auto& [i1, i2] : spec.points) {
    switch (spec.kind) {
      case CurveKind::kappa:
        out.push_back(emp_kappa(e, spec.alpha, spec.beta, i1));
        break;
      case CurveKind::vol_autocorr:
        out.push_back(emp_vol_autocorr(e, i1));
        break;
      case CurveKind::linear:
        out.push_back(emp_linear_corr(e, i1));
        break;
      case CurveKind::K:
        out.push_back(emp_K(e, spec.alpha, spec.beta, i1, i2));
        break;
    }
  }
  return out;
}

namespace {

std::vector<std::vector<double>> bootstrap_multi_impl(
    const ProcessModel& model, int histories,
    const std::vector<std::uint64_t>& seeds,
    const std::vector<StatisticSpec>& specs, int threads) {
  if (seeds.size() < 2) {
    throw InvalidParameter("bootstrap_error_bars: requires reps >= 2");
  }
  const int reps = static_cast<int>(seeds.size());
  // values[r] holds the concatenated statistic values of replicate r.
  std::vector<std::vector<double>> values(reps);
  auto run_range = [&](int lo, int hi) {
    for (int r = lo; r < hi; ++r) {
      const Ensemble e =
          detrend(simulate_ensemble(model, histories, seeds[r], 1));
      for (const StatisticSpec& spec : specs) {
        const std::vector<double> v = evaluate_statistic(e, spec);
        values[r].insert(values[r].end(), v.begin(), v.end());
      }
    }
  };
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, reps));
  if (threads == 1) {
    run_range(0, reps);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (reps + threads - 1) / threads;
    for (int k = 0; k < threads; ++k) {
      const int lo = k * chunk;
      const int hi = std::min(reps, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  std::vector<std::vector<double>> out;
  std::vector<double> column(reps);
  std::size_t offset = 0;
  for (const StatisticSpec& spec : specs) {
    std::vector<double> errs(spec.points.size(), 0.0);
    for (std::size_t p = 0; p < spec.points.size(); ++p) {
      for (int r = 0; r < reps; ++r) column[r] = values[r][offset + p];
      errs[p] = population_sd(column);
    }
    offset += spec.points.size();
    out.push_back(std::move(errs));
  }
  return out;
}

std::vector<std::uint64_t> replicate_seeds(std::uint64_t seed, int reps) {
  std::vector<std::uint64_t> seeds(reps);
  for (int r = 0; r < reps; ++r) {
    seeds[r] = substream_seed(seed, static_cast<std::uint64_t>(r),
                              kBootstrapStreamSalt);
  }
  return seeds;
}

}  // namespace

std::vector<double> bootstrap_error_bars(const ProcessModel& model,
                                         int histories,
                                         const std::vector<std::uint64_t>& seeds,
                                         const StatisticSpec& spec,
                                         int threads) {
  return bootstrap_multi_impl(model, histories, seeds, {spec}, threads)[0];
}

std::vector<double> bootstrap_error_bars(const ProcessModel& model,
                                         int histories, int reps,
                                         const StatisticSpec& spec,
                                         std::uint64_t seed, int threads) {
  if (reps < 2) {
    throw InvalidParameter("bootstrap_error_bars: requires reps >= 2");
  }
  return bootstrap_error_bars(model, histories, replicate_seeds(seed, reps),
                              spec, threads);
}

std::vector<std::vector<double>> bootstrap_error_bars_multi(
    const ProcessModel& model, int histories, int reps,
    const std::vector<StatisticSpec>& specs, std::uint64_t seed, int threads) {
  if (reps < 2) {
    throw InvalidParameter("bootstrap_error_bars: requires reps >= 2");
  }
  return bootstrap_multi_impl(model, histories, replicate_seeds(seed, reps),
                              specs, threads);
}

}  // namespace scalemix
