#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "scalemix/ensemble.hpp"
#include "scalemix/process.hpp"

namespace scalemix {

enum class CurveKind { kappa, vol_autocorr, K, linear };

std::string curve_kind_name(CurveKind kind);

// Labeled correlator series. Points are indexed by n (idx1, idx2 unused) or
// by (t1, t2) for aggregated-return correlators. Error bars are attached for
// every point or not at all.
struct CurvePoint {
  int idx1 = 0;
  int idx2 = 0;
  double value = 0.0;
};

struct CorrelatorCurve {
  CurveKind kind = CurveKind::kappa;
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<CurvePoint> points;
  std::vector<double> errors;  // empty, or one entry per point
  std::string source;          // "empirical" or "theory"
};

struct CollapseEntry {
  int t = 0;
  int T = 0;
  std::vector<double> bin_centers;
  std::vector<double> density;  // rescaled, normalized by total histories
};

struct CollapsePlotData {
  std::vector<CollapseEntry> entries;
};

// Subtracts each column's ensemble mean. Idempotent: an ensemble already
// flagged as detrended is returned unchanged.
Ensemble detrend(const Ensemble& e);

// (1/M) sum_l |r^l(t, t)|^alpha, the nonlinear moment of the total return.
double emp_moment(const Ensemble& e, int t, double alpha);

// Per-column mean of squared elementary returns, length horizon.
std::vector<double> emp_increment_second_moment(const Ensemble& e);

// (1/M) sum_l r_1 r_n / sqrt(m2(1) m2(n)).
double emp_linear_corr(const Ensemble& e, int n);

// M sum(|r_1|^a |r_n|^b) / (sum|r_1|^a sum|r_n|^b); tends to 1 under
// independence.
double emp_kappa(const Ensemble& e, double alpha, double beta, int n);

// Sample correlation-style ratio of |r_1|, |r_n|: covariance over the
// variance of |r_1|.
double emp_vol_autocorr(const Ensemble& e, int n);

// Aggregated-return analogue of emp_kappa on r(t1, t1), r(t2, t2).
double emp_K(const Ensemble& e, double alpha, double beta, int t1, int t2);

struct DEstimate {
  double D = 0.0;
  double std_error = 0.0;  // population SD of the per-alpha estimates
  std::vector<std::pair<double, double>> per_alpha;  // (alpha, slope/alpha)
};

// Log-log regression of emp_moment(t, alpha) against t over t = 1..n for
// each alpha; the scaling exponent is the mean of slope/alpha.
DEstimate estimate_D(const Ensemble& e, const std::vector<double>& alphas);

// Histograms of r(t, T) / s with s = sqrt(t^2D - (t-T)^2D), binned uniformly
// over +-5 sample standard deviations and normalized as a density over the
// full ensemble (out-of-range mass is not redistributed).
CollapsePlotData collapse(const Ensemble& e, double D,
                          const std::vector<std::pair<int, int>>& spec,
                          int bins);

// Error-bar rule for near-constant curves: the population standard deviation
// of the point values, attached uniformly. Returns the value.
double kappa_error_bars(CorrelatorCurve& curve);

// Descriptor for a statistic evaluated pointwise on an ensemble.
struct StatisticSpec {
  CurveKind kind = CurveKind::kappa;
  double alpha = 1.0;
  double beta = 1.0;
  std::vector<std::pair<int, int>> points;  // (n, 0) or (t1, t2)
};

std::vector<double> evaluate_statistic(const Ensemble& e,
                                       const StatisticSpec& spec);

// Parametric bootstrap: simulates `reps` ensembles from the model (detrended
// like the real pipeline), evaluates the statistic on each, and returns the
// per-point population standard deviation. Replicate r uses the seed
// substream_seed(seed, r, kBootstrapStreamSalt).
std::vector<double> bootstrap_error_bars(const ProcessModel& model, int histories,
                                         int reps, const StatisticSpec& spec,
                                         std::uint64_t seed, int threads = 1);

// Same, with explicit per-replicate seeds.
std::vector<double> bootstrap_error_bars(const ProcessModel& model, int histories,
                                         const std::vector<std::uint64_t>& seeds,
                                         const StatisticSpec& spec,
                                         int threads = 1);

// Evaluates several statistics on one shared set of replicate ensembles;
// returns one error vector per spec, in order.
std::vector<std::vector<double>> bootstrap_error_bars_multi(
    const ProcessModel& model, int histories, int reps,
    const std::vector<StatisticSpec>& specs, std::uint64_t seed,
    int threads = 1);

}  // namespace scalemix
