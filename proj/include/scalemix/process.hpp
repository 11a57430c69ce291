#pragma once

#include <cstdint>
#include <vector>

#include "scalemix/ensemble.hpp"
#include "scalemix/mixture.hpp"
#include "scalemix/random.hpp"

namespace scalemix {

// Per-step volatility scale a_i = sqrt(i^2D - (i-1)^2D). The partial sums
// telescope: a_1^2 + ... + a_t^2 = t^2D.
double increment_scale(double D, int i);

std::vector<double> increment_scales(double D, int n);

// Self-similar mixture process: one volatility draw per history, then
// independent centered Gaussians with standard deviations a_i * sigma.
class ProcessModel {
 public:
  ProcessModel(double scaling_exponent, MixtureDensity mixture, int horizon);

  double scaling_exponent() const { return d_; }
  const MixtureDensity& mixture() const { return mixture_; }
  int horizon() const { return horizon_; }
  const std::vector<double>& scales() const { return scales_; }

 private:
  double d_;
  MixtureDensity mixture_;
  int horizon_;
  std::vector<double> scales_;  // a_1 .. a_n
};

struct Path {
  std::vector<double> returns;  // r_1 .. r_n
};

Path simulate_history(const ProcessModel& model, RandomStream& rng);

// M independent histories. History l draws from the substream
// substream_seed(seed, l, kHistoryStreamSalt), so the result depends only on
// (model, M, seed) regardless of the thread count.
Ensemble simulate_ensemble(const ProcessModel& model, int histories,
                           std::uint64_t seed, int threads = 1);

// r(t, T) = sum of elementary returns over (t-T, t].
double aggregate_return(const Path& path, int t, int T);

}  // namespace scalemix
