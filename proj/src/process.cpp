#include "scalemix/process.hpp"

#include <cmath>
#include <thread>

namespace scalemix {

double increment_scale(double D, int i) {
  if (!(D > 0.0 && D < 1.0)) {
    throw InvalidParameter("increment_scale: requires 0 < D < 1");
  }
  if (i < 1) throw InvalidParameter("increment_scale: requires i >= 1");
  return std::sqrt(std::pow(i, 2.0 * D) - std::pow(i - 1.0, 2.0 * D));
}

std::vector<double> increment_scales(double D, int n) {
  std::vector<double> out(n);
  for (int i = 1; i <= n; ++i) out[i - 1] = increment_scale(D, i);
  return out;
}

ProcessModel::ProcessModel(double scaling_exponent, MixtureDensity mixture,
                           int horizon)
    : d_(scaling_exponent), mixture_(std::move(mixture)), horizon_(horizon) {
  if (!(d_ > 0.0 && d_ < 1.0)) {
    throw InvalidParameter("ProcessModel: requires 0 < D < 1");
  }
  if (horizon_ < 1) throw InvalidParameter("ProcessModel: requires horizon >= 1");
  scales_ = increment_scales(d_, horizon_);
}

Path simulate_history(const ProcessModel& model, RandomStream& rng) {
  const double sigma = model.mixture().sample_one(rng);
  Path path;
  path.returns.resize(model.horizon());
  for (int i = 0; i < model.horizon(); ++i) {
    path.returns[i] = model.scales()[i] * sigma * rng.normal();
  }
  return path;
}

Ensemble simulate_ensemble(const ProcessModel& model, int histories,
                           std::uint64_t seed, int threads) {
  if (histories < 1) {
    throw InvalidParameter("simulate_ensemble: requires histories >= 1");
  }
  Ensemble e(histories, model.horizon());
  e.meta.source = "simulated";
  e.meta.seed = seed;

  auto run_range = [&](int lo, int hi) {
    for (int l = lo; l < hi; ++l) {
      RandomStream rng(substream_seed(seed, static_cast<std::uint64_t>(l),
                                      kHistoryStreamSalt));
      const Path path = simulate_history(model, rng);
      for (int t = 1; t <= model.horizon(); ++t) {
        e.ret(l, t) = path.returns[t - 1];
      }
    }
  };

  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, histories));
  if (threads == 1) {
    run_range(0, histories);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const int chunk = (histories + threads - 1) / threads;
    for (int k = 0; k < threads; ++k) {
      const int lo = k * chunk;
      const int hi = std::min(histories, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return e;
}

double aggregate_return(const Path& path, int t, int T) {
  if (T < 1 || t < T || t > static_cast<int>(path.returns.size())) {
    throw IndexOutOfRange("aggregate_return: requires 1 <= T <= t <= horizon");
  }
  double sum = 0.0;
  for (int i = t - T + 1; i <= t; ++i) sum += path.returns[i - 1];
  return sum;
}

}  // namespace scalemix
