#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scalemix/errors.hpp"

namespace scalemix {

struct EnsembleMeta {
  std::string source;  // "simulated", "ingested", ...
  std::optional<std::uint64_t> seed;
  std::string detail;  // free-form provenance note
};

// M histories of n elementary returns, row-major. Time indices are 1-based
// throughout the statistical API, matching the session-bar convention.
class Ensemble {
 public:
  Ensemble(int histories, int horizon)
      : m_(histories), n_(horizon),
        data_(static_cast<std::size_t>(histories) * horizon, 0.0) {
    if (histories < 1 || horizon < 1) {
      throw InvalidParameter("Ensemble: requires histories >= 1 and horizon >= 1");
    }
  }

  int histories() const { return m_; }
  int horizon() const { return n_; }

  double ret(int history, int t) const { return data_[index(history, t)]; }
  double& ret(int history, int t) { return data_[index(history, t)]; }

  // Aggregated return r(t, T) = sum of the elementary returns over (t-T, t].
  double aggregate(int history, int t, int T) const {
    if (T < 1 || t < T || t > n_) {
      throw IndexOutOfRange("aggregate: requires 1 <= T <= t <= horizon");
    }
    double sum = 0.0;
    for (int i = t - T + 1; i <= t; ++i) sum += ret(history, i);
    return sum;
  }

  bool detrended() const { return detrended_; }
  void set_detrended(bool v) { detrended_ = v; }

  const std::vector<double>& data() const { return data_; }

  EnsembleMeta meta;

 private:
  std::size_t index(int history, int t) const {
    if (history < 0 || history >= m_ || t < 1 || t > n_) {
      throw IndexOutOfRange("Ensemble: history " + std::to_string(history) +
                            ", t " + std::to_string(t) + " out of range");
    }
    return static_cast<std::size_t>(history) * n_ + (t - 1);
  }

  int m_;
  int n_;
  std::vector<double> data_;
  bool detrended_ = false;
};

}  // namespace scalemix
