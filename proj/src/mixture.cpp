#include "scalemix/mixture.hpp"

#include <algorithm>
#include <cmath>

namespace scalemix {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

MixtureDensity MixtureDensity::power_law(double gamma, double delta, double d,
                                         double sigma_min) {
  if (!std::isfinite(gamma) || !std::isfinite(delta) || !std::isfinite(d) ||
      !std::isfinite(sigma_min)) {
    throw InvalidParameter("power_law: parameters must be finite");
  }
  if (!(0.0 < gamma && gamma < delta)) {
    throw InvalidParameter("power_law: requires 0 < gamma < delta");
  }
  if (!(d > 0.0)) throw InvalidParameter("power_law: requires d > 0");
  if (sigma_min < 0.0) throw InvalidParameter("power_law: requires sigma_min >= 0");
  if (delta - gamma <= 1.0) {
    throw NonIntegrable("power_law: tail exponent delta - gamma must exceed 1");
  }

  MixtureDensity m;
  m.pl_ = PowerLawParams{gamma, delta, d, sigma_min};
  m.pareto_index_ = delta - gamma - 1.0;
  // Split point for the analytic tail; guarantees d / cutoff^delta <= 8^-delta.
  m.cutoff_ = 8.0 * std::max(std::pow(d, 1.0 / delta), sigma_min);
  m.norm_a_ = 1.0 / m.raw_moment_integral(0.0);

  // Rejection-envelope constants. The unnormalized density is unimodal with
  // mode at (gamma d / (delta - gamma))^(1/delta), always below cutoff_.
  const double mode = std::pow(gamma * d / (delta - gamma), 1.0 / delta);
  const double peak = std::clamp(mode, sigma_min, m.cutoff_);
  m.core_height_ = m.unnormalized(peak);
  m.core_weight_ = m.core_height_ * (m.cutoff_ - sigma_min);
  // Mass of the dominating pure power tail, sigma^(gamma-delta) on [cutoff, inf).
  m.tail_weight_ =
      std::pow(m.cutoff_, gamma - delta + 1.0) / m.pareto_index_;
  return m;
}

MixtureDensity MixtureDensity::degenerate(double sigma0) {
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) {
    throw InvalidParameter("degenerate: requires sigma0 > 0");
  }
  MixtureDensity m;
  m.sigma0_ = sigma0;
  return m;
}

double MixtureDensity::sigma0() const {
  if (!is_degenerate()) {
    throw InvalidParameter("sigma0: not a point-mass mixture");
  }
  return sigma0_;
}

const PowerLawParams& MixtureDensity::power_law_params() const {
  if (is_degenerate()) {
    throw InvalidParameter("power_law_params: mixture is a point mass");
  }
  return *pl_;
}

double MixtureDensity::norm_constant() const {
  if (is_degenerate()) {
    throw InvalidParameter("norm_constant: mixture is a point mass");
  }
  return norm_a_;
}

double MixtureDensity::unnormalized(double sigma) const {
  const PowerLawParams& p = *pl_;
  return std::pow(sigma, p.gamma) / (p.d + std::pow(sigma, p.delta));
}

double MixtureDensity::tail_series(double q) const {
  // integral_cutoff^inf sigma^(gamma+q) / (d + sigma^delta) dsigma expanded
  // in powers of x = d / cutoff^delta (|x| <= 8^-delta, so the alternating
  // series converges to machine precision in a few terms).
  const PowerLawParams& p = *pl_;
  const double power = p.gamma + q + 1.0;  // < delta by the moment bound
  const double x = p.d * std::pow(cutoff_, -p.delta);
  const double lead = std::pow(cutoff_, power - p.delta);
  double sum = 0.0;
  double xj = 1.0;
  for (int j = 0; j < 200; ++j) {
    const double term = xj * lead / (p.delta * (j + 1.0) - power);
    sum += (j % 2 == 0) ? term : -term;
    if (std::abs(term) <= kEps * std::abs(sum)) break;
    xj *= x;
  }
  return sum;
}

double MixtureDensity::raw_moment_integral(double q) const {
  const PowerLawParams& p = *pl_;
  auto f = [&](double s) {
    return std::pow(s, p.gamma + q) / (p.d + std::pow(s, p.delta));
  };
  const QuadResult core = integrate(f, p.sigma_min, cutoff_, 1e-12);
  return core.value + tail_series(q);
}

double MixtureDensity::density(double sigma) const {
  if (is_degenerate()) {
    throw DegenerateDensity("density: point mass has no pointwise density");
  }
  if (!(sigma >= pl_->sigma_min)) return 0.0;
  return norm_a_ * unnormalized(sigma);
}

double MixtureDensity::max_moment_order() const {
  if (is_degenerate()) return std::numeric_limits<double>::infinity();
  return pareto_index_;
}

double MixtureDensity::moment(double q) const {
  if (!(q >= 0.0)) throw InvalidParameter("moment: requires q >= 0");
  if (is_degenerate()) return std::pow(sigma0_, q);
  if (q == 0.0) return 1.0;
  if (q >= pareto_index_) {
    throw DivergentMoment("moment: order " + std::to_string(q) +
                          " diverges (bound " + std::to_string(pareto_index_) +
                          ")");
  }
  return norm_a_ * raw_moment_integral(q);
}

double MixtureDensity::sample_one(RandomStream& rng) const {
  if (is_degenerate()) return sigma0_;
  const PowerLawParams& p = *pl_;
  const double total = core_weight_ + tail_weight_;
  for (;;) {
    double sigma, envelope;
    if (rng.uniform() * total < core_weight_) {
      sigma = p.sigma_min + rng.uniform() * (cutoff_ - p.sigma_min);
      envelope = core_height_;
    } else {
      const double v = 1.0 - rng.uniform();  // (0, 1]
      sigma = cutoff_ * std::pow(v, -1.0 / pareto_index_);
      envelope = std::pow(sigma, p.gamma - p.delta);
    }
    if (rng.uniform() * envelope <= unnormalized(sigma)) return sigma;
  }
}

std::vector<double> MixtureDensity::sample(RandomStream& rng,
                                           std::size_t count) const {
  if (count < 1) throw InvalidParameter("sample: requires count >= 1");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = sample_one(rng);
  return out;
}

}  // namespace scalemix
