#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "scalemix/errors.hpp"
#include "scalemix/quadrature.hpp"
#include "scalemix/random.hpp"

namespace scalemix {

struct PowerLawParams {
  double gamma;      // small-sigma exponent, 0 < gamma < delta
  double delta;      // large-sigma decay exponent
  double d;          // crossover scale parameter, > 0
  double sigma_min;  // lower support bound, >= 0
};

// Volatility mixing density over Gaussian widths. Either the normalized
// power-law family
//
//   rho(sigma) = A sigma^gamma / (d + sigma^delta),  sigma in [sigma_min, inf)
//
// with tail rho ~ sigma^-(delta-gamma), or a point mass at sigma0.
// Immutable after construction; safe to share across threads.
class MixtureDensity {
 public:
  // Normalizes the power-law family. Throws InvalidParameter unless
  // 0 < gamma < delta, d > 0, sigma_min >= 0; throws NonIntegrable when
  // delta - gamma <= 1.
  static MixtureDensity power_law(double gamma, double delta, double d,
                                  double sigma_min = 0.0);

  static MixtureDensity degenerate(double sigma0);

  bool is_degenerate() const { return !pl_.has_value(); }

  // Point-mass location; only valid for the degenerate variant.
  double sigma0() const;

  const PowerLawParams& power_law_params() const;

  // Normalization constant A; only valid for the power-law variant.
  double norm_constant() const;

  // Pointwise rho(sigma); zero below sigma_min. Throws DegenerateDensity on
  // the point-mass variant.
  double density(double sigma) const;

  // <sigma^q>. Finite for q < delta - gamma - 1 on the power-law variant
  // (DivergentMoment otherwise); exact sigma0^q on the point mass.
  double moment(double q) const;

  // Supremum of the finite moment orders (delta - gamma - 1, or +inf).
  double max_moment_order() const;

  // One draw from rho. Power-law sampling is exact rejection against a
  // uniform-density core on [sigma_min, cutoff] plus a Pareto tail with
  // index delta - gamma - 1.
  double sample_one(RandomStream& rng) const;

  std::vector<double> sample(RandomStream& rng, std::size_t count) const;

  // E_rho[f(sigma)] for integrable f. The tail integral is evaluated on the
  // inverted variable u = 1/sigma so heavy tails need no truncation.
  template <typename F>
  double expectation(F&& f) const {
    if (is_degenerate()) return f(sigma0_);
    const PowerLawParams& p = *pl_;
    auto core = [&](double s) { return unnormalized(s) * f(s); };
    auto tail = [&](double u) {
      const double ud = std::pow(u, p.delta);
      return std::pow(u, p.delta - p.gamma - 2.0) / (1.0 + p.d * ud) *
             f(1.0 / u);
    };
    const double core_part = integrate(core, p.sigma_min, cutoff_, 1e-11).value;
    const double tail_part = integrate(tail, 0.0, 1.0 / cutoff_, 1e-11).value;
    return norm_a_ * (core_part + tail_part);
  }

 private:
  MixtureDensity() = default;

  double unnormalized(double sigma) const;     // sigma^gamma / (d + sigma^delta)
  double raw_moment_integral(double q) const;  // integral of unnormalized * sigma^q
  double tail_series(double q) const;          // exact tail beyond cutoff_

  std::optional<PowerLawParams> pl_;
  double sigma0_ = 0.0;

  // Power-law precomputations.
  double norm_a_ = 0.0;
  double cutoff_ = 0.0;        // core/tail split; d / cutoff^delta <= 8^-delta
  double pareto_index_ = 0.0;  // delta - gamma - 1
  double core_height_ = 0.0;   // rejection envelope height over the core
  double core_weight_ = 0.0;
  double tail_weight_ = 0.0;
};

}  // namespace scalemix
