#include "scalemix/theory.hpp"

#include <cmath>

#include "scalemix/quadrature.hpp"

namespace scalemix {
namespace theory {

namespace {

const double kSqrtPi = 1.7724538509055160273;
const double kInvSqrt2Pi = 0.3989422804014326779;

double normal_pdf(double x, double sd) {
  const double z = x / sd;
  return kInvSqrt2Pi / sd * std::exp(-0.5 * z * z);
}

// E|Z|^beta for Z ~ N(mu, var), beta an even integer: a plain polynomial in
// mu and var through the central moments (2j-1)!! var^j.
double abs_moment_even(double mu, double var, int beta) {
  double sum = 0.0;
  double choose = 1.0;  // binomial(beta, 2j)
  double dfact = 1.0;   // (2j-1)!!
  for (int j = 0; 2 * j <= beta; ++j) {
    if (j > 0) {
      choose *= static_cast<double>(beta - 2 * j + 2) * (beta - 2 * j + 1) /
                (2.0 * j * (2.0 * j - 1));
      dfact *= 2.0 * j - 1.0;
    }
    sum += choose * dfact * std::pow(mu, beta - 2 * j) * std::pow(var, j);
  }
  return sum;
}

// E|Z| for Z ~ N(mu, var): folded-normal mean.
double abs_moment_one(double mu, double var) {
  const double sd = std::sqrt(var);
  const double m = mu / sd;
  return sd * std::sqrt(2.0 / M_PI) * std::exp(-0.5 * m * m) +
         mu * std::erf(m / std::sqrt(2.0));
}

// General E|Z|^beta for Z ~ N(mu, var) by adaptive quadrature, split at the
// |.|^beta kink.
double abs_moment_quad(double mu, double var, double beta) {
  const double sd = std::sqrt(var);
  const double span = sd * (12.0 + 2.0 * beta);
  auto f = [&](double z) {
    return std::pow(std::abs(z), beta) * normal_pdf(z - mu, sd);
  };
  const double lo = mu - span;
  const double hi = mu + span;
  if (lo < 0.0 && hi > 0.0) {
    return integrate(f, lo, 0.0, 1e-10).value +
           integrate(f, 0.0, hi, 1e-10).value;
  }
  return integrate(f, lo, hi, 1e-10).value;
}

double abs_moment(double mu, double var, double beta) {
  const double rounded = std::round(beta);
  if (std::abs(beta - rounded) < 1e-12 && rounded >= 0.0) {
    const int b = static_cast<int>(rounded);
    if (b % 2 == 0) return abs_moment_even(mu, var, b);
    if (b == 1) return abs_moment_one(mu, var);
  }
  return abs_moment_quad(mu, var, beta);
}

}  // namespace

double b_alpha(double alpha) {
  if (!(alpha >= 0.0)) throw InvalidParameter("b_alpha: requires alpha >= 0");
  return std::exp2(0.5 * alpha) * std::tgamma(0.5 * (alpha + 1.0)) / kSqrtPi;
}

double kappa(const MixtureDensity& mixture, double alpha, double beta) {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) {
    throw InvalidParameter("kappa: requires alpha, beta >= 0");
  }
  if (mixture.is_degenerate()) return 1.0;  // sigma0 cancels exactly
  return mixture.moment(alpha + beta) /
         (mixture.moment(alpha) * mixture.moment(beta));
}

double vol_autocorr(const ProcessModel& model, int n) {
  if (n < 2) throw InvalidParameter("vol_autocorr: requires n >= 2");
  const MixtureDensity& m = model.mixture();
  if (m.is_degenerate()) return 0.0;  // no volatility dispersion
  const double m1 = m.moment(1.0);
  const double m2 = m.moment(2.0);
  const double b1 = b_alpha(1.0);
  const double b2c = b_alpha(2.0);
  const double a1 = increment_scale(model.scaling_exponent(), 1);
  const double an = increment_scale(model.scaling_exponent(), n);
  return b1 * b1 * a1 * an * (m2 - m1 * m1) /
         (a1 * a1 * (b2c * m2 - b1 * b1 * m1 * m1));
}

double b2(double alpha, double beta, int t1, int t2, double D) {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) {
    throw InvalidParameter("b2: requires alpha, beta >= 0");
  }
  if (t1 < 1 || t2 < t1) throw InvalidParameter("b2: requires 1 <= t1 <= t2");
  if (!(D > 0.0 && D < 1.0)) throw InvalidParameter("b2: requires 0 < D < 1");

  const double s1sq = std::pow(t1, 2.0 * D);
  const double s1 = std::sqrt(s1sq);
  // Degenerate inner Gaussian: X + Y collapses onto X.
  if (t1 == t2) return b_alpha(alpha + beta) * std::pow(t1, (alpha + beta) * D);
  if (alpha == 0.0) return b_alpha(beta) * std::pow(t2, beta * D);
  if (beta == 0.0) return b_alpha(alpha) * std::pow(t1, alpha * D);

  const double var = std::pow(t2, 2.0 * D) - s1sq;
  auto outer = [&](double x) {
    return std::pow(x, alpha) * normal_pdf(x, s1) * abs_moment(x, var, beta);
  };
  // The integrand is even in x.
  const double span = s1 * (12.0 + 2.0 * (alpha + beta));
  return 2.0 * integrate(outer, 0.0, span, 1e-8).value;
}

double K(const ProcessModel& model, double alpha, double beta, int t1,
         int t2) {
  if (t2 > model.horizon()) {
    throw IndexOutOfRange("K: t2 exceeds the model horizon");
  }
  if (!(alpha >= 0.0) || !(beta >= 0.0)) {
    throw InvalidParameter("K: requires alpha, beta >= 0");
  }
  // |R|^0 = 1 makes both the Gaussian and the mixture factor cancel.
  if (alpha == 0.0 || beta == 0.0) return 1.0;
  const MixtureDensity& m = model.mixture();
  const double D = model.scaling_exponent();
  const double mab = m.moment(alpha + beta);
  const double ma = m.moment(alpha);
  const double mb = m.moment(beta);
  const double b2v = b2(alpha, beta, t1, t2, D);
  return b2v * mab /
         (std::pow(t1, alpha * D) * std::pow(t2, beta * D) * b_alpha(alpha) *
          ma * b_alpha(beta) * mb);
}

MixtureDensity calibrate(const CalibrationTargets& targets,
                         const PowerLawInit& init) {
  if (!(targets.variance > 0.0)) {
    throw InvalidParameter("calibrate: requires variance > 0");
  }
  if (std::isinf(targets.tail_index)) {
    return MixtureDensity::degenerate(std::sqrt(targets.variance));
  }
  if (!(targets.tail_index > 2.0)) {
    throw InvalidParameter(
        "calibrate: tail_index must exceed 2 for a finite variance");
  }
  const double gamma = init.gamma;
  const double delta = gamma + targets.tail_index + 1.0;

  auto variance_at = [&](double d) {
    return MixtureDensity::power_law(gamma, delta, d, init.sigma_min)
        .moment(2.0);
  };

  // <sigma^2> grows monotonically with d (scale ~ d^(1/delta)). Seed with
  // the sigma_min = 0 closed form, then bracket and bisect in log d.
  const double s1 = std::sin(M_PI * (gamma + 1.0) / delta);
  const double s3 = std::sin(M_PI * (gamma + 3.0) / delta);
  double d_guess = std::pow(targets.variance * s3 / s1, 0.5 * delta);
  if (!std::isfinite(d_guess) || d_guess <= 0.0) d_guess = 1.0;

  double lo = d_guess, hi = d_guess;
  double f_lo = variance_at(lo) - targets.variance;
  double f_hi = f_lo;
  for (int i = 0; i < 200 && f_lo > 0.0; ++i) {
    lo *= 0.25;
    f_lo = variance_at(lo) - targets.variance;
  }
  for (int i = 0; i < 200 && f_hi < 0.0; ++i) {
    hi *= 4.0;
    f_hi = variance_at(hi) - targets.variance;
  }
  if (!(f_lo <= 0.0 && f_hi >= 0.0)) {
    throw CalibrationFailed("calibrate: could not bracket the variance target");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    const double f_mid = variance_at(mid) - targets.variance;
    if (std::abs(f_mid) <= 1e-9 * targets.variance) {
      return MixtureDensity::power_law(gamma, delta, mid, init.sigma_min);
    }
    if (f_mid < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double d_final = std::sqrt(lo * hi);
  if (std::abs(variance_at(d_final) - targets.variance) >
      1e-6 * targets.variance) {
    throw CalibrationFailed("calibrate: variance target not reached");
  }
  return MixtureDensity::power_law(gamma, delta, d_final, init.sigma_min);
}

}  // namespace theory
}  // namespace scalemix
