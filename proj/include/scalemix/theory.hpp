#pragma once

#include "scalemix/mixture.hpp"
#include "scalemix/process.hpp"

namespace scalemix {
namespace theory {

// Absolute moment of the standard normal, E|Z|^alpha =
// 2^(alpha/2) Gamma((alpha+1)/2) / sqrt(pi).
double b_alpha(double alpha);

// Normalized cross-moment of absolute returns on non-overlapping intervals:
// kappa = <sigma^(alpha+beta)> / (<sigma^alpha><sigma^beta>). Independent of
// the interval positions; 1 under independence (point-mass mixture).
double kappa(const MixtureDensity& mixture, double alpha, double beta);

// Linear correlation of |r_1| and |r_n| predicted by the model:
//   B_1^2 a_1 a_n (<s^2> - <s>^2) / (a_1^2 (B_2 <s^2> - B_1^2 <s>^2)).
// Proportional to a_n, hence not constant in n.
double vol_autocorr(const ProcessModel& model, int n);

// Coupled Gaussian absolute-moment integral
//   E[ |X|^alpha |X + Y|^beta ],  X ~ N(0, t1^2D), Y ~ N(0, t2^2D - t1^2D).
// Outer integral by adaptive quadrature; the inner absolute moment uses a
// closed form for beta in {0, 1, 2, 4, ...} and nested quadrature otherwise.
double b2(double alpha, double beta, int t1, int t2, double D);

// Aggregated-return correlator
//   K = b2 / (t1^aD t2^bD B_{a+b}) * <|r1|^(a+b)> / (<|r1|^a><|r1|^b|>)
// with <|r1|^q> = B_q <sigma^q>. Equals 1 identically when alpha or beta
// is 0.
double K(const ProcessModel& model, double alpha, double beta, int t1, int t2);

struct CalibrationTargets {
  double variance;    // target <sigma^2>
  double tail_index;  // moments of order < tail_index are finite;
                      // +inf selects the point-mass limit
};

struct PowerLawInit {
  double gamma = 1.0;
  double sigma_min = 0.0;
};

// Builds a mixture with delta = gamma + tail_index + 1 and d solved by
// root-finding so that <sigma^2> matches targets.variance to 1e-6 relative.
// An infinite tail_index returns the point mass at sqrt(variance).
MixtureDensity calibrate(const CalibrationTargets& targets,
                         const PowerLawInit& init = {});

}  // namespace theory
}  // namespace scalemix
