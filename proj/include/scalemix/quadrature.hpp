#pragma once

#include <cmath>
#include <queue>

namespace scalemix {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  int segments = 0;
};

namespace quad_detail {

// 15-point Kronrod nodes on [-1,1] (positive half, descending). Odd indices
// plus the center form the embedded 7-point Gauss rule.
inline constexpr double kXgk[8] = {
    0.9914553711208126392068547, 0.9491079123427585245261897,
    0.8648644233597690727897128, 0.7415311855993944398638648,
    0.5860872354676911302941448, 0.4058451513773971669066064,
    0.2077849550078984676006894, 0.0};
inline constexpr double kWgk[8] = {
    0.0229353220105292249637320, 0.0630920926299785532907007,
    0.1047900103222501838398763, 0.1406532597155259187451896,
    0.1690047266392679028265834, 0.1903505780647854099132564,
    0.2044329400752988924141620, 0.2094821410847278280129992};
inline constexpr double kWg[4] = {
    0.1294849661688696932706114, 0.2797053914892766679014678,
    0.3818300505051189449503698, 0.4179591836734693877551020};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename F>
Segment eval_segment(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double fsum = f(c - dx) + f(c + dx);
    kronrod += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  kronrod *= h;
  gauss *= h;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace quad_detail

// Adaptive Gauss-Kronrod (G7,K15) integration of f over [a, b]. Starts from
// eight equal segments so narrow features register in the initial pass, then
// bisects the segment with the largest error estimate until the summed error
// meets max(abs_tol, rel_tol * |value|) or the segment budget is spent.
template <typename F>
QuadResult integrate(F&& f, double a, double b, double rel_tol = 1e-10,
                     double abs_tol = 0.0, int max_segments = 4000) {
  QuadResult out;
  if (a == b) return out;
  std::priority_queue<quad_detail::Segment> heap;
  double total = 0.0;
  double err = 0.0;
  const int initial = 8;
  for (int i = 0; i < initial; ++i) {
    const double lo = a + (b - a) * i / initial;
    const double hi = (i == initial - 1) ? b : a + (b - a) * (i + 1) / initial;
    quad_detail::Segment seg = quad_detail::eval_segment(f, lo, hi);
    total += seg.value;
    err += seg.error;
    heap.push(seg);
  }
  int segments = initial;
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) &&
         segments < max_segments) {
    quad_detail::Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) break;  // at float resolution
    heap.pop();
    quad_detail::Segment left = quad_detail::eval_segment(f, worst.a, mid);
    quad_detail::Segment right = quad_detail::eval_segment(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++segments;
  }
  out.value = total;
  out.error = err;
  out.segments = segments;
  return out;
}

}  // namespace scalemix
