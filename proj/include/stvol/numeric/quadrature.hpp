#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature with global bisection of the
// worst interval, plus a wrapper for integrands given in log form.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <vector>

#include "stvol/error.hpp"

namespace stvol::numeric {

struct QuadOptions {
  double abs_tol = 0.0;
  double rel_tol = 1e-12;
  int max_intervals = 500;
};

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  int intervals = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

// One 15-point Kronrod rule with the QUADPACK error heuristic.
template <typename F>
Segment kronrod15(F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double res_k = fc * kWgk[7];
  double res_g = fc * kWg[3];
  double res_abs = std::abs(res_k);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(centre - dx);
    f2[j] = f(centre + dx);
    const double sum = f1[j] + f2[j];
    res_k += kWgk[j] * sum;
    res_abs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) res_g += kWg[j / 2] * sum;
  }
  const double mean = 0.5 * res_k;
  double res_asc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) res_asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  res_k *= half;
  res_asc *= std::abs(half);
  res_abs *= std::abs(half);
  double err = std::abs((res_k - res_g * half));
  if (res_asc != 0.0 && err != 0.0) err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (res_abs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * res_abs, err);
  return {a, b, res_k, err};
}

}  // namespace detail

/// Integrates f over the partition given by `points` (at least two, increasing).
/// Throws NumericError, with the achieved error, when the tolerance is not met
/// within opts.max_intervals subintervals.
template <typename F>
QuadResult integrate(F&& f, std::span<const double> points, const QuadOptions& opts = {}) {
  if (points.size() < 2) throw ContractError("integrate: need at least two breakpoints");
  std::priority_queue<detail::Segment> heap;
  double total = 0.0, total_err = 0.0;
  int evals = 0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] >= points[i])) throw ContractError("integrate: breakpoints must increase");
    if (points[i + 1] == points[i]) continue;
    auto s = detail::kronrod15(f, points[i], points[i + 1]);
    evals += 15;
    total += s.value;
    total_err += s.error;
    heap.push(s);
  }
  auto tolerance = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
  while (!heap.empty() && total_err > tolerance()) {
    if (static_cast<int>(heap.size()) >= opts.max_intervals) {
      std::ostringstream msg;
      msg.precision(3);
      msg << "integrate: no convergence after " << heap.size() << " intervals; value " << total
          << ", estimated error " << total_err << ", requested " << tolerance();
      throw NumericError(msg.str());
    }
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval at machine resolution: accept what we have.
      heap.push({worst.a, worst.b, worst.value, 0.0});
      total_err -= worst.error;
      continue;
    }
    auto left = detail::kronrod15(f, worst.a, mid);
    auto right = detail::kronrod15(f, mid, worst.b);
    evals += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum from the segments to shed the accumulated update roundoff.
  double sum = 0.0, err = 0.0;
  const int n = static_cast<int>(heap.size());
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {sum, err, evals, n};
}

template <typename F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opts = {}) {
  const std::array<double, 2> pts{a, b};
  return integrate(std::forward<F>(f), std::span<const double>(pts), opts);
}

/// ∫ exp(g(t)) dt over the real line, for g unimodal (typically concave).
struct LogIntegral {
  double log_value = -std::numeric_limits<double>::infinity();
  double rel_error = 0.0;
  double mode = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double value() const { return std::exp(log_value); }
};

/// Locates the mode of g starting from `guess`, truncates where g has fallen
/// `drop` below its peak on both sides, and integrates exp(g - peak) there.
/// The truncated tails are below exp(-drop) relative to the peak density.
template <typename G>
LogIntegral integrate_log_peaked(G&& g, double guess, const QuadOptions& opts = {}, double drop = 46.0) {
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  // Bracket the maximum.
  double b = guess, gb = g(b);
  double step = 0.5;
  double a = b - step, ga = g(a);
  double c = b + step, gc = g(c);
  int guard = 0;
  while (!(gb >= ga && gb >= gc)) {
    if (++guard > 200) throw NumericError("integrate_log_peaked: could not bracket the mode");
    step *= 1.6;
    if (gc > gb) {
      a = b; ga = gb;
      b = c; gb = gc;
      c = b + step; gc = g(c);
    } else {
      c = b; gc = gb;
      b = a; gb = ga;
      a = b - step; ga = g(a);
    }
  }
  if (gb == ninf) return {};
  // Coarse golden refinement; the mode only serves as a split point.
  constexpr double r = 0.381966011250105151795;
  for (int i = 0; i < 30 && (c - a) > 1e-3 * (1.0 + std::abs(b)); ++i) {
    const bool right = (c - b) > (b - a);
    const double x = right ? b + r * (c - b) : b - r * (b - a);
    const double gx = g(x);
    if (gx > gb) {
      if (right) { a = b; } else { c = b; }
      b = x; gb = gx;
    } else {
      if (right) { c = x; } else { a = x; }
    }
  }
  const double peak = gb;
  auto find_cut = [&](double dir) {
    double inside = b, s = 1.0, outside = b + dir * s;
    int n = 0;
    while (g(outside) > peak - drop) {
      if (++n > 80) throw NumericError("integrate_log_peaked: integrand tail does not decay");
      inside = outside;
      s *= 2.0;
      outside = b + dir * s;
    }
    for (int i = 0; i < 8; ++i) {
      const double m = 0.5 * (inside + outside);
      if (g(m) > peak - drop) inside = m; else outside = m;
    }
    return outside;
  };
  const double lo = find_cut(-1.0);
  const double hi = find_cut(+1.0);
  const std::array<double, 5> pts{lo, 0.5 * (lo + b), b, 0.5 * (b + hi), hi};
  auto shifted = [&](double t) {
    const double v = g(t);
    return v == ninf ? 0.0 : std::exp(v - peak);
  };
  const auto q = integrate(shifted, std::span<const double>(pts), opts);
  LogIntegral out;
  out.log_value = peak + std::log(q.value);
  out.rel_error = q.value > 0.0 ? q.abs_error / q.value : 0.0;
  out.mode = b;
  out.lower = lo;
  out.upper = hi;
  return out;
}

}  // namespace stvol::numeric
