#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace vfeller::quad {

struct Options {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  int max_subdivisions = 2000;
};

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  bool converged = false;
  bool finite = true;  // false if the integrand produced inf/nan somewhere
};

namespace detail {

// 21-point Kronrod rule with embedded 10-point Gauss rule (QUADPACK qk21 constants).
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525478398, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

}  // namespace detail

struct Panel {
  double value = 0.0;
  double error = 0.0;
  bool finite = true;
};

/// Single 21-point Gauss-Kronrod panel on [a, b]. The error estimate is |K21 - G10|.
template <class F>
Panel gauss_kronrod21(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * detail::kWgk[10];
  double resg = 0.0;
  bool finite = std::isfinite(fc);
  for (int j = 0; j < 10; ++j) {
    const double dx = half * detail::kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    finite = finite && std::isfinite(f1) && std::isfinite(f2);
    resk += detail::kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += detail::kWg[j / 2] * (f1 + f2);
  }
  Panel p;
  p.value = resk * half;
  p.error = std::abs((resk - resg) * half);
  p.finite = finite && std::isfinite(p.value);
  return p;
}

/// Globally adaptive Gauss-Kronrod integration of f over [a, b] (a > b allowed).
/// The rule never evaluates f at the endpoints, so integrable endpoint
/// singularities are tolerated.
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  Result out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  const double sign = b > a ? 1.0 : -1.0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);

  struct Segment {
    double lo, hi, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
  };
  std::priority_queue<Segment> heap;
  Panel first = gauss_kronrod21(f, lo, hi);
  out.evaluations = 21;
  if (!first.finite) {
    out.finite = false;
    out.value = sign * first.value;
    out.abs_error = std::numeric_limits<double>::infinity();
    return out;
  }
  heap.push({lo, hi, first.value, first.error});
  double total = first.value;
  double error = first.error;
  int subdivisions = 1;
  while (error > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
    if (subdivisions >= opt.max_subdivisions) break;
    Segment s = heap.top();
    heap.pop();
    const double mid = 0.5 * (s.lo + s.hi);
    if (!(mid > s.lo && mid < s.hi)) {
      // Interval no longer resolvable in double precision.
      heap.push(s);
      break;
    }
    Panel left = gauss_kronrod21(f, s.lo, mid);
    Panel right = gauss_kronrod21(f, mid, s.hi);
    out.evaluations += 42;
    if (!left.finite || !right.finite) {
      out.finite = false;
      out.value = sign * (total - s.value + left.value + right.value);
      out.abs_error = std::numeric_limits<double>::infinity();
      return out;
    }
    total += left.value + right.value - s.value;
    error += left.error + right.error - s.error;
    heap.push({s.lo, mid, left.value, left.error});
    heap.push({mid, s.hi, right.value, right.error});
    ++subdivisions;
  }
  // Re-sum to limit drift from incremental updates.
  total = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = sign * total;
  out.abs_error = error;
  out.converged = error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
  return out;
}

/// Gauss-Legendre nodes and weights on [0, 1], computed by Newton iteration on P_n.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Rule gauss_legendre_unit(int n);

}  // namespace vfeller::quad
