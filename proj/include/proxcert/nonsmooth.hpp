#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "proxcert/errors.hpp"
#include "proxcert/linalg.hpp"

namespace proxcert {

/// Closed interval, possibly with infinite endpoints.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Nonsmooth convex oracle: proximal operator, extended-real value, and a
/// per-coordinate subdifferential interval (the built-ins are all separable,
/// which is what makes the minimum-norm subgradient computable exactly).
/// prox(x, t) minimizes t*g(u) + 0.5*||u - x||^2.
struct NonsmoothOracle {
  std::string kind = "custom";
  bool separable = true;
  std::function<Vec(const Vec&, double)> prox;
  std::function<double(const Vec&)> eval;
  /// Subdifferential of the coordinate function at the given value, or nullopt
  /// when the value lies outside the domain.
  std::function<std::optional<Interval>(std::size_t, double)> subdiff_interval;
};

inline double soft_threshold(double v, double tau) {
  if (v > tau) return v - tau;
  if (v < -tau) return v + tau;
  return 0.0;
}

/// Coordinate-wise soft threshold.
inline Vec prox_l1(const Vec& x, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("prox_l1: threshold must be >= 0");
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = soft_threshold(x[i], tau);
  return out;
}

/// Coordinate-wise clamp to [lo, hi].
inline Vec prox_box(const Vec& x, const Vec& lo, const Vec& hi) {
  if (lo.size() != x.size() || hi.size() != x.size())
    throw InvalidSpecError("prox_box: bound dimensions do not match x");
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(lo[i] <= hi[i])) throw InvalidSpecError("prox_box: lo > hi at coordinate " + std::to_string(i));
    out[i] = std::min(std::max(x[i], lo[i]), hi[i]);
  }
  return out;
}

/// Soft threshold by tau1, then shrink by 1/(1 + tau2).
inline Vec prox_elastic_net(const Vec& x, double tau1, double tau2) {
  if (!(tau1 >= 0.0) || !(tau2 >= 0.0))
    throw std::invalid_argument("prox_elastic_net: parameters must be >= 0");
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = soft_threshold(x[i], tau1) / (1.0 + tau2);
  return out;
}

inline NonsmoothOracle make_l1(double weight = 1.0) {
  if (!(weight >= 0.0)) throw std::invalid_argument("make_l1: weight must be >= 0");
  NonsmoothOracle g;
  g.kind = "l1";
  g.prox = [weight](const Vec& x, double t) { return prox_l1(x, weight * t); };
  g.eval = [weight](const Vec& x) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return weight * s;
  };
  g.subdiff_interval = [weight](std::size_t, double v) -> std::optional<Interval> {
    if (v == 0.0) return Interval{-weight, weight};
    const double s = v > 0.0 ? weight : -weight;
    return Interval{s, s};
  };
  return g;
}

inline NonsmoothOracle make_box(Vec lo, Vec hi) {
  if (lo.size() != hi.size()) throw InvalidSpecError("make_box: bound dimensions differ");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i])) throw InvalidSpecError("make_box: lo > hi at coordinate " + std::to_string(i));
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto lo_p = std::make_shared<const Vec>(std::move(lo));
  auto hi_p = std::make_shared<const Vec>(std::move(hi));

  NonsmoothOracle g;
  g.kind = "box";
  g.prox = [lo_p, hi_p](const Vec& x, double) { return prox_box(x, *lo_p, *hi_p); };
  g.eval = [lo_p, hi_p](const Vec& x) {
    if (x.size() != lo_p->size()) throw std::invalid_argument("box eval: dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] < (*lo_p)[i] || x[i] > (*hi_p)[i]) return inf;
    return 0.0;
  };
  // Normal cone of the interval: {0} inside, a half-line on each face.
  g.subdiff_interval = [lo_p, hi_p](std::size_t i, double v) -> std::optional<Interval> {
    if (i >= lo_p->size()) throw std::invalid_argument("box subdiff: coordinate out of range");
    const double l = (*lo_p)[i], h = (*hi_p)[i];
    if (v < l || v > h) return std::nullopt;
    const bool at_lo = v == l, at_hi = v == h;
    if (at_lo && at_hi) return Interval{-inf, inf};
    if (at_lo) return Interval{-inf, 0.0};
    if (at_hi) return Interval{0.0, inf};
    return Interval{0.0, 0.0};
  };
  return g;
}

inline NonsmoothOracle make_elastic_net(double l1_weight, double l2_weight) {
  if (!(l1_weight >= 0.0) || !(l2_weight >= 0.0))
    throw std::invalid_argument("make_elastic_net: weights must be >= 0");
  NonsmoothOracle g;
  g.kind = "elastic_net";
  g.prox = [l1_weight, l2_weight](const Vec& x, double t) {
    return prox_elastic_net(x, l1_weight * t, l2_weight * t);
  };
  g.eval = [l1_weight, l2_weight](const Vec& x) {
    double s = 0.0;
    for (double v : x) s += l1_weight * std::abs(v) + 0.5 * l2_weight * v * v;
    return s;
  };
  g.subdiff_interval = [l1_weight, l2_weight](std::size_t, double v) -> std::optional<Interval> {
    if (v == 0.0) return Interval{-l1_weight, l1_weight};
    const double s = (v > 0.0 ? l1_weight : -l1_weight) + l2_weight * v;
    return Interval{s, s};
  };
  return g;
}

inline NonsmoothOracle zero_oracle() {
  NonsmoothOracle g;
  g.kind = "zero";
  g.prox = [](const Vec& x, double) { return x; };
  g.eval = [](const Vec&) { return 0.0; };
  g.subdiff_interval = [](std::size_t, double) -> std::optional<Interval> {
    return Interval{0.0, 0.0};
  };
  return g;
}

}  // namespace proxcert
