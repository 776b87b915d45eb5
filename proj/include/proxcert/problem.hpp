#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "proxcert/errors.hpp"
#include "proxcert/nonsmooth.hpp"
#include "proxcert/smooth.hpp"

namespace proxcert {

/// Composite objective: smooth part plus nonsmooth part, with the optional
/// certificates a caller may know about it (minimum value, PL constant).
struct CompositeProblem {
  SmoothOracle smooth;
  NonsmoothOracle nonsmooth;
  std::optional<double> known_min{};
  std::optional<double> pl_constant{};
};

/// Extended-real objective value; +inf outside the domain of the nonsmooth part.
inline double phi_value(const CompositeProblem& p, const Vec& x) {
  return p.smooth.eval(x) + p.nonsmooth.eval(x);
}

/// Distance from zero to the subdifferential of the composite objective,
/// together with the minimum-norm subgradient of the nonsmooth part that
/// attains it.
struct SubdiffDistance {
  double value = 0.0;
  Vec attaining_subgradient;
};

/// Exact d(0, subdifferential at x) for separable nonsmooth parts: per
/// coordinate the nearest subgradient to -grad f is an interval clamp.
inline SubdiffDistance subdiff_distance(const CompositeProblem& p, const Vec& x) {
  if (!p.nonsmooth.separable)
    throw UnsupportedStructureError("subdiff_distance: nonsmooth part must be separable");
  if (!std::isfinite(p.nonsmooth.eval(x)))
    throw DomainError("subdiff_distance: point lies outside the nonsmooth domain");

  const Vec gradient = p.smooth.grad(x);
  SubdiffDistance out;
  out.attaining_subgradient.resize(x.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto iv = p.nonsmooth.subdiff_interval(i, x[i]);
    if (!iv)
      throw DomainError("subdiff_distance: empty subdifferential at coordinate " +
                        std::to_string(i));
    const double s = std::min(std::max(-gradient[i], iv->lo), iv->hi);
    out.attaining_subgradient[i] = s;
    const double r = gradient[i] + s;
    sq += r * r;
  }
  out.value = std::sqrt(sq);
  return out;
}

}  // namespace proxcert
