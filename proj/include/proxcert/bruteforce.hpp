#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "proxcert/errors.hpp"
#include "proxcert/smooth.hpp"

// Independent brute-force verifiers. These deliberately avoid the closed-form
// prox implementations and the rate formulas: they are the ground truth those
// are tested against.

namespace proxcert {

struct GoldenResult {
  double minimizer = 0.0;
  bool converged = false;
};

namespace detail {

// Shrink an endpoint with a nonfinite objective value onto the domain by
// bisecting against a point where the objective is finite.
inline double clip_to_domain(const std::function<double(double)>& h, double bad, double good) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (bad + good);
    if (mid == bad || mid == good) break;
    if (std::isfinite(h(mid)))
      good = mid;
    else
      bad = mid;
  }
  return good;
}

}  // namespace detail

/// Minimize t*g(u) + 0.5*(u - x)^2 over the bracket by golden-section search.
/// Indicator-style g (+inf outside an interval) is handled by clipping the
/// bracket to the domain first, not by penalties. Iterations are capped at
/// 200; `converged` reports whether the interval shrank below tol.
inline GoldenResult prox_1d_golden(const std::function<double(double)>& g_1d, double t,
                                   double x, double bracket_lo, double bracket_hi,
                                   double tol) {
  if (!(t > 0.0)) throw std::invalid_argument("prox_1d_golden: step must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("prox_1d_golden: tol must be positive");
  if (!(bracket_lo < bracket_hi)) throw BracketError("prox_1d_golden: empty bracket");

  const auto h = [&](double u) { return t * g_1d(u) + 0.5 * (u - x) * (u - x); };

  double lo = bracket_lo, hi = bracket_hi;
  if (!std::isfinite(h(lo)) || !std::isfinite(h(hi))) {
    double seed = std::numeric_limits<double>::quiet_NaN();
    const int grid = 129;
    for (int j = 0; j < grid; ++j) {
      const double u = lo + (hi - lo) * j / (grid - 1);
      if (std::isfinite(h(u))) {
        seed = u;
        break;
      }
    }
    if (!std::isfinite(seed))
      throw BracketError("prox_1d_golden: objective has no finite value inside the bracket");
    if (!std::isfinite(h(lo))) lo = detail::clip_to_domain(h, lo, seed);
    if (!std::isfinite(h(hi))) hi = detail::clip_to_domain(h, hi, seed);
  }

  {
    const double mid = 0.5 * (lo + hi);
    if (h(lo) < h(mid) && h(hi) < h(mid))
      throw BracketError("prox_1d_golden: objective does not look convex on the bracket");
  }

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double u1 = b - invphi * (b - a);
  double u2 = a + invphi * (b - a);
  double f1 = h(u1), f2 = h(u2);
  for (int i = 0; i < 200 && b - a > tol; ++i) {
    if (f1 <= f2) {
      b = u2;
      u2 = u1;
      f2 = f1;
      u1 = b - invphi * (b - a);
      f1 = h(u1);
    } else {
      a = u1;
      u1 = u2;
      f1 = f2;
      u2 = a + invphi * (b - a);
      f2 = h(u2);
    }
  }
  return {0.5 * (a + b), b - a <= tol};
}

/// Same, with the default bracket [x - 10(1+t), x + 10(1+t)], wide enough for
/// all built-in nonsmooth terms at unit weights.
inline GoldenResult prox_1d_golden(const std::function<double(double)>& g_1d, double t,
                                   double x, double tol = 1e-9) {
  const double r = 10.0 * (1.0 + t);
  return prox_1d_golden(g_1d, t, x, x - r, x + r, tol);
}

/// Central-difference gradient, one coordinate at a time.
inline Vec fd_gradient(const SmoothOracle& f, const Vec& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: h must be positive");
  Vec g(x.size());
  Vec probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    probe[i] = xi + h;
    const double fp = f.eval(probe);
    probe[i] = xi - h;
    const double fm = f.eval(probe);
    probe[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Worst one-step contraction of the prox-gradient norm over the diagonal
/// quadratic family with curvature c in [mu, lip]: grid max of |1 - c*t|.
/// The maximand is piecewise linear in c, so the exact maximum sits at an
/// endpoint and the grid (endpoints included) finds it exactly.
inline double worst_ratio_grid(double mu, double lip, double t, int grid_points) {
  if (grid_points < 2) throw std::invalid_argument("worst_ratio_grid: need at least 2 grid points");
  double worst = 0.0;
  for (int j = 0; j < grid_points; ++j) {
    double c = mu + (lip - mu) * j / (grid_points - 1);
    if (j == 0) c = mu;
    if (j == grid_points - 1) c = lip;
    worst = std::max(worst, std::abs(1.0 - c * t));
  }
  return worst;
}

}  // namespace proxcert
