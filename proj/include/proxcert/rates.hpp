#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include "proxcert/errors.hpp"
#include "proxcert/pg.hpp"
#include "proxcert/smooth.hpp"

namespace proxcert {

/// Exact per-step contraction factor of the prox-gradient norm:
/// max(|1 - lip*t|, |1 - mu*t|).
inline double contraction_factor(double t, double mu, double lip) {
  if (!(t > 0.0)) throw std::invalid_argument("contraction_factor: step must be positive");
  if (!(mu >= 0.0)) throw InvalidConstantsError("contraction_factor: mu must be >= 0");
  if (!(lip > 0.0)) throw InvalidConstantsError("contraction_factor: lip must be positive");
  if (mu > lip) throw InvalidConstantsError("contraction_factor: mu exceeds lip");
  return std::max(std::abs(1.0 - lip * t), std::abs(1.0 - mu * t));
}

/// Closed-form rate quantities for a (t, mu, lip) triple and optional PL
/// constant eta.
struct RateBound {
  double rho = 0.0;
  double descent_coeff_now = 0.0;   // t/2, weight of the current prox-gradient norm
  double descent_coeff_next = 0.0;  // t/(2(1 - mu t)); +inf when mu t >= 1
  std::optional<double> pl_rate_new{};       // (1 - eta t)/(1 + eta t)
  std::optional<double> pl_rate_baseline{};  // 1 - eta t
};

inline RateBound make_rate_bound(double t, double mu, double lip,
                                 std::optional<double> eta = {}) {
  RateBound b;
  b.rho = contraction_factor(t, mu, lip);
  b.descent_coeff_now = t / 2.0;
  b.descent_coeff_next = mu * t < 1.0 ? t / (2.0 * (1.0 - mu * t))
                                      : std::numeric_limits<double>::infinity();
  if (eta) {
    if (!(*eta > 0.0)) throw InvalidConstantsError("make_rate_bound: eta must be positive");
    if (*eta * t > 1.0) throw InvalidConstantsError("make_rate_bound: eta * t exceeds 1");
    b.pl_rate_new = (1.0 - *eta * t) / (1.0 + *eta * t);
    b.pl_rate_baseline = 1.0 - *eta * t;
  }
  return b;
}

/// Slack of the refined sufficient-decrease inequality
///   phi(x) >= phi(x+) + (t/2)||G(x)||^2 + (t/(2(1-mu t)))||G(x+)||^2,
/// i.e. LHS - RHS; nonnegative up to roundoff when 0 < t <= 1/L.
/// With mu = 0 the forward coefficient reduces to t/2.
inline double refined_descent_slack(double phi_x, double phi_xp, double g_norm,
                                    double gp_norm, double t, double mu) {
  if (!(t > 0.0)) throw std::invalid_argument("refined_descent_slack: step must be positive");
  if (!(mu >= 0.0)) throw InvalidConstantsError("refined_descent_slack: mu must be >= 0");
  if (mu * t >= 1.0)
    throw SingularCoefficientError(
        "refined_descent_slack: mu * t >= 1, forward coefficient diverges");
  const double coeff_next = t / (2.0 * (1.0 - mu * t));
  return phi_x - phi_xp - 0.5 * t * g_norm * g_norm - coeff_next * gp_norm * gp_norm;
}

/// One-step bounds on the optimality gap under a PL constant eta:
/// the (1 - eta t)/(1 + eta t) contraction and the classic 1 - eta t baseline.
struct PlBounds {
  double new_bound = 0.0;
  double baseline_bound = 0.0;
};

inline PlBounds pl_gap_bound(double gap, double eta, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("pl_gap_bound: step must be positive");
  if (!(eta > 0.0)) throw InvalidConstantsError("pl_gap_bound: eta must be positive");
  if (eta * t > 1.0) throw InvalidConstantsError("pl_gap_bound: eta * t exceeds 1");
  const double shrink = 1.0 - eta * t;
  return {gap * shrink / (1.0 + eta * t), gap * shrink};
}

/// Slacks (LHS - RHS, nonnegative when the inequality holds) of the four
/// smooth strongly convex interpolation inequalities for a pair of points:
///   (i)   ||dg|| >= mu ||dx||
///   (ii)  lip ||dx|| >= ||dg||
///   (iii) <dg, dx> >= (mu lip/(mu+lip))||dx||^2 + (1/(mu+lip))||dg||^2
///   (iv)  f(x) >= f(y) + <grad f(y), dx> + (1/(2 lip))||dg||^2
///                + (mu lip/(2(lip-mu))) ||dx - dg/lip||^2
/// where dx = x - y and dg = grad f(x) - grad f(y). scale collects the
/// magnitudes involved, for relative tolerance checks.
struct InterpolationSlacks {
  double lower_lip = 0.0;
  double upper_lip = 0.0;
  double inner_prod = 0.0;
  double interp = 0.0;
  double scale = 1.0;
};

inline InterpolationSlacks interpolation_slacks(const SmoothOracle& f, const Vec& x,
                                                const Vec& y) {
  const double mu = f.mu, lip = f.lip;
  if (!(lip > 0.0)) throw InvalidConstantsError("interpolation_slacks: lip must be positive");
  if (mu > lip) throw InvalidConstantsError("interpolation_slacks: mu exceeds lip");

  const double fx = f.eval(x), fy = f.eval(y);
  const Vec gx = f.grad(x), gy = f.grad(y);
  const Vec dx = sub(x, y);
  const Vec dg = sub(gx, gy);
  const double ndx = norm(dx), ndg = norm(dg);

  InterpolationSlacks s;
  s.lower_lip = ndg - mu * ndx;
  s.upper_lip = lip * ndx - ndg;
  s.inner_prod = dot(dg, dx) - (mu * lip / (mu + lip)) * ndx * ndx -
                 (1.0 / (mu + lip)) * ndg * ndg;

  const Vec resid = sub(dx, scaled(dg, 1.0 / lip));
  const double nresid = norm(resid);
  const double base = fx - fy - dot(gy, dx) - ndg * ndg / (2.0 * lip);
  double interp_term = 0.0;
  if (mu < lip) {
    interp_term = (mu * lip / (2.0 * (lip - mu))) * nresid * nresid;
  } else {
    // mu == lip: the coefficient diverges but the residual vanishes for any
    // function in the class, so check that directly and drop the term.
    if (nresid > 1e-12 * std::max(1.0, ndx))
      throw DegenerateInterpolationError(
          "interpolation_slacks: mu == lip but the interpolation residual is nonzero");
  }
  s.interp = base - interp_term;
  s.scale = std::max({1.0, std::abs(fx), std::abs(fy), std::abs(dot(gy, dx)), lip * ndx, ndg,
                      ndg * ndg / (2.0 * lip), std::abs(dot(dg, dx)), interp_term});
  return s;
}

/// Slacks of the per-step contraction chain
///   ||G(x+)|| <= d(0, subdiff at x+) <= rho ||G(x)|| <= rho d(0, subdiff at x)
/// for a consecutive record pair. s1 and s3 need the subdifferential distance
/// (separable g) and are nullopt otherwise; for s2 the distance at x+ falls
/// back to the residual-subgradient norm, which upper-bounds it, making the
/// check stronger.
struct ChainSlacks {
  std::optional<double> s1{};
  double s2 = 0.0;
  std::optional<double> s3{};
};

inline ChainSlacks theorem1_chain_slacks(const IterateRecord& cur, const IterateRecord& next,
                                         double rho) {
  if (next.k != cur.k + 1)
    throw IncompleteRecordError("theorem1_chain_slacks: records are not consecutive");
  if (!std::isfinite(cur.prox_grad_norm) || !std::isfinite(next.prox_grad_norm) ||
      !std::isfinite(cur.residual_grad_norm))
    throw IncompleteRecordError("theorem1_chain_slacks: record norms are not finite");

  ChainSlacks s;
  if (next.subdiff_dist) s.s1 = *next.subdiff_dist - next.prox_grad_norm;
  const double d_next = next.subdiff_dist ? *next.subdiff_dist : cur.residual_grad_norm;
  s.s2 = rho * cur.prox_grad_norm - d_next;
  if (cur.subdiff_dist) s.s3 = rho * *cur.subdiff_dist - rho * cur.prox_grad_norm;
  return s;
}

}  // namespace proxcert
