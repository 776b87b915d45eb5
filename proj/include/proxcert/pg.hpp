#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "proxcert/errors.hpp"
#include "proxcert/io.hpp"
#include "proxcert/problem.hpp"

namespace proxcert {

/// One application of the proximal gradient map at step t:
///   x_plus    = prox(x - t * grad f(x), t)
///   prox_grad = (x - x_plus) / t
///   s_plus    = prox_grad - grad f(x), a subgradient of g at x_plus.
struct PgStep {
  Vec prox_grad;
  Vec x_plus;
  Vec s_plus;
};

inline PgStep prox_grad_map(const CompositeProblem& p, const Vec& x, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("prox_grad_map: step must be positive");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]))
      throw NumericError("prox_grad_map: x is not finite at coordinate " + std::to_string(i));

  const Vec gradient = p.smooth.grad(x);
  for (std::size_t i = 0; i < gradient.size(); ++i)
    if (!std::isfinite(gradient[i]))
      throw NumericError("prox_grad_map: gradient is not finite at coordinate " +
                         std::to_string(i));

  Vec forward(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) forward[i] = x[i] - t * gradient[i];

  PgStep step;
  step.x_plus = p.nonsmooth.prox(forward, t);
  step.prox_grad.resize(x.size());
  step.s_plus.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    step.prox_grad[i] = (x[i] - step.x_plus[i]) / t;
    step.s_plus[i] = step.prox_grad[i] - gradient[i];
  }
  return step;
}

/// Everything measured at one iterate. x_plus/s_plus/residual_grad_norm
/// describe the step taken FROM this iterate; the next record's x is exactly
/// this record's x_plus (copied verbatim, no recomputation drift).
struct IterateRecord {
  int k = 0;
  Vec x;
  double phi = 0.0;
  Vec prox_grad;
  double prox_grad_norm = 0.0;
  Vec x_plus;
  Vec s_plus;
  double residual_grad_norm = 0.0;             // ||grad f(x_plus) + s_plus||
  std::optional<double> subdiff_dist{};        // d(0, subdifferential at x), separable g only
};

enum class StopReason { max_iters, tolerance_met, stalled };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::max_iters: return "max_iters";
    case StopReason::tolerance_met: return "tolerance_met";
    case StopReason::stalled: return "stalled";
  }
  return "unknown";
}

struct Trace {
  double step = 0.0;
  std::vector<IterateRecord> records;
  StopReason stop_reason = StopReason::max_iters;
};

/// Constant-step proximal gradient iteration. Stops when the prox-gradient
/// norm falls to tol * max(1, initial prox-gradient norm), after max_iters
/// steps, or at a bit-exact fixed point. A start point outside the nonsmooth
/// domain is projected by one pure prox step and recorded as iterate 0.
inline Trace run_pg(const CompositeProblem& p, Vec x0, double t, int max_iters, double tol) {
  if (!(t > 0.0)) throw std::invalid_argument("run_pg: step must be positive");
  if (max_iters < 0) throw std::invalid_argument("run_pg: max_iters must be >= 0");
  if (!(tol >= 0.0)) throw std::invalid_argument("run_pg: tol must be >= 0");
  if (x0.size() != p.smooth.dim) throw std::invalid_argument("run_pg: x0 dimension mismatch");

  if (!std::isfinite(p.nonsmooth.eval(x0))) x0 = p.nonsmooth.prox(x0, t);
  if (!std::isfinite(phi_value(p, x0)))
    throw StartPointError("run_pg: objective not finite at start point");

  Trace trace;
  trace.step = t;
  Vec x = std::move(x0);
  double threshold = 0.0;

  for (int k = 0;; ++k) {
    PgStep s = prox_grad_map(p, x, t);

    IterateRecord rec;
    rec.k = k;
    rec.x = x;
    rec.phi = phi_value(p, x);
    rec.prox_grad_norm = norm(s.prox_grad);
    rec.prox_grad = std::move(s.prox_grad);
    rec.residual_grad_norm = norm(add(p.smooth.grad(s.x_plus), s.s_plus));
    rec.x_plus = std::move(s.x_plus);
    rec.s_plus = std::move(s.s_plus);
    if (p.nonsmooth.separable) rec.subdiff_dist = subdiff_distance(p, x).value;
    trace.records.push_back(std::move(rec));

    const IterateRecord& r = trace.records.back();
    if (k == 0) threshold = tol * std::max(1.0, r.prox_grad_norm);
    if (r.prox_grad_norm <= threshold) {
      trace.stop_reason = StopReason::tolerance_met;
      break;
    }
    if (r.x_plus == r.x) {
      // Fixed point below tolerance resolution; unreachable for the built-in
      // oracles (x_plus == x forces a zero prox-gradient) but kept as a guard
      // for custom prox implementations.
      trace.stop_reason = StopReason::stalled;
      break;
    }
    if (k >= max_iters) {
      trace.stop_reason = StopReason::max_iters;
      break;
    }
    x = r.x_plus;
  }
  return trace;
}

/// CSV serialization: one row per record, 17 significant digits so doubles
/// round-trip exactly. Empty cells where a quantity is not defined.
inline std::string trace_to_csv(const Trace& trace) {
  std::string out = "k,phi,prox_grad_norm,residual_grad_norm,subdiff_dist,ratio_to_prev\n";
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const IterateRecord& r = trace.records[i];
    out += std::to_string(r.k);
    out += ',';
    out += format_g17(r.phi);
    out += ',';
    out += format_g17(r.prox_grad_norm);
    out += ',';
    out += format_g17(r.residual_grad_norm);
    out += ',';
    if (r.subdiff_dist) out += format_g17(*r.subdiff_dist);
    out += ',';
    if (i > 0 && trace.records[i - 1].prox_grad_norm > 0.0)
      out += format_g17(r.prox_grad_norm / trace.records[i - 1].prox_grad_norm);
    out += '\n';
  }
  return out;
}

}  // namespace proxcert
