#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "proxcert/errors.hpp"
#include "proxcert/io.hpp"
#include "proxcert/pg.hpp"
#include "proxcert/rates.hpp"
#include "proxcert/rng.hpp"

namespace proxcert {

enum class CheckName {
  thm1_chain,
  lemma2,
  descent_add20,
  descent_add21,
  descent_add22,
  pl_add23,
  pl_generalized,
  interpolation,
  tightness,
};

inline const std::array<CheckName, 9>& all_checks() {
  static const std::array<CheckName, 9> checks = {
      CheckName::thm1_chain,   CheckName::lemma2,         CheckName::descent_add20,
      CheckName::descent_add21, CheckName::descent_add22, CheckName::pl_add23,
      CheckName::pl_generalized, CheckName::interpolation, CheckName::tightness,
  };
  return checks;
}

inline const char* to_string(CheckName n) {
  switch (n) {
    case CheckName::thm1_chain: return "thm1_chain";
    case CheckName::lemma2: return "lemma2";
    case CheckName::descent_add20: return "descent_add20";
    case CheckName::descent_add21: return "descent_add21";
    case CheckName::descent_add22: return "descent_add22";
    case CheckName::pl_add23: return "pl_add23";
    case CheckName::pl_generalized: return "pl_generalized";
    case CheckName::interpolation: return "interpolation";
    case CheckName::tightness: return "tightness";
  }
  return "unknown";
}

inline std::optional<CheckName> parse_check_name(std::string_view s) {
  for (CheckName n : all_checks())
    if (s == to_string(n)) return n;
  return std::nullopt;
}

/// Outcome of one inequality family over a whole trace. worst_slack is the
/// most adverse slack seen; its units are relative (slack divided by the
/// local magnitude scale) or absolute depending on the check, recorded via
/// the tolerance the check was held to. passed <=> worst_slack >= -tolerance.
struct CheckResult {
  CheckName name{};
  bool applicable = true;
  bool passed = true;
  double worst_slack = std::numeric_limits<double>::infinity();
  int worst_iteration = -1;
  double tolerance = 0.0;
  std::string note;
};

struct CertificationReport {
  std::string problem_id;
  double step = 0.0;
  std::vector<CheckResult> checks;
  bool overall = true;  // conjunction of per-check passes
};

namespace tolerances {
constexpr double kChainRel = 1e-10;
constexpr double kLemma2Abs = 1e-10;
constexpr double kDescentRel = 1e-10;
constexpr double kPlRel = 1e-10;
constexpr double kInterpolationRel = 1e-9;
// Contraction ratios with a denominator below this are converged noise.
constexpr double kRatioDenomFloor = 1e-14;
}  // namespace tolerances

namespace detail {

struct WorstSlack {
  double worst = std::numeric_limits<double>::infinity();
  int at = -1;
  bool any = false;
  void update(double slack, int k) {
    if (!any || slack < worst) {
      worst = slack;
      at = k;
    }
    any = true;
  }
};

inline CheckResult finish_check(CheckName name, const WorstSlack& w, double tol,
                                std::string note = {}) {
  CheckResult c;
  c.name = name;
  c.tolerance = tol;
  c.note = std::move(note);
  if (!w.any) {
    c.applicable = false;
    if (c.note.empty()) c.note = "no data";
    return c;
  }
  c.worst_slack = w.worst;
  c.worst_iteration = w.at;
  c.passed = w.worst >= -tol;
  return c;
}

inline CheckResult not_applicable(CheckName name, double tol, std::string why) {
  CheckResult c;
  c.name = name;
  c.tolerance = tol;
  c.applicable = false;
  c.note = std::move(why);
  return c;
}

}  // namespace detail

/// Evaluate every requested inequality on a trace produced by run_pg for this
/// problem. Checks whose hypotheses do not hold (step too large, missing
/// constants, wrong nonsmooth structure) are reported not-applicable rather
/// than failed; on a valid problem every applicable check passing is the
/// expected outcome, since the inequalities are theorems.
inline CertificationReport certify_trace(
    const CompositeProblem& p, const Trace& trace, std::string problem_id = "problem",
    const std::vector<CheckName>& which = {all_checks().begin(), all_checks().end()}) {
  using detail::WorstSlack;

  if (trace.records.empty()) throw ConsistencyError("certify_trace: trace has no records");
  if (!(trace.step > 0.0)) throw ConsistencyError("certify_trace: trace step must be positive");
  const auto& recs = trace.records;
  if (recs.front().x.size() != p.smooth.dim)
    throw ConsistencyError("certify_trace: problem and trace dimensions differ");
  {
    const double phi0 = phi_value(p, recs.front().x);
    if (!(std::abs(phi0 - recs.front().phi) <= 1e-9 * std::max(1.0, std::abs(phi0))))
      throw ConsistencyError("certify_trace: trace objective values do not match the problem");
  }

  const double t = trace.step;
  const double mu = p.smooth.mu;
  const double lip = p.smooth.lip;
  const double rho = contraction_factor(t, mu, lip);
  const bool descent_step_ok = t <= (1.0 / lip) * (1.0 + 1e-12);
  const bool zero_g = p.nonsmooth.kind == "zero";
  const std::size_t n_pairs = recs.size() - 1;

  CertificationReport report;
  report.problem_id = std::move(problem_id);
  report.step = t;

  for (CheckName name : all_checks()) {
    bool requested = false;
    for (CheckName w : which) requested |= (w == name);
    if (!requested) continue;

    switch (name) {
      case CheckName::thm1_chain: {
        WorstSlack w;
        for (std::size_t i = 0; i < n_pairs; ++i) {
          const IterateRecord& cur = recs[i];
          const IterateRecord& nxt = recs[i + 1];
          const ChainSlacks s = theorem1_chain_slacks(cur, nxt, rho);
          if (s.s1) {
            const double scale =
                std::max({1.0, *nxt.subdiff_dist, nxt.prox_grad_norm});
            w.update(*s.s1 / scale, cur.k);
          }
          const double d_next = nxt.subdiff_dist ? *nxt.subdiff_dist : cur.residual_grad_norm;
          const double scale2 = std::max({1.0, rho * cur.prox_grad_norm, d_next});
          w.update(s.s2 / scale2, cur.k);
          if (s.s3) {
            const double scale3 =
                std::max({1.0, rho * *cur.subdiff_dist, rho * cur.prox_grad_norm});
            w.update(*s.s3 / scale3, cur.k);
          }
        }
        report.checks.push_back(detail::finish_check(name, w, tolerances::kChainRel));
        break;
      }

      case CheckName::lemma2: {
        WorstSlack w;
        for (const IterateRecord& r : recs)
          if (r.subdiff_dist) w.update(*r.subdiff_dist - r.prox_grad_norm, r.k);
        report.checks.push_back(detail::finish_check(
            name, w, tolerances::kLemma2Abs,
            w.any ? std::string{} : "nonsmooth part is not separable"));
        break;
      }

      case CheckName::descent_add20: {
        if (!descent_step_ok) {
          report.checks.push_back(detail::not_applicable(name, tolerances::kDescentRel,
                                                         "step exceeds 1/L"));
          break;
        }
        WorstSlack w;
        std::string note;
        for (std::size_t i = 0; i < n_pairs; ++i) {
          const IterateRecord& cur = recs[i];
          const IterateRecord& nxt = recs[i + 1];
          const double g2 = cur.prox_grad_norm * cur.prox_grad_norm;
          const double gp2 = nxt.prox_grad_norm * nxt.prox_grad_norm;
          if (mu * t < 1.0) {
            const double coeff = t / (2.0 * (1.0 - mu * t));
            const double slack =
                refined_descent_slack(cur.phi, nxt.phi, cur.prox_grad_norm,
                                      nxt.prox_grad_norm, t, mu);
            const double scale = std::max(
                {1.0, std::abs(cur.phi), std::abs(nxt.phi), 0.5 * t * g2, coeff * gp2});
            w.update(slack / scale, cur.k);
          } else {
            // mu*t == 1 (only mu == lip, t == 1/lip): the forward coefficient
            // diverges, but the step solves the problem in one shot, so use
            // the mu = 0 coefficient and require the next prox-gradient to
            // vanish.
            const double slack = refined_descent_slack(cur.phi, nxt.phi, cur.prox_grad_norm,
                                                       nxt.prox_grad_norm, t, 0.0);
            const double scale =
                std::max({1.0, std::abs(cur.phi), std::abs(nxt.phi), 0.5 * t * g2});
            w.update(slack / scale, cur.k);
            const double gscale = std::max(1.0, cur.prox_grad_norm);
            w.update(tolerances::kDescentRel - nxt.prox_grad_norm / gscale, cur.k);
            note = "mu*t = 1; used mu = 0 coefficient and verified one-step convergence";
          }
        }
        report.checks.push_back(
            detail::finish_check(name, w, tolerances::kDescentRel, std::move(note)));
        break;
      }

      case CheckName::descent_add21: {
        if (!descent_step_ok) {
          report.checks.push_back(detail::not_applicable(name, tolerances::kDescentRel,
                                                         "step exceeds 1/L"));
          break;
        }
        WorstSlack w;
        for (std::size_t i = 0; i < n_pairs; ++i) {
          const IterateRecord& cur = recs[i];
          const IterateRecord& nxt = recs[i + 1];
          const double slack = refined_descent_slack(cur.phi, nxt.phi, cur.prox_grad_norm,
                                                     nxt.prox_grad_norm, t, 0.0);
          const double scale = std::max(
              {1.0, std::abs(cur.phi), std::abs(nxt.phi),
               0.5 * t * cur.prox_grad_norm * cur.prox_grad_norm,
               0.5 * t * nxt.prox_grad_norm * nxt.prox_grad_norm});
          w.update(slack / scale, cur.k);
        }
        report.checks.push_back(detail::finish_check(name, w, tolerances::kDescentRel));
        break;
      }

      case CheckName::descent_add22: {
        if (!descent_step_ok) {
          report.checks.push_back(detail::not_applicable(name, tolerances::kDescentRel,
                                                         "step exceeds 1/L"));
          break;
        }
        if (!zero_g) {
          report.checks.push_back(detail::not_applicable(name, tolerances::kDescentRel,
                                                         "nonsmooth part is not zero"));
          break;
        }
        // Gradient-descent form: with g = 0 the objective is f and the bound
        // is stated on true gradient norms.
        std::vector<double> gn(recs.size());
        for (std::size_t i = 0; i < recs.size(); ++i) gn[i] = norm(p.smooth.grad(recs[i].x));
        WorstSlack w;
        for (std::size_t i = 0; i < n_pairs; ++i) {
          const double slack =
              refined_descent_slack(recs[i].phi, recs[i + 1].phi, gn[i], gn[i + 1], t, 0.0);
          const double scale =
              std::max({1.0, std::abs(recs[i].phi), std::abs(recs[i + 1].phi),
                        0.5 * t * gn[i] * gn[i], 0.5 * t * gn[i + 1] * gn[i + 1]});
          w.update(slack / scale, recs[i].k);
        }
        report.checks.push_back(detail::finish_check(name, w, tolerances::kDescentRel));
        break;
      }

      case CheckName::pl_add23: {
        const std::optional<double> eta =
            p.pl_constant ? p.pl_constant : p.smooth.eta_pl;
        if (!zero_g || !p.known_min || !eta || !descent_step_ok) {
          report.checks.push_back(detail::not_applicable(
              name, tolerances::kPlRel,
              !zero_g          ? "nonsmooth part is not zero"
              : !p.known_min   ? "known_min not provided"
              : !eta           ? "no PL constant available"
                               : "step exceeds 1/L"));
          break;
        }
        WorstSlack w;
        const double km = *p.known_min;
        for (std::size_t i = 0; i < n_pairs; ++i) {
          const double gap = recs[i].phi - km;
          const double gap_next = recs[i + 1].phi - km;
          if (gap < -1e-9 * std::max(1.0, std::abs(recs[i].phi))) {
            w.update(gap, recs[i].k);  // objective dipped below the declared minimum
            continue;
          }
          const PlBounds b = pl_gap_bound(gap, *eta, t);
          const double scale = std::max({1.0, std::abs(gap), std::abs(gap_next)});
          w.update((b.new_bound - gap_next) / scale, recs[i].k);
        }
        char buf[64];
        std::snprintf(buf, sizeof(buf), "eta=%.12g", *eta);
        report.checks.push_back(
            detail::finish_check(name, w, tolerances::kPlRel, buf));
        break;
      }

      case CheckName::pl_generalized: {
        if (!p.known_min || !descent_step_ok) {
          report.checks.push_back(detail::not_applicable(
              name, tolerances::kPlRel,
              !p.known_min ? "known_min not provided" : "step exceeds 1/L"));
          break;
        }
        const double km = *p.known_min;
        const double gap0 = recs.front().phi - km;
        const double gap_floor = 1e-12 * std::max(1.0, std::abs(gap0));
        double eta = 0.0;
        std::string grade;
        if (p.pl_constant) {
          eta = *p.pl_constant;
          grade = "supplied-eta";
        } else {
          // Self-consistent constant: the largest eta for which the
          // generalized PL inequality holds at every recorded iterate.
          double eta_hat = std::numeric_limits<double>::infinity();
          for (const IterateRecord& r : recs) {
            const double gap = r.phi - km;
            if (gap > gap_floor)
              eta_hat = std::min(eta_hat, 0.5 * r.prox_grad_norm * r.prox_grad_norm / gap);
          }
          if (!std::isfinite(eta_hat) || !(eta_hat > 0.0)) {
            report.checks.push_back(detail::not_applicable(
                name, tolerances::kPlRel, "no usable gap data for an empirical eta"));
            break;
          }
          eta = std::min(eta_hat, 1.0 / t);
          grade = "empirical-eta";
        }
        WorstSlack w;
        for (std::size_t i = 0; i < n_pairs; ++i) {
          const double gap = recs[i].phi - km;
          if (gap <= gap_floor) continue;
          const double gap_next = recs[i + 1].phi - km;
          const PlBounds b = pl_gap_bound(gap, eta, t);
          const double scale = std::max({1.0, std::abs(gap), std::abs(gap_next)});
          w.update((b.new_bound - gap_next) / scale, recs[i].k);
        }
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s eta=%.12g", grade.c_str(), eta);
        report.checks.push_back(detail::finish_check(name, w, tolerances::kPlRel, buf));
        break;
      }

      case CheckName::interpolation: {
        WorstSlack w;
        for (std::size_t i = 0; i < n_pairs; ++i) {
          const InterpolationSlacks s =
              interpolation_slacks(p.smooth, recs[i].x, recs[i + 1].x);
          w.update(s.lower_lip / s.scale, recs[i].k);
          w.update(s.upper_lip / s.scale, recs[i].k);
          w.update(s.inner_prod / s.scale, recs[i].k);
          w.update(s.interp / s.scale, recs[i].k);
        }
        report.checks.push_back(
            detail::finish_check(name, w, tolerances::kInterpolationRel));
        break;
      }

      case CheckName::tightness: {
        // Sharpness direction, ||G(x+)|| <= rho ||G(x)||, evaluated in slack
        // form: raw ratios lose their last digits once the norms shrink, while
        // the scaled slack stays at roundoff for every pair. The worst ratio
        // (denominator floor per the measurement rule) is kept as a statistic.
        WorstSlack w;
        double measured = -1.0;
        for (std::size_t i = 0; i < n_pairs; ++i) {
          const double den = recs[i].prox_grad_norm;
          const double num = recs[i + 1].prox_grad_norm;
          w.update((rho * den - num) / std::max(1.0, den), recs[i].k);
          if (den >= tolerances::kRatioDenomFloor) measured = std::max(measured, num / den);
        }
        char buf[96];
        if (measured >= 0.0)
          std::snprintf(buf, sizeof(buf), "measured=%.17g rho=%.17g", measured, rho);
        else
          std::snprintf(buf, sizeof(buf), "rho=%.17g; no measurable ratio", rho);
        report.checks.push_back(
            detail::finish_check(name, w, tolerances::kChainRel, w.any ? buf : ""));
        break;
      }
    }
  }

  report.overall = true;
  for (const CheckResult& c : report.checks) report.overall &= c.passed;
  return report;
}

/// A one-dimensional instance on which one PG step contracts the
/// prox-gradient norm by exactly the worst-case factor: the quadratic
/// (c/2) x^2 with curvature at whichever end of [mu, lip] maximizes
/// |1 - c t| (ties go to mu), started from x = 1.
struct WorstCaseInstance {
  CompositeProblem problem;
  Vec x0;
};

inline WorstCaseInstance worst_case_instance(double mu, double lip, double t) {
  if (!(mu > 0.0) || !(lip >= mu))
    throw InvalidConstantsError("worst_case_instance: need 0 < mu <= lip");
  if (!(t > 0.0)) throw std::invalid_argument("worst_case_instance: step must be positive");
  const double c =
      std::abs(1.0 - mu * t) >= std::abs(1.0 - lip * t) ? mu : lip;
  CompositeProblem p;
  p.smooth = make_quadratic({{c}, {}, 0.0});
  p.nonsmooth = zero_oracle();
  p.known_min = 0.0;
  p.pl_constant = c;
  return {std::move(p), Vec{1.0}};
}

/// Largest per-step contraction ratio of the prox-gradient norm observed over
/// `steps` PG iterations. Pairs whose denominator has converged below 1e-14
/// are skipped as 0/0 noise.
inline double tightness_measurement(const CompositeProblem& p, const Vec& x0, double t,
                                    int steps) {
  if (steps < 1) throw std::invalid_argument("tightness_measurement: need at least one step");
  const Trace trace = run_pg(p, x0, t, steps, 0.0);
  if (trace.records.front().prox_grad_norm == 0.0)
    throw DegenerateStartError("tightness_measurement: zero prox-gradient at start");
  double measured = -1.0;
  for (std::size_t i = 0; i + 1 < trace.records.size(); ++i) {
    const double denom = trace.records[i].prox_grad_norm;
    if (denom < tolerances::kRatioDenomFloor) continue;
    measured = std::max(measured, trace.records[i + 1].prox_grad_norm / denom);
  }
  if (measured < 0.0)
    throw DegenerateStartError("tightness_measurement: no measurable contraction ratio");
  return measured;
}

enum class GKind { zero, l1, box, elastic_net };

inline const char* to_string(GKind k) {
  switch (k) {
    case GKind::zero: return "zero";
    case GKind::l1: return "l1";
    case GKind::box: return "box";
    case GKind::elastic_net: return "elastic_net";
  }
  return "unknown";
}

inline std::optional<GKind> parse_g_kind(std::string_view s) {
  for (GKind k : {GKind::zero, GKind::l1, GKind::box, GKind::elastic_net})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

struct SuiteInstance {
  std::string id;
  CompositeProblem problem;
  Vec x0;
};

namespace detail {

// Exact minimum of sum_i [ (c_i/2) x^2 + b_i x + g_i(x) ] for the built-in
// separable nonsmooth kinds at unit weights, solved coordinate-wise.
// nullopt when some coordinate is unbounded below (possible only for c_i = 0).
inline std::optional<double> exact_diag_composite_min(const Vec& c, const Vec& b, GKind kind) {
  double total = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double ci = c[i], bi = b[i];
    double xi = 0.0;
    switch (kind) {
      case GKind::zero:
        if (ci > 0.0)
          xi = -bi / ci;
        else if (bi != 0.0)
          return std::nullopt;
        total += 0.5 * ci * xi * xi + bi * xi;
        break;
      case GKind::l1:
        if (ci > 0.0)
          xi = soft_threshold(-bi, 1.0) / ci;
        else if (std::abs(bi) > 1.0)
          return std::nullopt;
        total += 0.5 * ci * xi * xi + bi * xi + std::abs(xi);
        break;
      case GKind::box:
        if (ci > 0.0)
          xi = std::min(1.0, std::max(-1.0, -bi / ci));
        else
          xi = bi > 0.0 ? -1.0 : (bi < 0.0 ? 1.0 : 0.0);
        total += 0.5 * ci * xi * xi + bi * xi;
        break;
      case GKind::elastic_net:
        xi = soft_threshold(-bi, 1.0) / (ci + 1.0);
        total += 0.5 * ci * xi * xi + bi * xi + std::abs(xi) + 0.5 * xi * xi;
        break;
    }
  }
  return total;
}

}  // namespace detail

/// Deterministic instance generator: diagonal quadratics with spectrum
/// sampled log-uniformly in [mu, lip] (both endpoints always present),
/// standard-normal linear terms, start points scaled to norm 10, and the
/// chosen nonsmooth kind at unit weights. The exact composite minimum is
/// attached where it exists, so PL checks can run on the suite.
inline std::vector<SuiteInstance> random_suite(std::uint64_t seed, int count, int dim,
                                               double mu, double lip, GKind kind) {
  if (count < 1 || dim < 1)
    throw std::invalid_argument("random_suite: count and dim must be >= 1");
  if (!(mu >= 0.0) || !(lip > 0.0) || mu > lip)
    throw InvalidConstantsError("random_suite: need 0 <= mu <= lip, lip > 0");

  SplitMix64 rng(seed);
  std::vector<SuiteInstance> suite;
  suite.reserve(static_cast<std::size_t>(count));
  for (int idx = 0; idx < count; ++idx) {
    Vec c(static_cast<std::size_t>(dim));
    if (dim == 1) {
      c[0] = lip;
    } else if (mu == lip) {
      for (double& v : c) v = lip;
    } else {
      c[0] = mu;
      c[1] = lip;
      for (int j = 2; j < dim; ++j) {
        const double sample = mu > 0.0 ? rng.log_uniform(mu, lip) : rng.uniform(mu, lip);
        // exp/log round-trips can stray a ulp outside the interval
        c[static_cast<std::size_t>(j)] = std::min(std::max(sample, mu), lip);
      }
    }
    Vec b(c.size());
    for (double& v : b) v = rng.normal();
    Vec x0(c.size());
    for (double& v : x0) v = rng.normal();
    const double nx = norm(x0);
    if (nx > 1e-12)
      x0 = scaled(x0, 10.0 / nx);
    else
      x0[0] = 10.0;

    NonsmoothOracle g;
    switch (kind) {
      case GKind::zero: g = zero_oracle(); break;
      case GKind::l1: g = make_l1(1.0); break;
      case GKind::box: g = make_box(Vec(c.size(), -1.0), Vec(c.size(), 1.0)); break;
      case GKind::elastic_net: g = make_elastic_net(1.0, 1.0); break;
    }

    CompositeProblem p;
    p.smooth = make_quadratic({c, b, 0.0});
    p.nonsmooth = std::move(g);
    p.known_min = detail::exact_diag_composite_min(c, b, kind);
    if (kind == GKind::zero && mu > 0.0) p.pl_constant = mu;

    char id[96];
    std::snprintf(id, sizeof(id), "%s-d%d-s%llu-%03d", to_string(kind), dim,
                  static_cast<unsigned long long>(seed), idx);
    suite.push_back({id, std::move(p), std::move(x0)});
  }
  return suite;
}

inline nlohmann::json report_to_json(const CertificationReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckResult& c : r.checks) {
    checks.push_back({
        {"name", to_string(c.name)},
        {"applicable", c.applicable},
        {"passed", c.passed},
        {"worst_slack", c.worst_slack},  // non-finite serializes as null
        {"worst_iteration", c.worst_iteration},
        {"tolerance", c.tolerance},
        {"note", c.note},
    });
  }
  return nlohmann::json{{"problem_id", r.problem_id},
                        {"step", r.step},
                        {"overall", r.overall},
                        {"checks", checks}};
}

inline std::string report_checks_csv_header() {
  return "problem_id,step,check,applicable,passed,worst_slack,worst_iteration,tolerance,note\n";
}

/// Flat per-check CSV rows; notes use semicolons internally, never commas.
inline void append_report_csv(std::string& out, const CertificationReport& r) {
  for (const CheckResult& c : r.checks) {
    out += r.problem_id;
    out += ',';
    out += format_g17(r.step);
    out += ',';
    out += to_string(c.name);
    out += ',';
    out += c.applicable ? "1" : "0";
    out += ',';
    out += c.passed ? "1" : "0";
    out += ',';
    out += std::isfinite(c.worst_slack) ? format_g17(c.worst_slack) : std::string{};
    out += ',';
    out += std::to_string(c.worst_iteration);
    out += ',';
    out += format_g17(c.tolerance);
    out += ',';
    out += c.note;
    out += '\n';
  }
}

}  // namespace proxcert
