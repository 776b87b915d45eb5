#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "proxcert/certify.hpp"
#include "proxcert/io.hpp"
#include "proxcert/pg.hpp"
#include "proxcert/rng.hpp"

// Config-driven experiment runner backing the CLI. A config is one JSON
// document with an "experiments" array; each entry names a problem, a start
// point, a step size (numeric or symbolic like "1/L" / "2/(L+mu)"), iteration
// limits, and optionally the subset of checks to run.

namespace proxcert {

namespace detail {

inline double json_number(const nlohmann::json& j, const char* what) {
  if (!j.is_number()) throw InvalidSpecError(std::string("expected a number for ") + what);
  return j.get<double>();
}

// Bound entries may be numbers or the strings "inf" / "-inf".
inline double json_extended_number(const nlohmann::json& j, const char* what) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw InvalidSpecError(std::string("unrecognized extended value for ") + what + ": " + s);
  }
  return json_number(j, what);
}

inline Vec vec_from_json(const nlohmann::json& j, const char* what, bool extended = false) {
  if (!j.is_array()) throw InvalidSpecError(std::string("expected an array for ") + what);
  Vec out;
  out.reserve(j.size());
  for (const auto& v : j)
    out.push_back(extended ? json_extended_number(v, what) : json_number(v, what));
  return out;
}

inline Matrix matrix_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw InvalidSpecError(std::string("expected a nonempty array of rows for ") + what);
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) throw InvalidSpecError(std::string(what) + ": rows must be nonempty arrays");
  Matrix A(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw InvalidSpecError(std::string(what) + ": rows have inconsistent lengths");
    for (std::size_t k = 0; k < cols; ++k) A(i, k) = json_number(j[i][k], what);
  }
  return A;
}

inline double parse_strict_double(const std::string& s, const char* what) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw InvalidSpecError(std::string("cannot parse ") + what + ": " + s);
  return v;
}

}  // namespace detail

inline SmoothOracle smooth_from_json(const nlohmann::json& spec) {
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "quadratic") {
    QuadraticSpec q;
    q.diag_spectrum = detail::vec_from_json(spec.at("spectrum"), "quadratic spectrum");
    if (spec.contains("linear")) q.linear_term = detail::vec_from_json(spec.at("linear"), "quadratic linear term");
    if (spec.contains("offset")) q.offset = detail::json_number(spec.at("offset"), "quadratic offset");
    return make_quadratic(q);
  }
  if (kind == "least_squares") {
    return make_least_squares(detail::matrix_from_json(spec.at("A"), "least_squares A"),
                              detail::vec_from_json(spec.at("b"), "least_squares b"));
  }
  if (kind == "logistic") {
    const double reg = spec.contains("l2_reg")
                           ? detail::json_number(spec.at("l2_reg"), "logistic l2_reg")
                           : 0.0;
    return make_logistic(detail::matrix_from_json(spec.at("A"), "logistic A"),
                         detail::vec_from_json(spec.at("labels"), "logistic labels"), reg);
  }
  throw InvalidSpecError("unknown smooth kind: " + kind);
}

inline NonsmoothOracle nonsmooth_from_json(const nlohmann::json& spec) {
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "l1") {
    const double w = spec.contains("weight") ? detail::json_number(spec.at("weight"), "l1 weight") : 1.0;
    return make_l1(w);
  }
  if (kind == "box") {
    return make_box(detail::vec_from_json(spec.at("lo"), "box lo", true),
                    detail::vec_from_json(spec.at("hi"), "box hi", true));
  }
  if (kind == "elastic_net") {
    return make_elastic_net(detail::json_number(spec.at("l1_weight"), "elastic_net l1_weight"),
                            detail::json_number(spec.at("l2_weight"), "elastic_net l2_weight"));
  }
  if (kind == "zero") return zero_oracle();
  throw InvalidSpecError("unknown nonsmooth kind: " + kind);
}

inline CompositeProblem problem_from_json(const nlohmann::json& spec) {
  CompositeProblem p;
  p.smooth = smooth_from_json(spec.at("smooth"));
  p.nonsmooth = nonsmooth_from_json(spec.at("nonsmooth"));
  if (spec.contains("known_min"))
    p.known_min = detail::json_number(spec.at("known_min"), "known_min");
  if (spec.contains("pl_constant"))
    p.pl_constant = detail::json_number(spec.at("pl_constant"), "pl_constant");
  return p;
}

/// Step sizes may be numeric or symbolic in the problem constants:
/// "<number>/L" and "<number>/(L+mu)" are resolved exactly, avoiding
/// transcription error on the canonical choices.
inline double resolve_step(const nlohmann::json& tspec, double mu, double lip) {
  double t = 0.0;
  if (tspec.is_number()) {
    t = tspec.get<double>();
  } else if (tspec.is_string()) {
    std::string s = tspec.get<std::string>();
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
            s.end());
    const std::string lsuf = "/L";
    const std::string lmusuf = "/(L+mu)";
    if (s.size() > lmusuf.size() && s.compare(s.size() - lmusuf.size(), lmusuf.size(), lmusuf) == 0) {
      t = detail::parse_strict_double(s.substr(0, s.size() - lmusuf.size()), "step numerator") /
          (lip + mu);
    } else if (s.size() > lsuf.size() && s.compare(s.size() - lsuf.size(), lsuf.size(), lsuf) == 0) {
      t = detail::parse_strict_double(s.substr(0, s.size() - lsuf.size()), "step numerator") / lip;
    } else {
      t = detail::parse_strict_double(s, "step");
    }
  } else {
    throw InvalidSpecError("step must be a number or a symbolic string");
  }
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidSpecError("step must be positive and finite");
  return t;
}

inline Vec x0_from_json(const nlohmann::json& spec, std::size_t dim,
                        std::optional<std::uint64_t> seed_override) {
  if (spec.is_array()) return detail::vec_from_json(spec, "x0");
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "explicit") return detail::vec_from_json(spec.at("value"), "x0 value");
  if (kind == "random") {
    std::uint64_t seed = spec.at("seed").get<std::uint64_t>();
    if (seed_override) seed = *seed_override;
    const double target =
        spec.contains("norm") ? detail::json_number(spec.at("norm"), "x0 norm") : 10.0;
    SplitMix64 rng(seed);
    Vec x(dim);
    for (double& v : x) v = rng.normal();
    const double n = norm(x);
    if (n > 1e-12) x = scaled(x, target / n);
    return x;
  }
  throw InvalidSpecError("unknown x0 kind: " + kind);
}

struct Experiment {
  std::string id;
  CompositeProblem problem;
  Vec x0;
  double t = 0.0;
  int max_iters = 200;
  double tol = 1e-10;
  std::vector<CheckName> checks{all_checks().begin(), all_checks().end()};
};

inline std::vector<Experiment> parse_config(const nlohmann::json& cfg,
                                            std::optional<std::uint64_t> seed_override = {}) {
  if (!cfg.contains("experiments") || !cfg.at("experiments").is_array())
    throw InvalidSpecError("config needs an \"experiments\" array");
  std::vector<Experiment> out;
  for (const auto& entry : cfg.at("experiments")) {
    Experiment e;
    e.id = entry.at("id").get<std::string>();
    if (e.id.empty()) throw InvalidSpecError("experiment id must be nonempty");
    for (const Experiment& prev : out)
      if (prev.id == e.id) throw InvalidSpecError("duplicate experiment id: " + e.id);
    try {
      e.problem = problem_from_json(entry.at("problem"));
      e.t = resolve_step(entry.at("t"), e.problem.smooth.mu, e.problem.smooth.lip);
      e.x0 = x0_from_json(entry.at("x0"), e.problem.smooth.dim, seed_override);
      if (entry.contains("max_iters")) e.max_iters = entry.at("max_iters").get<int>();
      if (entry.contains("tol")) e.tol = detail::json_number(entry.at("tol"), "tol");
      if (entry.contains("checks")) {
        e.checks.clear();
        for (const auto& c : entry.at("checks")) {
          const auto name = parse_check_name(c.get<std::string>());
          if (!name) throw InvalidSpecError("unknown check name: " + c.get<std::string>());
          e.checks.push_back(*name);
        }
      }
    } catch (const nlohmann::json::exception& ex) {
      throw InvalidSpecError("experiment \"" + e.id + "\": " + ex.what());
    }
    out.push_back(std::move(e));
  }
  return out;
}

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::optional<std::uint64_t> seed_override{};
  bool quiet = false;
};

/// Exit-code contract: 0 when every certification passes, 2 when any check
/// fails, 1 on config or IO problems. All experiments run even after a
/// failure so that every report gets written.
inline int run_config_file(const std::filesystem::path& config_path, const RunOptions& opt,
                           std::ostream& out, std::ostream& err) {
  std::vector<Experiment> experiments;
  try {
    const nlohmann::json cfg = nlohmann::json::parse(read_file(config_path));
    experiments = parse_config(cfg, opt.seed_override);
  } catch (const std::exception& ex) {
    err << config_path.string() << ": " << ex.what() << "\n";
    return 1;
  }

  bool all_passed = true;
  try {
    std::filesystem::create_directories(opt.out_dir);
    std::string checks_csv = report_checks_csv_header();
    for (const Experiment& e : experiments) {
      if (e.t > 2.0 / e.problem.smooth.lip)
        err << "warning: experiment \"" << e.id
            << "\" uses a step above 2/L; contraction is not guaranteed\n";
      const Trace trace = run_pg(e.problem, e.x0, e.t, e.max_iters, e.tol);
      const CertificationReport report = certify_trace(e.problem, trace, e.id, e.checks);
      write_file_atomic(opt.out_dir / (e.id + ".trace.csv"), trace_to_csv(trace));
      write_file_atomic(opt.out_dir / (e.id + ".report.json"),
                        report_to_json(report).dump(2) + "\n");
      append_report_csv(checks_csv, report);
      all_passed &= report.overall;
      if (!opt.quiet) out << e.id << ": " << (report.overall ? "pass" : "FAIL") << "\n";
    }
    write_file_atomic(opt.out_dir / "checks.csv", checks_csv);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  }
  return all_passed ? 0 : 2;
}

/// Worst-case witness table over a step grid: one CSV row per step with the
/// predicted contraction factor, the ratio measured on the constructed
/// instance, and their difference. Exit 0 only if every difference is below
/// 1e-12.
inline int tightness_table(double mu, double lip, const std::vector<std::string>& t_specs,
                           std::ostream& out, std::ostream& err) {
  try {
    out << "t,rho,measured_worst_ratio,abs_diff\n";
    double worst = 0.0;
    for (const std::string& spec : t_specs) {
      const double t = resolve_step(nlohmann::json(spec), mu, lip);
      const double rho = contraction_factor(t, mu, lip);
      const WorstCaseInstance wc = worst_case_instance(mu, lip, t);
      const double measured = tightness_measurement(wc.problem, wc.x0, t, 12);
      const double diff = std::abs(measured - rho);
      worst = std::max(worst, diff);
      out << format_g17(t) << ',' << format_g17(rho) << ',' << format_g17(measured) << ','
          << format_g17(diff) << "\n";
    }
    return worst < 1e-12 ? 0 : 2;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  }
}

/// Gap-versus-envelope table for one config entry: per iteration the observed
/// optimality gap, the (1-eta t)/(1+eta t) envelope, and the classic 1-eta t
/// baseline envelope. Exit 0 only if the gap stays within the new envelope.
inline int pl_compare_cmd(const std::filesystem::path& config_path, const std::string& entry_id,
                          std::optional<std::uint64_t> seed_override, std::ostream& out,
                          std::ostream& err) {
  try {
    const nlohmann::json cfg = nlohmann::json::parse(read_file(config_path));
    const std::vector<Experiment> experiments = parse_config(cfg, seed_override);
    const Experiment* chosen = nullptr;
    for (const Experiment& e : experiments)
      if (e.id == entry_id) chosen = &e;
    if (!chosen) {
      err << "no experiment with id \"" << entry_id << "\" in " << config_path.string() << "\n";
      return 1;
    }
    const CompositeProblem& p = chosen->problem;
    if (!p.known_min) {
      err << "experiment \"" << entry_id << "\" has no known_min; gaps are undefined\n";
      return 1;
    }
    const std::optional<double> eta = p.pl_constant ? p.pl_constant : p.smooth.eta_pl;
    if (!eta) {
      err << "experiment \"" << entry_id << "\" has no PL constant\n";
      return 1;
    }
    const PlBounds rates = pl_gap_bound(1.0, *eta, chosen->t);

    const Trace trace = run_pg(p, chosen->x0, chosen->t, chosen->max_iters, 0.0);
    const double gap0 = trace.records.front().phi - *p.known_min;
    out << "k,gap,new_bound_envelope,baseline_envelope,within_new_bound\n";
    bool all_ok = true;
    for (const IterateRecord& r : trace.records) {
      const double gap = r.phi - *p.known_min;
      const double envelope = gap0 * std::pow(rates.new_bound, static_cast<double>(r.k));
      const double baseline = gap0 * std::pow(rates.baseline_bound, static_cast<double>(r.k));
      const bool ok = gap <= envelope * (1.0 + 1e-9);
      all_ok &= ok;
      out << r.k << ',' << format_g17(gap) << ',' << format_g17(envelope) << ','
          << format_g17(baseline) << ',' << (ok ? '1' : '0') << "\n";
    }
    return all_ok ? 0 : 2;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  }
}

}  // namespace proxcert
