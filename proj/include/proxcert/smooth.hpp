#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "proxcert/errors.hpp"
#include "proxcert/linalg.hpp"

namespace proxcert {

/// Value/gradient oracle for a smooth convex function with declared curvature
/// constants: mu-strong convexity and a Lipschitz constant for the gradient.
/// Oracles are immutable after construction and safe to evaluate concurrently.
struct SmoothOracle {
  std::function<double(const Vec&)> eval;
  std::function<Vec(const Vec&)> grad;
  double mu = 0.0;
  double lip = 0.0;
  std::size_t dim = 0;
  /// Smallest nonzero curvature when meaningfully known (least squares);
  /// doubles as the default Polyak-Lojasiewicz constant.
  std::optional<double> eta_pl{};
};

/// Diagonal quadratic: 0.5 * sum c_i x_i^2 + <b, x> + offset. Storing the
/// spectrum directly makes mu and lip exact by construction.
struct QuadraticSpec {
  Vec diag_spectrum;
  Vec linear_term;  // empty means zero
  double offset = 0.0;
};

namespace detail {

inline void require_dim(const Vec& x, std::size_t dim, const char* who) {
  if (x.size() != dim)
    throw std::invalid_argument(std::string(who) + ": input has dimension " +
                                std::to_string(x.size()) + ", oracle expects " +
                                std::to_string(dim));
}

// log(1 + exp(z)) without overflow for large positive z.
inline double log1p_exp(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace detail

inline SmoothOracle make_quadratic(const QuadraticSpec& spec) {
  const Vec& c = spec.diag_spectrum;
  if (c.empty()) throw InvalidSpecError("make_quadratic: spectrum is empty");
  double lo = c[0], hi = c[0];
  for (double v : c) {
    if (!(v >= 0.0)) throw InvalidSpecError("make_quadratic: spectrum entries must be >= 0");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi > 0.0)) throw InvalidSpecError("make_quadratic: spectrum needs a positive entry");
  Vec b = spec.linear_term.empty() ? Vec(c.size(), 0.0) : spec.linear_term;
  if (b.size() != c.size())
    throw InvalidSpecError("make_quadratic: linear term length does not match spectrum");

  auto data = std::make_shared<const QuadraticSpec>(QuadraticSpec{c, std::move(b), spec.offset});
  const std::size_t n = c.size();

  SmoothOracle f;
  f.dim = n;
  f.mu = lo;
  f.lip = hi;
  f.eval = [data, n](const Vec& x) {
    detail::require_dim(x, n, "quadratic eval");
    double v = data->offset;
    for (std::size_t i = 0; i < n; ++i)
      v += 0.5 * data->diag_spectrum[i] * x[i] * x[i] + data->linear_term[i] * x[i];
    return v;
  };
  f.grad = [data, n](const Vec& x) {
    detail::require_dim(x, n, "quadratic grad");
    Vec g(n);
    for (std::size_t i = 0; i < n; ++i)
      g[i] = data->diag_spectrum[i] * x[i] + data->linear_term[i];
    return g;
  };
  return f;
}

/// 0.5 * ||Ax - b||^2. Curvature constants come from the eigenvalues of the
/// Gram matrix; eta_pl is the smallest numerically nonzero one.
inline SmoothOracle make_least_squares(const Matrix& A, const Vec& b) {
  if (A.rows == 0 || A.cols == 0)
    throw InvalidSpecError("make_least_squares: A needs at least one row and column");
  if (b.size() != A.rows)
    throw InvalidSpecError("make_least_squares: A has " + std::to_string(A.rows) +
                           " rows but b has " + std::to_string(b.size()) + " entries");

  const auto eig = jacobi_eigenvalues(gram(A));
  const double lip = eig.back();
  if (!(lip > 0.0)) throw InvalidSpecError("make_least_squares: A is identically zero");
  const double zero_cut = lip * 1e-10;

  struct Data {
    Matrix A;
    Vec b;
  };
  auto data = std::make_shared<const Data>(Data{A, b});
  const std::size_t n = A.cols;

  SmoothOracle f;
  f.dim = n;
  f.lip = lip;
  f.mu = eig.front() > zero_cut ? eig.front() : 0.0;
  for (double v : eig) {
    if (v > zero_cut) {
      f.eta_pl = v;
      break;
    }
  }
  f.eval = [data, n](const Vec& x) {
    detail::require_dim(x, n, "least_squares eval");
    const Vec r = sub(matvec(data->A, x), data->b);
    return 0.5 * norm_sq(r);
  };
  f.grad = [data, n](const Vec& x) {
    detail::require_dim(x, n, "least_squares grad");
    const Vec r = sub(matvec(data->A, x), data->b);
    return matvec_transposed(data->A, r);
  };
  return f;
}

/// Binary logistic loss with optional ridge term:
///   sum_i log(1 + exp(-y_i <a_i, x>)) + (l2_reg / 2) ||x||^2.
inline SmoothOracle make_logistic(const Matrix& A, const Vec& labels, double l2_reg) {
  if (A.rows == 0 || A.cols == 0)
    throw InvalidSpecError("make_logistic: A needs at least one row and column");
  if (labels.size() != A.rows)
    throw InvalidSpecError("make_logistic: label count does not match rows of A");
  for (double y : labels)
    if (y != 1.0 && y != -1.0)
      throw InvalidSpecError("make_logistic: labels must be +1 or -1");
  if (!(l2_reg >= 0.0)) throw InvalidSpecError("make_logistic: l2_reg must be >= 0");

  const auto eig = jacobi_eigenvalues(gram(A));

  struct Data {
    Matrix A;
    Vec y;
    double reg;
  };
  auto data = std::make_shared<const Data>(Data{A, labels, l2_reg});
  const std::size_t n = A.cols;

  SmoothOracle f;
  f.dim = n;
  f.lip = eig.back() / 4.0 + l2_reg;
  f.mu = l2_reg;
  f.eval = [data, n](const Vec& x) {
    detail::require_dim(x, n, "logistic eval");
    double v = 0.5 * data->reg * norm_sq(x);
    for (std::size_t i = 0; i < data->A.rows; ++i) {
      double z = 0.0;
      for (std::size_t j = 0; j < n; ++j) z += data->A(i, j) * x[j];
      v += detail::log1p_exp(-data->y[i] * z);
    }
    return v;
  };
  f.grad = [data, n](const Vec& x) {
    detail::require_dim(x, n, "logistic grad");
    Vec g = scaled(x, data->reg);
    for (std::size_t i = 0; i < data->A.rows; ++i) {
      double z = 0.0;
      for (std::size_t j = 0; j < n; ++j) z += data->A(i, j) * x[j];
      const double w = -data->y[i] * detail::sigmoid(-data->y[i] * z);
      for (std::size_t j = 0; j < n; ++j) g[j] += w * data->A(i, j);
    }
    return g;
  };
  return f;
}

}  // namespace proxcert
