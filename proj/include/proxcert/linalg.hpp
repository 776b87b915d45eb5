#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "proxcert/errors.hpp"

namespace proxcert {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_sq(const Vec& a) { return dot(a, a); }

inline double norm(const Vec& a) { return std::sqrt(norm_sq(a)); }

inline Vec add(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline Vec sub(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline Vec scaled(const Vec& a, double s) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
  return out;
}

inline bool all_finite(const Vec& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

/// Dense row-major matrix, sized for desk-scale problems.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

inline Vec matvec(const Matrix& A, const Vec& x) {
  Vec out(A.rows, 0.0);
  for (std::size_t i = 0; i < A.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < A.cols; ++j) s += A(i, j) * x[j];
    out[i] = s;
  }
  return out;
}

inline Vec matvec_transposed(const Matrix& A, const Vec& y) {
  Vec out(A.cols, 0.0);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) out[j] += A(i, j) * y[i];
  return out;
}

inline Matrix gram(const Matrix& A) {
  Matrix G(A.cols, A.cols);
  for (std::size_t j = 0; j < A.cols; ++j)
    for (std::size_t k = j; k < A.cols; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < A.rows; ++i) s += A(i, j) * A(i, k);
      G(j, k) = s;
      G(k, j) = s;
    }
  return G;
}

namespace detail {

inline double off_diagonal_norm(const Matrix& S) {
  double s = 0.0;
  for (std::size_t i = 0; i < S.rows; ++i)
    for (std::size_t j = 0; j < S.cols; ++j)
      if (i != j) s += S(i, j) * S(i, j);
  return std::sqrt(s);
}

}  // namespace detail

/// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, ascending.
/// Converges when the off-diagonal norm drops below off_tol relative to the
/// matrix scale; plenty for the n <= 64 Gram matrices built here.
inline std::vector<double> jacobi_eigenvalues(Matrix S, double off_tol = 1e-12,
                                              int max_sweeps = 64) {
  if (S.rows != S.cols) throw InvalidSpecError("jacobi_eigenvalues: matrix must be square");
  const std::size_t n = S.rows;
  double frob = 0.0;
  for (double v : S.data) frob += v * v;
  frob = std::sqrt(frob);
  const double stop = off_tol * std::max(1.0, frob);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (detail::off_diagonal_norm(S) <= stop) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = S(p, q);
        if (apq == 0.0) continue;
        const double theta = (S(q, q) - S(p, p)) / (2.0 * apq);
        double t = 1.0;
        if (theta != 0.0) {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = S(k, p);
          const double akq = S(k, q);
          S(k, p) = S(p, k) = c * akp - s * akq;
          S(k, q) = S(q, k) = s * akp + c * akq;
        }
        const double app = S(p, p);
        const double aqq = S(q, q);
        S(p, p) = c * c * app - 2.0 * s * c * apq + s * s * aqq;
        S(q, q) = s * s * app + 2.0 * s * c * apq + c * c * aqq;
        S(p, q) = S(q, p) = 0.0;
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = S(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

}  // namespace proxcert
