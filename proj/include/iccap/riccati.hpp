// SPDX-License-Identifier: Apache-2.0
//
// Existence test and solver for the symmetric matrix equation
//
//   X + W^T X^{-1} W = M,    M symmetric positive definite,
//
// a discrete algebraic Riccati special case. A positive definite solution
// exists if and only if the numerical radius of M^{-1/2} W M^{-1/2} is at
// most one half; the maximal solution is the limit of the monotone fixed
// point X_{k+1} = M - W^T X_k^{-1} W started at X_0 = M.

#ifndef ICCAP_RICCATI_HPP
#define ICCAP_RICCATI_HPP

#include "iccap/matrix_core.hpp"

namespace iccap {

struct RiccatiCheck {
  bool solvable = false;
  double radius = 0.0;
  // Radius within 1e-8 of the critical value 1/2: solvable for
  // classification purposes but the constructive solution may be singular.
  bool boundary = false;
};

// Existence test. solvable holds iff radius <= 0.5 + tol.
inline RiccatiCheck solvable(const SymMatrix& m, const Mat& w,
                                     double tol = 1e-8) {
  if (w.rows() != m.dim() || w.cols() != m.dim())
    throw DimensionMismatch("W must be square with the dimension of M");
  const Mat ms = inverse_sqrt_pd(m);  // throws NotPositiveDefinite
  RiccatiCheck out;
  out.radius = numerical_radius(ms * w * ms);
  out.solvable = out.radius <= 0.5 + tol;
  out.boundary = std::abs(out.radius - 0.5) <= 1e-8;
  return out;
}

namespace detail {

inline double riccati_residual(const Mat& x, const Mat& w, const Mat& m) {
  const Eigen::LLT<Mat> llt(x);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::max();
  return (x + w.transpose() * llt.solve(w) - m).norm();
}

}  // namespace detail

// Maximal positive definite solution by fixed-point iteration. Accepts a
// relative residual of 1e-10, loosened to 1e-6 within 1e-4 of the critical
// radius where convergence degrades to O(1/k). Throws NotSolvable past the
// radius condition and NoConvergence when the iteration stalls or the
// boundary solution degenerates to a singular matrix.
inline SymMatrix solve_max(const SymMatrix& m, const Mat& w) {
  const RiccatiCheck chk = solvable(m, w);
  if (!chk.solvable)
    throw NotSolvable("numerical radius exceeds 1/2; no PD solution");

  const Mat mm = m.mat();
  const double mnorm = std::max(mm.norm(), 1e-300);
  constexpr int kMaxIters = 10000;

  Mat x = mm;
  for (int k = 0; k < kMaxIters; ++k) {
    const Eigen::LLT<Mat> llt(x);
    if (llt.info() != Eigen::Success || !x.allFinite())
      throw NoConvergence("iterate left the positive definite cone");
    const Mat next = symmetric_part(mm - w.transpose() * llt.solve(w));
    if (!next.allFinite())
      throw NoConvergence("iterate left the positive definite cone");
    x = next;
    if (detail::riccati_residual(x, w, mm) <= 1e-10 * mnorm)
      return SymMatrix(x);
  }

  const double final_residual = detail::riccati_residual(x, w, mm);
  if (final_residual <= 1e-6 * mnorm && chk.radius >= 0.5 - 1e-4)
    return SymMatrix(x);  // boundary-rate convergence, accepted loosely
  throw NoConvergence("fixed point stalled at relative residual " +
                      std::to_string(final_residual / mnorm));
}

}  // namespace iccap

#endif  // ICCAP_RICCATI_HPP
