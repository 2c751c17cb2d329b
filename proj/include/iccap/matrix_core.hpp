// SPDX-License-Identifier: Apache-2.0
//
// Dense symmetric/real matrix utilities the rest of the library builds on:
// log-determinant, PSD tests and orderings, projection onto the trace-bounded
// PSD cone, numerical radius, and the Schur-complement PSD test.
//
// Conventions: all matrices are dense real doubles (Eigen::MatrixXd). Every
// symmetric eigendecomposition symmetrizes its input first, (X + X^T)/2, to
// suppress rounding drift. PD/PSD tests use a tolerance of 1e-9 relative to
// the largest eigenvalue magnitude, floored at 1 so that near-zero matrices
// are judged on an absolute scale.

#ifndef ICCAP_MATRIX_CORE_HPP
#define ICCAP_MATRIX_CORE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "iccap/errors.hpp"

namespace iccap {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

// Relative tolerance for positive-(semi)definiteness decisions.
inline constexpr double kTolPd = 1e-9;

inline Mat symmetric_part(const Mat& x) { return 0.5 * (x + x.transpose()); }
inline Mat skew_part(const Mat& x) { return 0.5 * (x - x.transpose()); }

// Square matrix stored exactly symmetric: entry (i,j) and (j,i) are the same
// floating-point value by construction.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(const Mat& raw) {
    if (raw.rows() != raw.cols())
      throw DimensionMismatch("SymMatrix requires a square matrix");
    if (raw.rows() < 1) throw DimensionMismatch("SymMatrix requires dim >= 1");
    m_ = symmetric_part(raw);
  }

  static SymMatrix identity(Index t) { return SymMatrix(Mat::Identity(t, t)); }
  static SymMatrix zero(Index t) { return SymMatrix(Mat::Zero(t, t)); }

  Index dim() const { return m_.rows(); }
  const Mat& mat() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }

 private:
  Mat m_;
};

struct SymEig {
  Vec values;   // ascending
  Mat vectors;  // columns
};

inline SymEig sym_eigendecompose(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetric_part(a));
  return {es.eigenvalues(), es.eigenvectors()};
}

inline Vec sym_eigenvalues(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetric_part(a),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Absolute PD tolerance for a matrix whose spectrum is `eigvals`.
inline double pd_tolerance(const Vec& eigvals) {
  return kTolPd * std::max(1.0, eigvals.cwiseAbs().maxCoeff());
}

// log of the determinant of a symmetric positive definite matrix, natural log.
inline double logdet_pd(const SymMatrix& a) {
  const Vec lam = sym_eigenvalues(a.mat());
  if (lam(0) <= pd_tolerance(lam))
    throw NotPositiveDefinite("logdet_pd: matrix is not positive definite");
  double s = 0.0;
  for (Index i = 0; i < lam.size(); ++i) s += std::log(lam(i));
  return s;
}

enum class PsdLabel { succeq, prec, incomparable };

inline const char* to_string(PsdLabel l) {
  switch (l) {
    case PsdLabel::succeq: return "succeq";
    case PsdLabel::prec: return "prec";
    default: return "incomparable";
  }
}

struct PsdOrdering {
  PsdLabel label = PsdLabel::incomparable;
  double min_eig_diff = 0.0;  // smallest eigenvalue of A - B
  double max_eig_diff = 0.0;  // largest eigenvalue of A - B
};

// Loewner-order comparison of A and B: succeq means A - B >= -tol as a
// quadratic form, prec means A - B is strictly negative definite below -tol.
inline PsdOrdering psd_order(const SymMatrix& a, const SymMatrix& b,
                             double tol) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("psd_order: dimension mismatch");
  const Vec lam = sym_eigenvalues(a.mat() - b.mat());
  PsdOrdering out;
  out.min_eig_diff = lam(0);
  out.max_eig_diff = lam(lam.size() - 1);
  if (out.min_eig_diff >= -tol)
    out.label = PsdLabel::succeq;
  else if (out.max_eig_diff < -tol)
    out.label = PsdLabel::prec;
  else
    out.label = PsdLabel::incomparable;
  return out;
}

// Default tolerance variant: relative to the spectrum of the difference.
inline PsdOrdering psd_order(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("psd_order: dimension mismatch");
  const Vec lam = sym_eigenvalues(a.mat() - b.mat());
  return psd_order(a, b, pd_tolerance(lam));
}

namespace detail {

// Largest eigenvalue of cos(t)*S + i*sin(t)*K with S symmetric, K
// skew-symmetric; this is the Hermitian part of e^{it} (S + K).
inline double herm_lambda_max(const Mat& s, const Mat& k, double theta) {
  const Index t = s.rows();
  const double c = std::cos(theta), sn = std::sin(theta);
  if (t == 1) return c * s(0, 0);
  if (t == 2) {
    // Closed-form eigenvalues of a 2x2 complex Hermitian matrix.
    const double h11 = c * s(0, 0), h22 = c * s(1, 1);
    const double off = std::hypot(c * s(0, 1), sn * k(0, 1));
    return 0.5 * (h11 + h22) + std::hypot(0.5 * (h11 - h22), off);
  }
  if (t == 3) {
    // Trigonometric closed form for the largest eigenvalue of a 3x3
    // Hermitian matrix (real characteristic cubic).
    using C = std::complex<double>;
    const C b01(c * s(0, 1), sn * k(0, 1));
    const C b02(c * s(0, 2), sn * k(0, 2));
    const C b12(c * s(1, 2), sn * k(1, 2));
    const double q = c * (s(0, 0) + s(1, 1) + s(2, 2)) / 3.0;
    const double d0 = c * s(0, 0) - q, d1 = c * s(1, 1) - q,
                 d2 = c * s(2, 2) - q;
    const double p2 = (d0 * d0 + d1 * d1 + d2 * d2 +
                       2.0 * (std::norm(b01) + std::norm(b02) +
                              std::norm(b12))) /
                      6.0;
    if (p2 <= 0.0) return q;
    const double p = std::sqrt(p2);
    const double det =
        (d0 * (C(d1) * d2 - b12 * std::conj(b12)) -
         b01 * (std::conj(b01) * d2 - b12 * std::conj(b02)) +
         b02 * (std::conj(b01) * std::conj(b12) - C(d1) * std::conj(b02)))
            .real();
    const double r = std::clamp(det / (2.0 * p * p2), -1.0, 1.0);
    return q + 2.0 * p * std::cos(std::acos(r) / 3.0);
  }
  Eigen::MatrixXcd h(t, t);
  h.real() = c * s;
  h.imag() = sn * k;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h,
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// Golden-section maximization of f over [lo, hi] down to interval theta_tol.
template <typename F>
double golden_max(F&& f, double lo, double hi, double theta_tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  double best = std::max(f1, f2);
  while (b - a > theta_tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
    best = std::max({best, f1, f2});
  }
  return best;
}

}  // namespace detail

// Numerical radius r(B) = max over unit complex alpha of |alpha^H B alpha|.
// Computed by the exact reformulation r(B) = max_theta lambda_max of the
// Hermitian part of e^{i theta} B, swept on a uniform grid of 64 angles over
// [0, pi) (both spectrum ends give the other half period) and refined by
// golden section around the surviving local maxima.
inline double numerical_radius(const Mat& b, double tol = 1e-10) {
  if (b.rows() != b.cols())
    throw DimensionMismatch("numerical_radius: matrix must be square");
  if (!b.allFinite())
    throw DimensionMismatch("numerical_radius: entries must be finite");
  const Index t = b.rows();
  if (t == 1) return std::abs(b(0, 0));

  const Mat s = symmetric_part(b);
  const Mat k = skew_part(b);
  if (k.cwiseAbs().maxCoeff() == 0.0) {
    // Symmetric matrix: the field of values is the real eigenvalue interval.
    const Vec lam = sym_eigenvalues(s);
    return std::max(std::abs(lam(0)), std::abs(lam(lam.size() - 1)));
  }

  constexpr int kHalfGrid = 64;
  constexpr int kGrid = 2 * kHalfGrid;  // full period [0, 2*pi)
  const double step = 2.0 * M_PI / kGrid;
  std::vector<double> val(kGrid);
  for (int j = 0; j < kGrid; ++j)
    val[j] = detail::herm_lambda_max(s, k, j * step);

  // Collect circular local maxima, refine the best few.
  std::vector<int> locs;
  for (int j = 0; j < kGrid; ++j) {
    const double prev = val[(j + kGrid - 1) % kGrid];
    const double next = val[(j + 1) % kGrid];
    if (val[j] >= prev && val[j] >= next) locs.push_back(j);
  }
  std::sort(locs.begin(), locs.end(),
            [&](int i, int j) { return val[i] > val[j]; });
  if (locs.size() > 4) locs.resize(4);

  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff() * t);
  const double theta_tol =
      std::clamp(std::sqrt(2.0 * tol / scale), 1e-9, 1e-3);
  auto g = [&](double theta) { return detail::herm_lambda_max(s, k, theta); };
  double best = *std::max_element(val.begin(), val.end());
  for (int j : locs) {
    const double center = j * step;
    best = std::max(best,
                    detail::golden_max(g, center - step, center + step,
                                       theta_tol));
  }
  return best;
}

// Euclidean projection onto {X PSD, tr X <= P}: clip negative eigenvalues,
// then shift the eigenvalue vector by the exact simplex-projection amount if
// the trace still exceeds the budget.
inline SymMatrix project_trace_psd(const SymMatrix& s, double p) {
  if (!(p > 0.0)) throw Error("project_trace_psd: budget must be positive");
  const SymEig eig = sym_eigendecompose(s.mat());
  const Index n = eig.values.size();

  if (eig.values(0) >= 0.0 && eig.values.sum() <= p) return s;

  Vec lam = eig.values.cwiseMax(0.0);
  if (lam.sum() > p) {
    // Solve sum_i max(d_i - shift, 0) = p on the sorted eigenvalues.
    std::vector<double> d(eig.values.data(), eig.values.data() + n);
    std::sort(d.begin(), d.end(), std::greater<double>());
    double prefix = 0.0, shift = -1.0;
    for (Index k = 0; k < n; ++k) {
      prefix += d[k];
      const double cand = (prefix - p) / static_cast<double>(k + 1);
      const bool below_next = (k + 1 == n) || (d[k + 1] - cand <= 0.0);
      if (cand >= 0.0 && d[k] - cand > 0.0 && below_next) {
        shift = cand;
        break;
      }
    }
    if (shift < 0.0) {
      // Tied eigenvalues can defeat the strict active-set scan; fall back to
      // bisection on the monotone trace-vs-shift function.
      double lo = 0.0, hi = d[0];
      for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double tr =
            (eig.values.array() - mid).cwiseMax(0.0).sum();
        (tr > p ? lo : hi) = mid;
      }
      shift = 0.5 * (lo + hi);
    }
    lam = (eig.values.array() - shift).cwiseMax(0.0).matrix();
  }

  Mat out = eig.vectors * lam.asDiagonal() * eig.vectors.transpose();
  out = symmetric_part(out);
  const double tr = out.trace();
  if (tr > p) out *= (p / tr) * (1.0 - 1e-15);
  return SymMatrix(out);
}

// True iff the block matrix [[I, A], [A^T, B]] is PSD, equivalently
// B - A^T A >= -tol as a quadratic form.
inline bool schur_psd_exists(const Mat& a, const SymMatrix& b) {
  if (a.cols() != b.dim())
    throw DimensionMismatch("schur_psd_exists: A must have dim(B) columns");
  const Vec lam = sym_eigenvalues(b.mat() - a.transpose() * a);
  return lam(0) >= -pd_tolerance(lam);
}

// U diag(lambda^{-1/2}) U^T for a symmetric positive definite input.
inline Mat inverse_sqrt_pd(const SymMatrix& m) {
  const SymEig eig = sym_eigendecompose(m.mat());
  if (eig.values(0) <= pd_tolerance(eig.values))
    throw NotPositiveDefinite("inverse_sqrt_pd: matrix not positive definite");
  const Vec inv_sqrt = eig.values.array().rsqrt().matrix();
  return symmetric_part(eig.vectors * inv_sqrt.asDiagonal() *
                        eig.vectors.transpose());
}

}  // namespace iccap

#endif  // ICCAP_MATRIX_CORE_HPP
