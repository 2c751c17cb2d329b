// SPDX-License-Identifier: Apache-2.0
//
// The two-user Gaussian interference channel object:
//
//   y1 = H1 x1 + H2 x2 + z1,      y2 = H3 x1 + H4 x2 + z2,
//
// with zero-mean identity-covariance noise per receiver (a documented
// contract, not a stored field) and per-user average power budgets P1, P2.
// This module validates the structural assumptions (square, invertible direct
// matrices), assembles the genie side-information matrices used by the
// noisy-interference certificates, and evaluates the
// treat-interference-as-noise rate terms.

#ifndef ICCAP_CHANNEL_HPP
#define ICCAP_CHANNEL_HPP

#include <array>
#include <cmath>

#include "iccap/matrix_core.hpp"

namespace iccap {

struct ChannelPair {
  Mat h1, h2, h3, h4;
  double p1 = 1.0, p2 = 1.0;
  bool parallel = false;  // built from per-subchannel gains
  Index dim() const { return h1.rows(); }
};

struct CovariancePair {
  SymMatrix s1, s2;
};

// Input covariances S_i = (P_i / t) I, the isotropic full-power point.
inline CovariancePair isotropic_full_power(const ChannelPair& ch) {
  const Index t = ch.dim();
  return {SymMatrix(ch.p1 / t * Mat::Identity(t, t)),
          SymMatrix(ch.p2 / t * Mat::Identity(t, t))};
}

inline bool covariance_feasible(const ChannelPair& ch,
                                const CovariancePair& cov,
                                double tol = 1e-9) {
  if (cov.s1.dim() != ch.dim() || cov.s2.dim() != ch.dim()) return false;
  if (cov.s1.trace() > ch.p1 + tol || cov.s2.trace() > ch.p2 + tol)
    return false;
  return sym_eigenvalues(cov.s1.mat())(0) >= -tol &&
         sym_eigenvalues(cov.s2.mat())(0) >= -tol;
}

struct ValidationReport {
  bool square = false;
  bool invertible_h1_h4 = false;
  bool invertible_h2_h3 = false;
  // Condition numbers of H1..H4 (largest/smallest singular value).
  std::array<double, 4> condition_numbers{};
  bool z_channel = false;  // H3 == 0 within 1e-12
};

namespace detail {

// Ratio threshold below which a matrix counts as numerically singular.
inline constexpr double kSingularRatio = 1e-10;

struct SingularValueSummary {
  double smin = 0.0, smax = 0.0;
  bool invertible() const { return smin > kSingularRatio * smax; }
  double cond() const {
    return smin > 0.0 ? smax / smin
                      : std::numeric_limits<double>::infinity();
  }
};

inline SingularValueSummary singular_summary(const Mat& h) {
  const Eigen::JacobiSVD<Mat> svd(h);
  const Vec sv = svd.singularValues();
  return {sv(sv.size() - 1), sv(0)};
}

}  // namespace detail

inline ValidationReport validate(const ChannelPair& ch) {
  ValidationReport rep;
  const Index t = ch.h1.rows();
  rep.square = ch.h1.cols() == t && ch.h2.rows() == t && ch.h2.cols() == t &&
               ch.h3.rows() == t && ch.h3.cols() == t && ch.h4.rows() == t &&
               ch.h4.cols() == t && t >= 1;
  if (!rep.square) return rep;

  const std::array<const Mat*, 4> hs = {&ch.h1, &ch.h2, &ch.h3, &ch.h4};
  std::array<detail::SingularValueSummary, 4> sv;
  for (int i = 0; i < 4; ++i) {
    sv[i] = detail::singular_summary(*hs[i]);
    rep.condition_numbers[i] = sv[i].cond();
  }
  rep.invertible_h1_h4 = sv[0].invertible() && sv[3].invertible();
  rep.invertible_h2_h3 = sv[1].invertible() && sv[2].invertible();
  rep.z_channel = ch.h3.cwiseAbs().maxCoeff() <= 1e-12;
  return rep;
}

// Throws unless the channel is square with invertible direct matrices.
inline void require_valid(const ChannelPair& ch) {
  const ValidationReport rep = validate(ch);
  if (!rep.square)
    throw DimensionMismatch("channel matrices must share one square size");
  if (!rep.invertible_h1_h4)
    throw SingularChannel("H1 and H4 must be numerically invertible");
  if (!(ch.p1 > 0.0) || !(ch.p2 > 0.0))
    throw Error("power budgets must be positive");
}

// Genie side-information matrices at a covariance point. A_i is the
// correlation between receiver-i noise and its genie signal; the two
// existence equations are
//
//   X + W1^T X^{-1} W1 = M1,   W1 = A1^T A2^T,  M1 = I - A1^T A1 - A2 A2^T,
//   X + W2^T X^{-1} W2 = M2,   W2 = A2^T A1^T,  M2 = I - A1 A1^T - A2^T A2,
//
// whose positive definite solvability certifies the noisy-interference
// regime at this point. Swapping the users maps equation 1 to equation 2
// exactly; the receivers share one equation only when the A_i commute and
// are normal (in particular in the scalar case).
struct GenieMatrices {
  Mat a1, a2;
  Mat w1, w2;
  SymMatrix m1, m2;
  double m1_min_eig = 0.0, m2_min_eig = 0.0;
};

namespace detail {

// Assembly without channel validation, for search loops that evaluate many
// covariance points of one already-validated channel.
inline GenieMatrices assemble_genie(const ChannelPair& ch,
                                    const CovariancePair& cov) {
  const Index t = ch.dim();
  const Mat eye = Mat::Identity(t, t);
  const Mat b1 = eye + ch.h2 * cov.s2.mat() * ch.h2.transpose();
  const Mat b2 = eye + ch.h3 * cov.s1.mat() * ch.h3.transpose();

  GenieMatrices g;
  g.a1 = b1 * ch.h1.transpose().partialPivLu().solve(ch.h3.transpose());
  g.a2 = b2 * ch.h4.transpose().partialPivLu().solve(ch.h2.transpose());
  g.w1 = g.a1.transpose() * g.a2.transpose();
  g.w2 = g.a2.transpose() * g.a1.transpose();
  g.m1 = SymMatrix(eye - g.a1.transpose() * g.a1 - g.a2 * g.a2.transpose());
  g.m2 = SymMatrix(eye - g.a1 * g.a1.transpose() - g.a2.transpose() * g.a2);
  g.m1_min_eig = sym_eigenvalues(g.m1.mat())(0);
  g.m2_min_eig = sym_eigenvalues(g.m2.mat())(0);
  return g;
}

}  // namespace detail

inline GenieMatrices genie_matrices(const ChannelPair& ch,
                                    const CovariancePair& cov) {
  require_valid(ch);
  if (cov.s1.dim() != ch.dim() || cov.s2.dim() != ch.dim())
    throw DimensionMismatch("covariance dimension mismatch");
  return detail::assemble_genie(ch, cov);
}

struct RatePair {
  double r1 = 0.0, r2 = 0.0;
  double sum() const { return r1 + r2; }
};

// The two treat-interference-as-noise rate terms, in nats:
//   R1 = 1/2 log|I + H1 S1 H1^T (I + H2 S2 H2^T)^{-1}|  and symmetrically R2.
inline RatePair tan_rates(const ChannelPair& ch, const CovariancePair& cov) {
  const Index t = ch.dim();
  const Mat eye = Mat::Identity(t, t);
  const Mat b1 = eye + ch.h2 * cov.s2.mat() * ch.h2.transpose();
  const Mat b2 = eye + ch.h3 * cov.s1.mat() * ch.h3.transpose();
  const Mat t1 = b1 + ch.h1 * cov.s1.mat() * ch.h1.transpose();
  const Mat t2 = b2 + ch.h4 * cov.s2.mat() * ch.h4.transpose();
  RatePair r;
  r.r1 = 0.5 * (logdet_pd(SymMatrix(t1)) - logdet_pd(SymMatrix(b1)));
  r.r2 = 0.5 * (logdet_pd(SymMatrix(t2)) - logdet_pd(SymMatrix(b2)));
  return r;
}

// Diagonal (parallel) channel from per-subchannel gains.
inline ChannelPair build_parallel(const Vec& g1, const Vec& g2, const Vec& g3,
                                  const Vec& g4, double p1, double p2) {
  const Index t = g1.size();
  if (t < 1 || g2.size() != t || g3.size() != t || g4.size() != t)
    throw DimensionMismatch("parallel gains must share one length >= 1");
  ChannelPair ch;
  ch.h1 = g1.asDiagonal();
  ch.h2 = g2.asDiagonal();
  ch.h3 = g3.asDiagonal();
  ch.h4 = g4.asDiagonal();
  ch.p1 = p1;
  ch.p2 = p2;
  ch.parallel = true;
  return ch;
}

// Per-subchannel gains of a diagonal channel; throws if any matrix has
// off-diagonal content.
inline std::array<Vec, 4> channel_gains(const ChannelPair& ch) {
  const Index t = ch.dim();
  const std::array<const Mat*, 4> hs = {&ch.h1, &ch.h2, &ch.h3, &ch.h4};
  std::array<Vec, 4> out;
  for (int m = 0; m < 4; ++m) {
    const Mat& h = *hs[m];
    if ((h - Mat(h.diagonal().asDiagonal())).cwiseAbs().maxCoeff() > 1e-12)
      throw NotParallel("channel matrices are not diagonal");
    out[m] = h.diagonal();
  }
  return out;
}

}  // namespace iccap

#endif  // ICCAP_CHANNEL_HPP
