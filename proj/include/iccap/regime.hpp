// SPDX-License-Identifier: Apache-2.0
//
// Regime classification for the two-user interference channel: pointwise and
// global noisy-interference radius checks, the genie covariance fixed point,
// the PSD-ordering tests for the strong / mixed / one-sided regimes, and the
// scalar closed form.

#ifndef ICCAP_REGIME_HPP
#define ICCAP_REGIME_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "iccap/channel.hpp"
#include "iccap/riccati.hpp"

namespace iccap {

// Shared knobs for every stochastic search in the library. Seeded and
// serial, so identical configs give identical results.
struct SearchConfig {
  int restarts = 20;
  double step_scale = 0.1;  // initial step = step_scale * P_i / t
  int max_iters = 2000;
  std::uint64_t seed = 0;
  double agree_tol = 1e-6;  // relative multistart agreement (concave solves)
  double kkt_tol = 1e-6;    // stationarity residual bound (allocations)
};

enum class Regime {
  noisy,
  strong,
  mixed_rx1_strong,
  mixed_rx2_strong,
  z_weak,
  z_strong,
  unclassified,
};

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::noisy: return "noisy";
    case Regime::strong: return "strong";
    case Regime::mixed_rx1_strong: return "mixed_rx1_strong";
    case Regime::mixed_rx2_strong: return "mixed_rx2_strong";
    case Regime::z_weak: return "z_weak";
    case Regime::z_strong: return "z_strong";
    case Regime::unclassified: return "unclassified";
  }
  return "unclassified";
}

struct RadiusPair {
  double r1 = 0.0, r2 = 0.0;
  double worst() const { return std::max(r1, r2); }
};

// Radii of the two existence conditions at one covariance point. A receiver
// whose M matrix is not positive definite gets an infinite radius: the
// existence equation has no PD solution there.
inline RadiusPair noisy_at(const ChannelPair& ch, const CovariancePair& cov) {
  const GenieMatrices g = genie_matrices(ch, cov);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  RadiusPair out{kInf, kInf};
  try {
    out.r1 = solvable(g.m1, g.w1).radius;
  } catch (const NotPositiveDefinite&) {
  }
  try {
    out.r2 = solvable(g.m2, g.w2).radius;
  } catch (const NotPositiveDefinite&) {
  }
  return out;
}

namespace detail {

// Finite ascent surrogate for the worst-case radius: where an M matrix loses
// positive definiteness the radius is infinite, so the surrogate switches to
// a constant-plus-deficit ramp that still points the search toward the
// violation.
inline double radius_surrogate(const ChannelPair& ch,
                               const CovariancePair& cov) {
  const GenieMatrices g = assemble_genie(ch, cov);
  const auto one = [](const SymMatrix& m, double min_eig, const Mat& w) {
    if (min_eig <= 4.0 * kTolPd) return 0.6 - min_eig;
    const Mat ms = inverse_sqrt_pd(m);
    return numerical_radius(ms * w * ms);
  };
  return std::max(one(g.m1, g.m1_min_eig, g.w1),
                  one(g.m2, g.m2_min_eig, g.w2));
}

// Pack/unpack a covariance pair as one flat parameter vector of the two
// upper triangles.
inline Vec pack_pair(const CovariancePair& cov) {
  const Index t = cov.s1.dim();
  const Index n = t * (t + 1) / 2;
  Vec v(2 * n);
  Index k = 0;
  for (const SymMatrix* s : {&cov.s1, &cov.s2})
    for (Index i = 0; i < t; ++i)
      for (Index j = i; j < t; ++j) v(k++) = (*s)(i, j);
  return v;
}

inline CovariancePair unpack_pair(const Vec& v, Index t) {
  Mat s1(t, t), s2(t, t);
  Index k = 0;
  for (Mat* s : {&s1, &s2})
    for (Index i = 0; i < t; ++i)
      for (Index j = i; j < t; ++j) {
        (*s)(i, j) = v(k);
        (*s)(j, i) = v(k);
        ++k;
      }
  return {SymMatrix(s1), SymMatrix(s2)};
}

inline CovariancePair project_pair(const CovariancePair& cov, double p1,
                                   double p2) {
  return {project_trace_psd(cov.s1, p1), project_trace_psd(cov.s2, p2)};
}

}  // namespace detail

struct NoisyGlobalResult {
  bool holds = false;
  CovariancePair worst;
  double radius = 0.0;  // +inf when some M loses definiteness
  int restarts_used = 0;
};

// Best-effort maximization of the worst-case radius over the feasible
// covariance set: projected ascent with central-difference gradients from
// deterministic starts (zero, isotropic full power, rank-one along the
// dominant cross-channel input directions) plus cfg.restarts random starts.
// holds certifies the noisy condition up to search coverage.
inline NoisyGlobalResult noisy_global(const ChannelPair& ch,
                                      const SearchConfig& cfg = {}) {
  require_valid(ch);
  const Index t = ch.dim();
  const Index n = 2 * (t * (t + 1) / 2);
  std::mt19937_64 rng(cfg.seed);

  const auto objective = [&](const Vec& v) {
    return detail::radius_surrogate(
        ch, detail::project_pair(detail::unpack_pair(v, t), ch.p1, ch.p2));
  };

  std::vector<CovariancePair> starts;
  starts.push_back({SymMatrix::zero(t), SymMatrix::zero(t)});
  starts.push_back(isotropic_full_power(ch));
  {
    const Eigen::JacobiSVD<Mat> svd3(ch.h3, Eigen::ComputeFullV);
    const Eigen::JacobiSVD<Mat> svd2(ch.h2, Eigen::ComputeFullV);
    const Vec v1 = svd3.matrixV().col(0), v2 = svd2.matrixV().col(0);
    starts.push_back({SymMatrix(ch.p1 * v1 * v1.transpose()),
                      SymMatrix(ch.p2 * v2 * v2.transpose())});
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto random_psd = [&](double p) {
    Mat b(t, t);
    std::normal_distribution<double> gauss;
    for (Index i = 0; i < t; ++i)
      for (Index j = 0; j < t; ++j) b(i, j) = gauss(rng);
    return project_trace_psd(SymMatrix(b * b.transpose()),
                             std::max(1e-6, unif(rng) * p));
  };
  for (int r = 0; r < cfg.restarts; ++r)
    starts.push_back({random_psd(ch.p1), random_psd(ch.p2)});

  NoisyGlobalResult out;
  out.worst = starts.front();
  const double h = 1e-6;
  const double alpha0 =
      cfg.step_scale * std::max(ch.p1, ch.p2) / static_cast<double>(t);

  for (const CovariancePair& start : starts) {
    ++out.restarts_used;
    Vec v = detail::pack_pair(detail::project_pair(start, ch.p1, ch.p2));
    double f = objective(v);
    if (f > out.radius) {
      out.radius = f;
      out.worst = detail::unpack_pair(v, t);
    }
    int stall = 0;
    double alpha = alpha0;  // persists: grows on acceptance, halves on reject
    for (int it = 0; it < cfg.max_iters && out.radius <= 0.5 + 1e-3; ++it) {
      Vec grad(n);
      for (Index c = 0; c < n; ++c) {
        Vec vp = v, vm = v;
        vp(c) += h;
        vm(c) -= h;
        grad(c) = (objective(vp) - objective(vm)) / (2.0 * h);
      }
      if (grad.norm() < 1e-11) break;

      Vec vn;
      double fn = f;
      bool accepted = false;
      for (int back = 0; back < 40; ++back) {
        vn = detail::pack_pair(detail::project_pair(
            detail::unpack_pair(v + alpha * grad, t), ch.p1, ch.p2));
        fn = objective(vn);
        if (fn >= f + 1e-4 * alpha * grad.squaredNorm()) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;
      stall = fn - f <= 1e-11 * std::max(1.0, std::abs(f)) ? stall + 1 : 0;
      alpha = std::min(2.0 * alpha, 1e3 * alpha0);
      v = vn;
      f = fn;
      if (f > out.radius) {
        out.radius = f;
        out.worst = detail::unpack_pair(v, t);
      }
      if (stall >= 3) break;
    }
    if (out.radius > 0.5 + 1e-3) break;  // violation witness found
  }

  // Report the true radius at the worst point (infinite when M degenerates).
  const RadiusPair at_worst = noisy_at(ch, out.worst);
  if (at_worst.worst() > out.radius) out.radius = at_worst.worst();
  out.holds = out.radius <= 0.5 + 1e-8;
  return out;
}

struct SigmaPair {
  SymMatrix sigma1, sigma2;
  double residual1 = 0.0, residual2 = 0.0;
};

// Gauss-Seidel iteration for the genie covariance pair
//   Sigma1 = I - A2 Sigma2^{-1} A2^T,   Sigma2 = I - A1 Sigma1^{-1} A1^T,
// from the identity pair. Returns the pair once both residuals fall below
// 1e-9 with both iterates positive definite; empty if definiteness is lost
// or 5,000 sweeps do not converge.
inline std::optional<SigmaPair> sigma_fixed_point(const ChannelPair& ch,
                                                  const CovariancePair& cov) {
  const GenieMatrices g = genie_matrices(ch, cov);
  const Index t = ch.dim();
  const Mat eye = Mat::Identity(t, t);

  Mat s1 = eye, s2 = eye;
  for (int sweep = 0; sweep < 5000; ++sweep) {
    {
      const Eigen::LLT<Mat> llt2(s2);
      if (llt2.info() != Eigen::Success) return std::nullopt;
      s1 = symmetric_part(eye - g.a2 * llt2.solve(g.a2.transpose()));
    }
    const Eigen::LLT<Mat> llt1(s1);
    if (llt1.info() != Eigen::Success || !s1.allFinite()) return std::nullopt;
    s2 = symmetric_part(eye - g.a1 * llt1.solve(g.a1.transpose()));
    if (!s2.allFinite()) return std::nullopt;

    const Eigen::LLT<Mat> llt2n(s2);
    if (llt2n.info() != Eigen::Success) return std::nullopt;
    const double res1 =
        (s1 + g.a2 * llt2n.solve(g.a2.transpose()) - eye).norm();
    const double res2 =
        (s2 + g.a1 * llt1.solve(g.a1.transpose()) - eye).norm();
    if (res1 <= 1e-9 && res2 <= 1e-9) {
      if (sym_eigenvalues(s1)(0) <= 0.0 || sym_eigenvalues(s2)(0) <= 0.0)
        return std::nullopt;
      return SigmaPair{SymMatrix(s1), SymMatrix(s2), res1, res2};
    }
  }
  return std::nullopt;
}

// Closed-form noisy-interference test for the scalar channel with unit
// direct gains and cross gains sqrt(a), sqrt(b).
inline double scalar_noisy_lhs(double a, double b, double p1, double p2) {
  return std::sqrt(a) * (1.0 + b * p1) + std::sqrt(b) * (1.0 + a * p2);
}

inline bool scalar_noisy(double a, double b, double p1, double p2) {
  return scalar_noisy_lhs(a, b, p1, p2) <= 1.0;
}

struct RegimeReport {
  Regime label = Regime::unclassified;
  std::map<std::string, double> certificates;
  struct SearchDiagnostics {
    int restarts_used = 0;
    double max_radius = 0.0;
    CovariancePair worst;
  } search;
};

// Decision order: interference-free, Z-channel orderings, strong, mixed,
// then the searched noisy certificate, else unclassified. Structural
// (deterministic) certificates take precedence over the stochastic search.
inline RegimeReport classify(const ChannelPair& ch,
                             const SearchConfig& cfg = {}) {
  require_valid(ch);
  RegimeReport rep;

  const double h2_abs = ch.h2.cwiseAbs().maxCoeff();
  const double h3_abs = ch.h3.cwiseAbs().maxCoeff();
  rep.certificates["h2_max_abs"] = h2_abs;
  rep.certificates["h3_max_abs"] = h3_abs;
  if (h2_abs <= 1e-12 && h3_abs <= 1e-12) {
    // No interference at all: both radii are exactly zero everywhere.
    rep.label = Regime::noisy;
    rep.certificates["worst_radius"] = 0.0;
    rep.search.max_radius = 0.0;
    rep.search.worst = isotropic_full_power(ch);
    return rep;
  }

  const PsdOrdering cross1 = psd_order(
      SymMatrix(ch.h2.transpose() * ch.h2),
      SymMatrix(ch.h4.transpose() * ch.h4));  // user 2: rx1 vs own rx2
  const PsdOrdering cross2 = psd_order(
      SymMatrix(ch.h3.transpose() * ch.h3),
      SymMatrix(ch.h1.transpose() * ch.h1));  // user 1: rx2 vs own rx1
  rep.certificates["h2_vs_h4_min_eig"] = cross1.min_eig_diff;
  rep.certificates["h2_vs_h4_max_eig"] = cross1.max_eig_diff;
  rep.certificates["h3_vs_h1_min_eig"] = cross2.min_eig_diff;
  rep.certificates["h3_vs_h1_max_eig"] = cross2.max_eig_diff;

  if (h3_abs <= 1e-12) {
    if (cross1.label == PsdLabel::prec) {
      rep.label = Regime::z_weak;
      return rep;
    }
    if (cross1.label == PsdLabel::succeq) {
      rep.label = Regime::z_strong;
      return rep;
    }
    // Incomparable one-sided channel: fall through to the searched check.
  } else if (cross1.label == PsdLabel::succeq &&
             cross2.label == PsdLabel::succeq) {
    rep.label = Regime::strong;
    return rep;
  } else if (cross1.label == PsdLabel::prec &&
             cross2.label == PsdLabel::succeq) {
    rep.label = Regime::mixed_rx2_strong;
    return rep;
  } else if (cross1.label == PsdLabel::succeq &&
             cross2.label == PsdLabel::prec) {
    rep.label = Regime::mixed_rx1_strong;
    return rep;
  }

  const NoisyGlobalResult global = noisy_global(ch, cfg);
  rep.search.restarts_used = global.restarts_used;
  rep.search.max_radius = global.radius;
  rep.search.worst = global.worst;
  rep.certificates["worst_radius"] = global.radius;
  rep.certificates["worst_trace_s1"] = global.worst.s1.trace();
  rep.certificates["worst_trace_s2"] = global.worst.s2.trace();
  rep.label = global.holds ? Regime::noisy : Regime::unclassified;
  return rep;
}

}  // namespace iccap

#endif  // ICCAP_REGIME_HPP
