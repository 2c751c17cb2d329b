// SPDX-License-Identifier: Apache-2.0
#ifndef ICCAP_OPTIMIZER_HPP
#define ICCAP_OPTIMIZER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "iccap/channel.hpp"
#include "iccap/errors.hpp"
#include "iccap/matrix_core.hpp"
#include "iccap/regime.hpp"

namespace iccap {

// Outcome of a sum-rate search. `regime` echoes the routing decision that
// produced the value; `capacity_certified` is true only when that regime makes
// the value exact rather than an achievable lower bound.
struct RateResult {
  double sum_rate_nats = 0.0;
  CovariancePair achieving;
  Regime regime = Regime::unclassified;
  bool capacity_certified = false;
  std::vector<double> objective_trace;  // accepted objective values, winning restart
  double multistart_spread = 0.0;       // max - min over restart final values
  int restarts_used = 0;
};

// One traced boundary point together with the weight vector that selected it.
struct RegionPoint {
  double r1_nats = 0.0;
  double r2_nats = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
};

// Pareto frontier of the rate region: r1 strictly increasing and r2 strictly
// decreasing across points after deduplication.
struct RegionBoundary {
  std::vector<RegionPoint> points;
};

// Power split across the subchannels of a parallel (diagonal) channel.
struct PgicResult {
  Vec p1_alloc;
  Vec p2_alloc;
  double sum_rate_nats = 0.0;
  std::vector<bool> per_sub_conditions;  // separability condition per subchannel
  double kkt_residual = 0.0;             // worst common-multiplier stationarity violation
};

// Log-det building blocks of every rate objective. mac terms are the joint
// decoding bounds at each receiver, single terms the interference-free rates,
// tan terms the treat-as-noise rates.
enum class Term { mac1, mac2, single1, single2, tan1, tan2 };

// Objective value with gradients in the trace inner product <G, D> = tr(G D)
// over symmetric perturbations of S1 and S2.
struct ObjectiveEval {
  double value = 0.0;
  Mat g1;
  Mat g2;
};

// Exact single-user capacity max 0.5*log|I + h S h^T| over tr S <= p, with
// the water-filling covariance that attains it.
struct SingleUserSolution {
  double capacity_nats = 0.0;
  SymMatrix cov;
};

inline SingleUserSolution waterfill_single(const Mat& h, double p) {
  if (h.rows() != h.cols())
    throw DimensionMismatch("waterfill_single: channel matrix must be square");
  if (!(p > 0.0)) throw Error("waterfill_single: power budget must be positive");
  const Index t = h.rows();
  SingleUserSolution out;
  out.cov = SymMatrix::zero(t);
  Eigen::JacobiSVD<Mat> svd(h, Eigen::ComputeFullV);
  const Vec sig = svd.singularValues();
  const double smax = sig(0);
  if (!(smax > 0.0)) return out;
  std::vector<double> inv;  // 1/sigma^2 for usable modes, ascending
  for (Index i = 0; i < t; ++i)
    if (sig(i) > 1e-12 * smax) inv.push_back(1.0 / (sig(i) * sig(i)));
  const Index m = static_cast<Index>(inv.size());
  double level = 0.0;
  Index active = 0;
  double prefix = 0.0;
  for (Index i = 0; i < m; ++i) prefix += inv[static_cast<std::size_t>(i)];
  for (Index k = m; k >= 1; --k) {
    const double nu = (p + prefix) / static_cast<double>(k);
    if (nu >= inv[static_cast<std::size_t>(k - 1)]) {
      level = nu;
      active = k;
      break;
    }
    prefix -= inv[static_cast<std::size_t>(k - 1)];
  }
  Vec q = Vec::Zero(t);
  for (Index i = 0; i < active; ++i) {
    q(i) = level - inv[static_cast<std::size_t>(i)];
    out.capacity_nats += 0.5 * std::log(level / inv[static_cast<std::size_t>(i)]);
  }
  const Mat v = svd.matrixV();
  out.cov = SymMatrix(v * q.asDiagonal() * v.transpose());
  return out;
}

inline double single_user_capacity(const Mat& h, double p) {
  return waterfill_single(h, p).capacity_nats;
}

namespace detail {

inline double half_logdet_llt(const Eigen::LLT<Mat>& llt) {
  return Mat(llt.matrixL()).diagonal().array().log().sum();
}

inline Eigen::LLT<Mat> llt_of(const Mat& m) {
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("rate objective: received covariance lost positive definiteness");
  return llt;
}

// Value and analytic gradients of one rate term at (S1, S2).
inline ObjectiveEval eval_term(Term term, const ChannelPair& ch,
                               const CovariancePair& cov) {
  const Index t = ch.dim();
  const Mat id = Mat::Identity(t, t);
  ObjectiveEval out;
  out.g1 = Mat::Zero(t, t);
  out.g2 = Mat::Zero(t, t);
  switch (term) {
    case Term::mac1: {
      const auto llt = llt_of(id + ch.h1 * cov.s1.mat() * ch.h1.transpose() +
                              ch.h2 * cov.s2.mat() * ch.h2.transpose());
      out.value = half_logdet_llt(llt);
      out.g1 = 0.5 * ch.h1.transpose() * llt.solve(ch.h1);
      out.g2 = 0.5 * ch.h2.transpose() * llt.solve(ch.h2);
      break;
    }
    case Term::mac2: {
      const auto llt = llt_of(id + ch.h3 * cov.s1.mat() * ch.h3.transpose() +
                              ch.h4 * cov.s2.mat() * ch.h4.transpose());
      out.value = half_logdet_llt(llt);
      out.g1 = 0.5 * ch.h3.transpose() * llt.solve(ch.h3);
      out.g2 = 0.5 * ch.h4.transpose() * llt.solve(ch.h4);
      break;
    }
    case Term::single1: {
      const auto llt = llt_of(id + ch.h1 * cov.s1.mat() * ch.h1.transpose());
      out.value = half_logdet_llt(llt);
      out.g1 = 0.5 * ch.h1.transpose() * llt.solve(ch.h1);
      break;
    }
    case Term::single2: {
      const auto llt = llt_of(id + ch.h4 * cov.s2.mat() * ch.h4.transpose());
      out.value = half_logdet_llt(llt);
      out.g2 = 0.5 * ch.h4.transpose() * llt.solve(ch.h4);
      break;
    }
    case Term::tan1: {
      const Mat b = id + ch.h2 * cov.s2.mat() * ch.h2.transpose();
      const auto llt_b = llt_of(b);
      const auto llt_t = llt_of(b + ch.h1 * cov.s1.mat() * ch.h1.transpose());
      out.value = half_logdet_llt(llt_t) - half_logdet_llt(llt_b);
      out.g1 = 0.5 * ch.h1.transpose() * llt_t.solve(ch.h1);
      out.g2 = 0.5 * (ch.h2.transpose() * llt_t.solve(ch.h2) -
                      ch.h2.transpose() * llt_b.solve(ch.h2));
      break;
    }
    case Term::tan2: {
      const Mat b = id + ch.h3 * cov.s1.mat() * ch.h3.transpose();
      const auto llt_b = llt_of(b);
      const auto llt_t = llt_of(b + ch.h4 * cov.s2.mat() * ch.h4.transpose());
      out.value = half_logdet_llt(llt_t) - half_logdet_llt(llt_b);
      out.g2 = 0.5 * ch.h4.transpose() * llt_t.solve(ch.h4);
      out.g1 = 0.5 * (ch.h3.transpose() * llt_t.solve(ch.h3) -
                      ch.h3.transpose() * llt_b.solve(ch.h3));
      break;
    }
  }
  out.g1 = symmetric_part(out.g1);
  out.g2 = symmetric_part(out.g2);
  return out;
}

// Nonnegative combination of terms. Concave whenever every term with positive
// weight is concave on the feasible set being searched.
struct WeightedTerms {
  std::vector<std::pair<double, Term>> parts;
};

inline ObjectiveEval eval_terms(const WeightedTerms& wt, const ChannelPair& ch,
                                const CovariancePair& cov) {
  const Index t = ch.dim();
  ObjectiveEval acc;
  acc.g1 = Mat::Zero(t, t);
  acc.g2 = Mat::Zero(t, t);
  for (const auto& [coeff, term] : wt.parts) {
    const ObjectiveEval e = eval_term(term, ch, cov);
    acc.value += coeff * e.value;
    acc.g1 += coeff * e.g1;
    acc.g2 += coeff * e.g2;
  }
  return acc;
}

// Pointwise minimum over branches. tau <= 0 evaluates the exact minimum with
// the supergradient averaged over all branches within kActiveTol of it;
// tau > 0 evaluates a smoothed minimum that stays concave when every branch is
// concave and lies within tau*log(#branches) of the exact one.
inline ObjectiveEval eval_min_branches(const std::vector<WeightedTerms>& branches,
                                       const ChannelPair& ch,
                                       const CovariancePair& cov, double tau) {
  constexpr double kActiveTol = 1e-8;
  const Index t = ch.dim();
  std::vector<ObjectiveEval> evals;
  evals.reserve(branches.size());
  double fmin = std::numeric_limits<double>::infinity();
  for (const auto& b : branches) {
    evals.push_back(eval_terms(b, ch, cov));
    fmin = std::min(fmin, evals.back().value);
  }
  ObjectiveEval out;
  out.g1 = Mat::Zero(t, t);
  out.g2 = Mat::Zero(t, t);
  if (tau <= 0.0) {
    out.value = fmin;
    int active = 0;
    for (const auto& e : evals) {
      if (e.value <= fmin + kActiveTol) {
        out.g1 += e.g1;
        out.g2 += e.g2;
        ++active;
      }
    }
    out.g1 /= static_cast<double>(active);
    out.g2 /= static_cast<double>(active);
    return out;
  }
  double norm = 0.0;
  std::vector<double> w(evals.size());
  for (std::size_t i = 0; i < evals.size(); ++i) {
    w[i] = std::exp(-(evals[i].value - fmin) / tau);
    norm += w[i];
  }
  out.value = fmin - tau * std::log(norm);
  for (std::size_t i = 0; i < evals.size(); ++i) {
    const double wi = w[i] / norm;
    out.g1 += wi * evals[i].g1;
    out.g2 += wi * evals[i].g2;
  }
  return out;
}

inline CovariancePair project_feasible(const ChannelPair& ch, const Mat& s1,
                                       const Mat& s2) {
  return {project_trace_psd(SymMatrix(s1), ch.p1),
          project_trace_psd(SymMatrix(s2), ch.p2)};
}

// Projected gradient ascent with Armijo backtracking: initial step 0.5,
// shrink factor 0.5, slope fraction 1e-4. The accepted step carries over and
// doubles, so flat stretches do not pay a fresh backtracking toll each
// iteration. Stops at a projected-stationary point or after three
// consecutive negligible gains.
template <typename F>
std::pair<double, CovariancePair> ascend(const ChannelPair& ch, F&& objective,
                                         CovariancePair cur, int max_iters,
                                         std::vector<double>* trace) {
  constexpr double kSlope = 1e-4;
  constexpr double kShrink = 0.5;
  constexpr int kBacktracks = 40;
  ObjectiveEval e = objective(cur);
  double alpha = 0.5;
  int stall = 0;
  if (trace) trace->push_back(e.value);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool accepted = false;
    for (int bt = 0; bt < kBacktracks; ++bt) {
      CovariancePair next = project_feasible(ch, cur.s1.mat() + alpha * e.g1,
                                             cur.s2.mat() + alpha * e.g2);
      const double inner =
          ((next.s1.mat() - cur.s1.mat()).array() * e.g1.array()).sum() +
          ((next.s2.mat() - cur.s2.mat()).array() * e.g2.array()).sum();
      if (inner <= 1e-14 * std::max(1.0, std::abs(e.value))) break;
      ObjectiveEval trial = objective(next);
      if (trial.value >= e.value + kSlope * inner) {
        const double gain = trial.value - e.value;
        stall = gain <= 1e-13 * std::max(1.0, std::abs(e.value)) ? stall + 1 : 0;
        cur = std::move(next);
        e = std::move(trial);
        alpha = std::min(2.0 * alpha, 64.0);
        accepted = true;
        if (trace) trace->push_back(e.value);
        break;
      }
      alpha *= kShrink;
    }
    if (!accepted || stall >= 3) break;
  }
  return {e.value, std::move(cur)};
}

// Deterministic start covariances followed by seeded random fills, `restarts`
// in total: own-channel water-filling, isotropic full power, rank-1 along the
// top right singular vectors of the direct channels, zero, then random PSD
// draws with random trace fractions.
inline std::vector<CovariancePair> ascent_starts(const ChannelPair& ch,
                                                 int restarts,
                                                 std::uint64_t seed) {
  const Index t = ch.dim();
  std::vector<CovariancePair> starts;
  starts.push_back({waterfill_single(ch.h1, ch.p1).cov,
                    waterfill_single(ch.h4, ch.p2).cov});
  starts.push_back(isotropic_full_power(ch));
  {
    Eigen::JacobiSVD<Mat> svd1(ch.h1, Eigen::ComputeFullV);
    Eigen::JacobiSVD<Mat> svd4(ch.h4, Eigen::ComputeFullV);
    const Vec v1 = svd1.matrixV().col(0);
    const Vec v4 = svd4.matrixV().col(0);
    starts.push_back({SymMatrix(ch.p1 * v1 * v1.transpose()),
                      SymMatrix(ch.p2 * v4 * v4.transpose())});
  }
  starts.push_back({SymMatrix::zero(t), SymMatrix::zero(t)});
  if (static_cast<int>(starts.size()) > restarts) starts.resize(restarts);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> frac(0.05, 1.0);
  while (static_cast<int>(starts.size()) < restarts) {
    auto draw = [&](double p) {
      Mat b(t, t);
      for (Index i = 0; i < t; ++i)
        for (Index j = 0; j < t; ++j) b(i, j) = gauss(rng);
      Mat s = b * b.transpose();
      const double tr = s.trace();
      if (!(tr > 1e-300)) s = Mat::Identity(t, t);
      return SymMatrix(s * (frac(rng) * p / s.trace()));
    };
    const SymMatrix s1 = draw(ch.p1);
    const SymMatrix s2 = draw(ch.p2);
    starts.push_back({s1, s2});
  }
  return starts;
}

struct SearchOutcome {
  double best_value = 0.0;
  CovariancePair best_cov;
  std::vector<double> best_trace;
  double spread = 0.0;
  int restarts_used = 0;
};

// Index-ordered best-of reduction over restarts: ties keep the lowest index,
// so the outcome is independent of any execution reordering.
template <typename RunOne>
SearchOutcome run_multistart(const ChannelPair& ch, const SearchConfig& cfg,
                             RunOne&& run_one) {
  const int restarts = std::max(1, cfg.restarts);
  const auto starts = ascent_starts(ch, restarts, cfg.seed);
  SearchOutcome out;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < starts.size(); ++i) {
    std::vector<double> trace;
    const auto [value, cov] = run_one(starts[i], &trace);
    lo = std::min(lo, value);
    hi = std::max(hi, value);
    if (i == 0 || value > out.best_value) {
      out.best_value = value;
      out.best_cov = cov;
      out.best_trace = std::move(trace);
    }
  }
  out.spread = hi - lo;
  out.restarts_used = static_cast<int>(starts.size());
  return out;
}

// Normalized supergradient ascent on the exact minimum with diminishing steps
// c/sqrt(k); coarse phase that lands near the optimum before smoothing.
inline std::pair<double, CovariancePair> supergradient_phase(
    const ChannelPair& ch, const std::vector<WeightedTerms>& branches,
    const CovariancePair& start, int iters, std::vector<double>* trace) {
  CovariancePair cur = start;
  ObjectiveEval e = eval_min_branches(branches, ch, cur, 0.0);
  double best = e.value;
  CovariancePair best_cov = cur;
  if (trace) trace->push_back(best);
  const double c0 =
      0.25 * std::max(ch.p1, ch.p2) / std::sqrt(static_cast<double>(ch.dim()));
  for (int k = 1; k <= iters; ++k) {
    const double gnorm = std::sqrt(e.g1.squaredNorm() + e.g2.squaredNorm());
    if (gnorm < 1e-14) break;
    const double step = c0 / (std::sqrt(static_cast<double>(k)) * gnorm);
    cur = project_feasible(ch, cur.s1.mat() + step * e.g1,
                           cur.s2.mat() + step * e.g2);
    e = eval_min_branches(branches, ch, cur, 0.0);
    if (e.value > best) {
      best = e.value;
      best_cov = cur;
      if (trace) trace->push_back(best);
    }
  }
  return {best, std::move(best_cov)};
}

// One full max-min solve: supergradient phase, then Armijo ascent on a
// smoothed minimum annealed through eight temperature stages. Returns the
// exact minimum at the final point.
inline std::pair<double, CovariancePair> minmax_from(
    const ChannelPair& ch, const std::vector<WeightedTerms>& branches,
    const CovariancePair& start, const SearchConfig& cfg,
    std::vector<double>* trace) {
  auto [best, cov] = supergradient_phase(ch, branches, start, 300, trace);
  CovariancePair best_cov = cov;
  const int stage_iters = std::max(250, cfg.max_iters / 8);
  const double scale = std::max(1.0, std::abs(best));
  for (const double tau_rel : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9}) {
    const double tau = tau_rel * scale;
    auto stage = ascend(
        ch,
        [&](const CovariancePair& c) {
          return eval_min_branches(branches, ch, c, tau);
        },
        cov, stage_iters, trace);
    cov = std::move(stage.second);
    const double exact = eval_min_branches(branches, ch, cov, 0.0).value;
    if (exact > best) {
      best = exact;
      best_cov = cov;
    }
  }
  return {best, std::move(best_cov)};
}

// Branch menus of the regimes whose sum capacity is a concave max-min. The
// tan-containing branches are concave exactly on the certified orderings of
// their regime (the interfering link dominated by the direct link), which is
// what makes restart agreement a correctness check.
inline std::vector<WeightedTerms> regime_branches(Regime regime) {
  std::vector<WeightedTerms> branches;
  auto add = [&](std::initializer_list<std::pair<double, Term>> parts) {
    WeightedTerms wt;
    for (const auto& pr : parts) wt.parts.push_back(pr);
    branches.push_back(std::move(wt));
  };
  switch (regime) {
    case Regime::strong:
      add({{1.0, Term::mac1}});
      add({{1.0, Term::mac2}});
      add({{1.0, Term::single1}, {1.0, Term::single2}});
      break;
    case Regime::z_strong:
      add({{1.0, Term::mac1}});
      add({{1.0, Term::single1}, {1.0, Term::single2}});
      break;
    case Regime::mixed_rx2_strong:
      add({{1.0, Term::mac2}});
      add({{1.0, Term::tan1}, {1.0, Term::single2}});
      break;
    case Regime::mixed_rx1_strong:
      add({{1.0, Term::mac1}});
      add({{1.0, Term::tan2}, {1.0, Term::single1}});
      break;
    default:
      throw WrongRegime(
          "max-min capacity needs a strong, mixed, or one-sided strong regime");
  }
  return branches;
}

// Concave multistart solve with the agreement check: a spread beyond the
// tolerance on a concave problem indicates an implementation bug.
inline SearchOutcome concave_minmax_checked(
    const ChannelPair& ch, const std::vector<WeightedTerms>& branches,
    const SearchConfig& cfg, const char* what) {
  auto outcome = run_multistart(
      ch, cfg, [&](const CovariancePair& start, std::vector<double>* trace) {
        return minmax_from(ch, branches, start, cfg, trace);
      });
  if (outcome.spread >
      cfg.agree_tol * std::max(1.0, std::abs(outcome.best_value)))
    throw NonConcaveAgreementFailure(
        std::string(what) + ": restart values spread " +
        std::to_string(outcome.spread) + " beyond the concavity tolerance");
  return outcome;
}

}  // namespace detail

// Best treat-as-noise sum rate found by multistart projected gradient ascent.
// The problem is nonconvex, so the value is an achievable lower bound; it is
// exact when the channel is certified noisy and the search reached the
// optimum.
inline RateResult maximize_tan(const ChannelPair& ch,
                               const SearchConfig& cfg = {}) {
  require_valid(ch);
  detail::WeightedTerms objective;
  objective.parts = {{1.0, Term::tan1}, {1.0, Term::tan2}};
  const auto outcome = detail::run_multistart(
      ch, cfg, [&](const CovariancePair& start, std::vector<double>* trace) {
        return detail::ascend(
            ch,
            [&](const CovariancePair& c) {
              return detail::eval_terms(objective, ch, c);
            },
            start, cfg.max_iters, trace);
      });
  RateResult r;
  r.sum_rate_nats = std::max(0.0, outcome.best_value);
  r.achieving = outcome.best_cov;
  r.regime = Regime::unclassified;
  r.capacity_certified = false;
  r.objective_trace = outcome.best_trace;
  r.multistart_spread = outcome.spread;
  r.restarts_used = outcome.restarts_used;
  return r;
}

// Maximum of the pointwise minimum of the regime's concave rate bounds.
// Concavity makes the optimal value unique, so all restarts must agree within
// cfg.agree_tol; disagreement throws NonConcaveAgreementFailure.
inline RateResult maximize_minmax(const ChannelPair& ch, Regime regime,
                                  const SearchConfig& cfg = {}) {
  require_valid(ch);
  const auto branches = detail::regime_branches(regime);
  const auto outcome =
      detail::concave_minmax_checked(ch, branches, cfg, "max-min capacity");
  RateResult r;
  r.sum_rate_nats = std::max(0.0, outcome.best_value);
  r.achieving = outcome.best_cov;
  r.regime = regime;
  r.capacity_certified = true;
  r.objective_trace = outcome.best_trace;
  r.multistart_spread = outcome.spread;
  r.restarts_used = outcome.restarts_used;
  return r;
}

// Classifies the channel and routes to the matching capacity expression.
// Unclassified channels get the best known achievable scheme (the larger of
// treat-as-noise and the joint-decoding max-min), explicitly uncertified.
inline RateResult sum_capacity(const ChannelPair& ch,
                               const SearchConfig& cfg = {}) {
  const RegimeReport rep = classify(ch, cfg);
  switch (rep.label) {
    case Regime::noisy:
    case Regime::z_weak: {
      // With one-sided interference the second treat-as-noise term already
      // equals the single-user rate, so one search serves both labels.
      RateResult r = maximize_tan(ch, cfg);
      r.regime = rep.label;
      r.capacity_certified = true;
      return r;
    }
    case Regime::strong:
    case Regime::z_strong:
    case Regime::mixed_rx1_strong:
    case Regime::mixed_rx2_strong:
      return maximize_minmax(ch, rep.label, cfg);
    default: {
      RateResult r = maximize_tan(ch, cfg);
      std::vector<detail::WeightedTerms> compound;
      compound.push_back({{{1.0, Term::mac1}}});
      compound.push_back({{{1.0, Term::mac2}}});
      compound.push_back({{{1.0, Term::single1}, {1.0, Term::single2}}});
      const auto joint = detail::concave_minmax_checked(
          ch, compound, cfg, "joint-decoding lower bound");
      if (joint.best_value > r.sum_rate_nats) {
        r.sum_rate_nats = std::max(0.0, joint.best_value);
        r.achieving = joint.best_cov;
        r.objective_trace = joint.best_trace;
        r.multistart_spread = joint.spread;
        r.restarts_used = joint.restarts_used;
      }
      r.regime = Regime::unclassified;
      r.capacity_certified = false;
      return r;
    }
  }
}

// Traces the Pareto boundary of the capacity region for regimes where the
// region is an intersection of single-user and joint-decoding half-spaces.
// Each weight theta_j = (pi/2) j/(n+1) scalarizes the corner linear program
// through its dual, which is a concave max-min in the covariances.
inline RegionBoundary region_boundary(const ChannelPair& ch, int n_weights,
                                      const SearchConfig& cfg = {}) {
  if (n_weights < 1) throw Error("region_boundary: need at least one weight");
  const RegimeReport rep = classify(ch, cfg);
  if (rep.label != Regime::strong && rep.label != Regime::z_strong)
    throw WrongRegime(
        "region tracing needs fully decodable interference (strong or "
        "z_strong)");
  const std::vector<Term> sums =
      rep.label == Regime::strong ? std::vector<Term>{Term::mac1, Term::mac2}
                                  : std::vector<Term>{Term::mac1};
  std::vector<RegionPoint> raw;
  for (int j = 1; j <= n_weights; ++j) {
    const double theta =
        0.5 * std::numbers::pi * static_cast<double>(j) / (n_weights + 1);
    const double mu1 = std::cos(theta) * std::cos(theta);
    const double mu2 = 1.0 - mu1;
    std::vector<detail::WeightedTerms> branches;
    auto add = [&](std::initializer_list<std::pair<double, Term>> parts) {
      detail::WeightedTerms wt;
      for (const auto& pr : parts)
        if (pr.first > 0.0) wt.parts.push_back(pr);
      branches.push_back(std::move(wt));
    };
    add({{mu1, Term::single1}, {mu2, Term::single2}});
    for (const Term s : sums) {
      if (mu2 >= mu1) {
        add({{mu1, s}, {mu2 - mu1, Term::single2}});
        add({{mu2, s}});
      } else {
        add({{mu2, s}, {mu1 - mu2, Term::single1}});
        add({{mu1, s}});
      }
    }
    const auto outcome =
        detail::concave_minmax_checked(ch, branches, cfg, "region tracing");
    const auto value = [&](Term t_) {
      return detail::eval_term(t_, ch, outcome.best_cov).value;
    };
    const double c1 = value(Term::single1);
    const double c2 = value(Term::single2);
    double s_cap = value(Term::mac1);
    if (sums.size() == 2) s_cap = std::min(s_cap, value(Term::mac2));
    RegionPoint pt;
    pt.mu1 = mu1;
    pt.mu2 = mu2;
    if (mu1 >= mu2) {
      pt.r1_nats = std::min(c1, s_cap);
      pt.r2_nats = std::max(0.0, std::min(c2, s_cap - pt.r1_nats));
    } else {
      pt.r2_nats = std::min(c2, s_cap);
      pt.r1_nats = std::max(0.0, std::min(c1, s_cap - pt.r2_nats));
    }
    raw.push_back(pt);
  }
  std::stable_sort(raw.begin(), raw.end(),
                   [](const RegionPoint& a, const RegionPoint& b) {
                     if (a.r1_nats != b.r1_nats) return a.r1_nats < b.r1_nats;
                     return a.r2_nats > b.r2_nats;
                   });
  std::vector<RegionPoint> dedup;
  for (const auto& p : raw)
    if (dedup.empty() || p.r1_nats > dedup.back().r1_nats + 1e-9)
      dedup.push_back(p);
  RegionBoundary boundary;
  double best_r2 = -std::numeric_limits<double>::infinity();
  for (auto it = dedup.rbegin(); it != dedup.rend(); ++it) {
    if (it->r2_nats > best_r2 + 1e-12) {
      boundary.points.push_back(*it);
      best_r2 = it->r2_nats;
    }
  }
  std::reverse(boundary.points.begin(), boundary.points.end());
  return boundary;
}

namespace detail {

template <typename F>
double golden_argmax(F&& f, double lo, double hi, double xtol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
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
  }
  return 0.5 * (a + b);
}

// Global maximum of a scalar objective on [0, ub]: coarse scan brackets the
// best sample, golden-section refines inside the bracket.
template <typename F>
double scan_golden_max(F&& f, double ub) {
  if (!(ub > 0.0)) return 0.0;
  constexpr int kScan = 64;
  double best_x = 0.0;
  double best_f = f(0.0);
  for (int i = 1; i <= kScan; ++i) {
    const double x = ub * static_cast<double>(i) / kScan;
    const double fx = f(x);
    if (fx > best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  const double h = ub / kScan;
  const double lo = std::max(0.0, best_x - h);
  const double hi = std::min(ub, best_x + h);
  const double xg = golden_argmax(f, lo, hi, 1e-12 * std::max(1.0, ub));
  return f(xg) > best_f ? xg : best_x;
}

}  // namespace detail

// Subchannel power allocation on a parallel channel: cyclic coordinate ascent
// with bracketed golden-section line solves from several deterministic
// starts, then a common-multiplier stationarity audit and the per-subchannel
// separability test.
inline PgicResult pgic_allocate(const ChannelPair& ch,
                                const SearchConfig& cfg = {}) {
  (void)cfg;
  require_valid(ch);
  const auto gains = channel_gains(ch);
  const Index t = ch.dim();
  const Vec h1s = gains[0].array().square();
  const Vec h2s = gains[1].array().square();
  const Vec h3s = gains[2].array().square();
  const Vec h4s = gains[3].array().square();

  const auto rate_one = [&](Index i, double p, double q) {
    const double d1 = 1.0 + h2s(i) * q;
    const double d2 = 1.0 + h3s(i) * p;
    return 0.5 * (std::log(d1 + h1s(i) * p) - std::log(d1)) +
           0.5 * (std::log(d2 + h4s(i) * q) - std::log(d2));
  };
  const auto total_rate = [&](const Vec& p, const Vec& q) {
    double sum = 0.0;
    for (Index i = 0; i < t; ++i) sum += rate_one(i, p(i), q(i));
    return sum;
  };

  const auto ascend_from = [&](Vec p, Vec q) {
    double total = total_rate(p, q);
    for (int sweep = 0; sweep < 20000; ++sweep) {
      for (Index i = 0; i < t; ++i) {
        const double ub = ch.p1 - (p.sum() - p(i));
        const auto f = [&](double x) { return rate_one(i, x, q(i)); };
        const double x = detail::scan_golden_max(f, ub);
        if (f(x) > f(p(i))) p(i) = x;
      }
      for (Index i = 0; i < t; ++i) {
        const double ub = ch.p2 - (q.sum() - q(i));
        const auto f = [&](double x) { return rate_one(i, p(i), x); };
        const double x = detail::scan_golden_max(f, ub);
        if (f(x) > f(q(i))) q(i) = x;
      }
      // Pairwise budget-preserving transfers: once the budget is tight the
      // per-coordinate moves above cannot shift mass between subchannels, so
      // redistribute each pair with the same 1-D solver.
      for (Index i = 0; i + 1 < t; ++i) {
        for (Index j = i + 1; j < t; ++j) {
          {
            const double s = p(i) + p(j);
            const auto f = [&](double x) {
              return rate_one(i, x, q(i)) + rate_one(j, s - x, q(j));
            };
            const double x = detail::scan_golden_max(f, s);
            if (s > 0.0 && f(x) > f(p(i))) {
              p(i) = x;
              p(j) = s - x;
            }
          }
          {
            const double s = q(i) + q(j);
            const auto f = [&](double x) {
              return rate_one(i, p(i), x) + rate_one(j, p(j), s - x);
            };
            const double x = detail::scan_golden_max(f, s);
            if (s > 0.0 && f(x) > f(q(i))) {
              q(i) = x;
              q(j) = s - x;
            }
          }
        }
      }
      const double next = total_rate(p, q);
      const double gain = next - total;
      total = next;
      if (gain < 1e-12) break;
    }
    return std::tuple<Vec, Vec, double>(p, q, total);
  };

  // Water-filling on the own-link gains, ignoring interference.
  const auto own_waterfill = [&](const Vec& own, double budget) {
    std::vector<double> inv;
    for (Index i = 0; i < t; ++i)
      if (own(i) > 1e-15) inv.push_back(1.0 / own(i));
    Vec alloc = Vec::Zero(t);
    if (inv.empty()) return alloc;
    std::vector<double> sorted = inv;
    std::sort(sorted.begin(), sorted.end());
    double prefix = 0.0;
    for (double v : sorted) prefix += v;
    double level = 0.0;
    for (std::size_t k = sorted.size(); k >= 1; --k) {
      const double nu = (budget + prefix) / static_cast<double>(k);
      if (nu >= sorted[k - 1]) {
        level = nu;
        break;
      }
      prefix -= sorted[k - 1];
    }
    for (Index i = 0; i < t; ++i)
      if (own(i) > 1e-15) alloc(i) = std::max(0.0, level - 1.0 / own(i));
    return alloc;
  };

  std::vector<std::pair<Vec, Vec>> starts;
  starts.emplace_back(Vec::Constant(t, ch.p1 / static_cast<double>(t)),
                      Vec::Constant(t, ch.p2 / static_cast<double>(t)));
  starts.emplace_back(Vec::Zero(t), Vec::Zero(t));
  starts.emplace_back(own_waterfill(h1s, ch.p1), own_waterfill(h4s, ch.p2));

  Vec best_p, best_q;
  double best_total = -std::numeric_limits<double>::infinity();
  for (const auto& [p0, q0] : starts) {
    const auto [p, q, total] = ascend_from(p0, q0);
    if (total > best_total) {
      best_total = total;
      best_p = p;
      best_q = q;
    }
  }

  PgicResult res;
  res.p1_alloc = best_p;
  res.p2_alloc = best_q;
  res.sum_rate_nats = best_total;

  const auto dp = [&](Index i) {
    const double d1 = 1.0 + h2s(i) * best_q(i);
    const double n1 = d1 + h1s(i) * best_p(i);
    const double d2 = 1.0 + h3s(i) * best_p(i);
    const double n2 = d2 + h4s(i) * best_q(i);
    return 0.5 * h1s(i) / n1 - 0.5 * h3s(i) * h4s(i) * best_q(i) / (d2 * n2);
  };
  const auto dq = [&](Index i) {
    const double d1 = 1.0 + h2s(i) * best_q(i);
    const double n1 = d1 + h1s(i) * best_p(i);
    const double d2 = 1.0 + h3s(i) * best_p(i);
    const double n2 = d2 + h4s(i) * best_q(i);
    return 0.5 * h4s(i) / n2 - 0.5 * h2s(i) * h1s(i) * best_p(i) / (d1 * n1);
  };
  const auto kkt_user = [&](const std::vector<double>& grad, const Vec& alloc) {
    double hi = 1.0;
    for (double g : grad) hi = std::max(hi, g);
    hi += 1.0;
    const auto violation = [&](double mu) {
      double worst = 0.0;
      for (Index i = 0; i < t; ++i) {
        if (alloc(i) > 1e-12)
          worst = std::max(worst, std::abs(grad[static_cast<std::size_t>(i)] - mu));
        else
          worst = std::max(worst, grad[static_cast<std::size_t>(i)] - mu);
      }
      return worst;
    };
    const double mu = detail::golden_argmax(
        [&](double m) { return -violation(m); }, 0.0, hi, 1e-13);
    return std::min(violation(mu), violation(0.0));
  };
  std::vector<double> g1v, g2v;
  for (Index i = 0; i < t; ++i) {
    g1v.push_back(dp(i));
    g2v.push_back(dq(i));
  }
  res.kkt_residual =
      std::max(kkt_user(g1v, best_p), kkt_user(g2v, best_q));

  for (Index i = 0; i < t; ++i) {
    const double lhs =
        std::abs(gains[0](i) * gains[1](i)) * (1.0 + h3s(i) * best_p(i)) +
        std::abs(gains[2](i) * gains[3](i)) * (1.0 + h2s(i) * best_q(i));
    res.per_sub_conditions.push_back(lhs <= std::abs(gains[0](i) * gains[3](i)));
  }
  return res;
}

// One row of an interference-strength sweep: the regime label and, where
// treat-as-noise is provably optimal, the sum capacity.
struct SweepRow {
  double a = 0.0;
  Regime regime = Regime::unclassified;
  std::optional<double> c_nats;
};

// Scales the interfering links of `base` by sqrt(a) for each a in the grid,
// classifies, and records the treat-as-noise capacity on noisy rows.
inline std::vector<SweepRow> sweep_fig2(const ChannelPair& base,
                                        const std::vector<double>& a_grid,
                                        const SearchConfig& cfg = {}) {
  require_valid(base);
  std::vector<SweepRow> rows;
  rows.reserve(a_grid.size());
  for (const double a : a_grid) {
    ChannelPair ch = base;
    const double root = std::sqrt(std::max(0.0, a));
    ch.h2 = root * base.h2;
    ch.h3 = root * base.h3;
    SweepRow row;
    row.a = a;
    const RegimeReport rep = classify(ch, cfg);
    row.regime = rep.label;
    if (rep.label == Regime::noisy)
      row.c_nats = maximize_tan(ch, cfg).sum_rate_nats;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace iccap

#endif  // ICCAP_OPTIMIZER_HPP
