// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "iccap/optimizer.hpp"
#include "oracles.hpp"

using Catch::Approx;
using namespace iccap;

namespace {

ChannelPair scalar_channel(double a, double b, double p1, double p2) {
  ChannelPair ch;
  ch.h1 = Mat::Constant(1, 1, 1.0);
  ch.h2 = Mat::Constant(1, 1, std::sqrt(a));
  ch.h3 = Mat::Constant(1, 1, std::sqrt(b));
  ch.h4 = Mat::Constant(1, 1, 1.0);
  ch.p1 = p1;
  ch.p2 = p2;
  return ch;
}

ChannelPair interference_free(Index t = 2, double p = 2.0) {
  ChannelPair ch;
  ch.h1 = Mat::Identity(t, t);
  ch.h2 = Mat::Zero(t, t);
  ch.h3 = Mat::Zero(t, t);
  ch.h4 = Mat::Identity(t, t);
  ch.p1 = ch.p2 = p;
  return ch;
}

ChannelPair random_channel(oracles::Rng& rng, Index t, double cross) {
  ChannelPair ch;
  ch.h1 = oracles::random_well_conditioned(t, 0.6, 1.4, rng);
  ch.h4 = oracles::random_well_conditioned(t, 0.6, 1.4, rng);
  ch.h2 = oracles::random_matrix(t, cross, rng);
  ch.h3 = oracles::random_matrix(t, cross, rng);
  ch.p1 = rng.uniform(0.5, 3.0);
  ch.p2 = rng.uniform(0.5, 3.0);
  return ch;
}

// Interfering links dominate the direct links: H2 = C H4 and H3 = C' H1 with
// every singular value of C, C' at least `lo` > 1.
ChannelPair strong_instance(oracles::Rng& rng, Index t, double lo, double hi) {
  ChannelPair ch;
  ch.h1 = oracles::random_well_conditioned(t, 0.7, 1.3, rng);
  ch.h4 = oracles::random_well_conditioned(t, 0.7, 1.3, rng);
  ch.h2 = oracles::random_well_conditioned(t, lo, hi, rng) * ch.h4;
  ch.h3 = oracles::random_well_conditioned(t, lo, hi, rng) * ch.h1;
  ch.p1 = rng.uniform(0.5, 2.0);
  ch.p2 = rng.uniform(0.5, 2.0);
  return ch;
}

// Receiver 2 strong, receiver 1 weak: H2 dominated by H4, H3 dominating H1.
ChannelPair mixed_rx2_instance(oracles::Rng& rng, Index t) {
  ChannelPair ch;
  ch.h1 = oracles::random_well_conditioned(t, 0.7, 1.3, rng);
  ch.h4 = oracles::random_well_conditioned(t, 0.7, 1.3, rng);
  ch.h2 = oracles::random_well_conditioned(t, 0.2, 0.8, rng) * ch.h4;
  ch.h3 = oracles::random_well_conditioned(t, 1.1, 1.8, rng) * ch.h1;
  ch.p1 = rng.uniform(0.5, 2.0);
  ch.p2 = rng.uniform(0.5, 2.0);
  return ch;
}

double term_value(Term term, const ChannelPair& ch, const CovariancePair& cov) {
  return iccap::detail::eval_term(term, ch, cov).value;
}

double outer_bound(const ChannelPair& ch) {
  return single_user_capacity(ch.h1, ch.p1) +
         single_user_capacity(ch.h4, ch.p2);
}

}  // namespace

TEST_CASE(
    "interference-free identity channel attains the exact water-filling sum "
    "rate") {
  const ChannelPair ch = interference_free(2, 2.0);
  const RateResult r = sum_capacity(ch);
  CHECK(r.regime == Regime::noisy);
  CHECK(r.capacity_certified);
  CHECK(r.sum_rate_nats == Approx(2.0 * std::log(2.0)).margin(1e-8));
  CHECK(covariance_feasible(ch, r.achieving));
  CHECK(r.multistart_spread >= 0.0);
  CHECK(r.restarts_used == 20);
}

TEST_CASE(
    "scalar treat-as-noise search matches the closed form and the power "
    "grid at weak interference") {
  const ChannelPair ch = scalar_channel(0.04, 0.04, 1.0, 1.0);
  const RateResult r = maximize_tan(ch);
  // Full power is optimal here; both receivers then see SINR 1/1.04.
  const double closed = std::log(1.0 + 1.0 / 1.04);
  CHECK(r.sum_rate_nats == Approx(closed).margin(1e-6));
  const auto tan_rate = [](double p, double q) {
    return 0.5 * std::log(1.0 + p / (1.0 + 0.04 * q)) +
           0.5 * std::log(1.0 + q / (1.0 + 0.04 * p));
  };
  const double grid = oracles::grid_max_2d(tan_rate, 1.0, 1.0, 1e-3);
  CHECK(r.sum_rate_nats == Approx(grid).margin(2e-4));
  CHECK(r.achieving.s1.trace() == Approx(1.0).margin(1e-6));
  CHECK(r.achieving.s2.trace() == Approx(1.0).margin(1e-6));
}

TEST_CASE("treat-as-noise value never drops when a power budget doubles") {
  oracles::Rng rng(41);
  for (int rep = 0; rep < 6; ++rep) {
    const Index t = 1 + rep % 2;
    ChannelPair ch = random_channel(rng, t, 0.3);
    const double base = maximize_tan(ch).sum_rate_nats;
    ch.p1 *= 2.0;
    const double grown = maximize_tan(ch).sum_rate_nats;
    CHECK(grown >= base - 1e-8);
  }
}

TEST_CASE("same seed reproduces a treat-as-noise search bit for bit") {
  oracles::Rng rng(7);
  const ChannelPair ch = random_channel(rng, 2, 0.4);
  SearchConfig cfg;
  cfg.seed = 1234;
  const RateResult a = maximize_tan(ch, cfg);
  const RateResult b = maximize_tan(ch, cfg);
  CHECK(a.sum_rate_nats == b.sum_rate_nats);
  CHECK(a.multistart_spread == b.multistart_spread);
  CHECK(a.achieving.s1.mat() == b.achieving.s1.mat());
  CHECK(a.achieving.s2.mat() == b.achieving.s2.mat());
}

TEST_CASE(
    "strong-interference max-min reaches the textbook scalar value at full "
    "power") {
  const ChannelPair ch = scalar_channel(2.0, 2.0, 1.0, 1.0);
  REQUIRE(classify(ch).label == Regime::strong);
  const RateResult r = maximize_minmax(ch, Regime::strong);
  CHECK(r.sum_rate_nats == Approx(std::log(2.0)).margin(1e-6));
  CHECK(r.capacity_certified);
  CHECK(r.regime == Regime::strong);
  const auto branches = [](double p, double q) {
    const double mac1 = 0.5 * std::log(1.0 + p + 2.0 * q);
    const double mac2 = 0.5 * std::log(1.0 + 2.0 * p + q);
    const double singles = 0.5 * std::log(1.0 + p) + 0.5 * std::log(1.0 + q);
    return std::min({mac1, mac2, singles});
  };
  const double grid = oracles::grid_max_2d(branches, 1.0, 1.0, 1e-3);
  CHECK(r.sum_rate_nats == Approx(grid).margin(1e-4));
}

TEST_CASE("mixed-regime max-min matches an independent scalar power grid") {
  const ChannelPair ch = scalar_channel(0.25, 4.0, 1.0, 1.0);
  REQUIRE(classify(ch).label == Regime::mixed_rx2_strong);
  const RateResult r = sum_capacity(ch);
  CHECK(r.regime == Regime::mixed_rx2_strong);
  CHECK(r.capacity_certified);
  const auto branches = [](double p, double q) {
    const double mac2 = 0.5 * std::log(1.0 + 4.0 * p + q);
    const double tan1 = 0.5 * std::log(1.0 + p / (1.0 + 0.25 * q));
    const double single2 = 0.5 * std::log(1.0 + q);
    return std::min(mac2, tan1 + single2);
  };
  const double grid = oracles::grid_max_2d(branches, 1.0, 1.0, 1e-3);
  CHECK(r.sum_rate_nats == Approx(grid).margin(1e-4));
  // Full power is optimal; the treat-as-noise branch is the active one.
  CHECK(r.sum_rate_nats == Approx(0.5 * std::log(3.6)).margin(1e-6));
}

TEST_CASE("one-sided channels route through their matching capacity branch") {
  SECTION("weak one-sided interference folds into the noise") {
    const ChannelPair ch = scalar_channel(0.25, 0.0, 1.0, 1.0);
    REQUIRE(classify(ch).label == Regime::z_weak);
    const RateResult r = sum_capacity(ch);
    CHECK(r.regime == Regime::z_weak);
    CHECK(r.capacity_certified);
    const auto objective = [](double p, double q) {
      return 0.5 * std::log(1.0 + p / (1.0 + 0.25 * q)) +
             0.5 * std::log(1.0 + q);
    };
    const double grid = oracles::grid_max_2d(objective, 1.0, 1.0, 1e-3);
    CHECK(r.sum_rate_nats == Approx(grid).margin(1e-4));
  }
  SECTION("strong one-sided interference is jointly decoded") {
    const ChannelPair ch = scalar_channel(4.0, 0.0, 1.0, 1.0);
    REQUIRE(classify(ch).label == Regime::z_strong);
    const RateResult r = sum_capacity(ch);
    CHECK(r.regime == Regime::z_strong);
    CHECK(r.capacity_certified);
    // Joint bound 0.5*log 6 exceeds the single-user sum log 2 at full power.
    CHECK(r.sum_rate_nats == Approx(std::log(2.0)).margin(1e-6));
  }
}

TEST_CASE("unclassified channels report an uncertified achievable bound") {
  const ChannelPair ch = scalar_channel(0.6, 0.6, 10.0, 10.0);
  REQUIRE(classify(ch).label == Regime::unclassified);
  const RateResult r = sum_capacity(ch);
  CHECK(r.regime == Regime::unclassified);
  CHECK_FALSE(r.capacity_certified);
  // At least as good as both schemes evaluated at full power.
  const CovariancePair full = isotropic_full_power(ch);
  const double tan_full = term_value(Term::tan1, ch, full) +
                          term_value(Term::tan2, ch, full);
  const double joint_full =
      std::min({term_value(Term::mac1, ch, full),
                term_value(Term::mac2, ch, full),
                term_value(Term::single1, ch, full) +
                    term_value(Term::single2, ch, full)});
  CHECK(r.sum_rate_nats >= std::max(tan_full, joint_full) - 1e-6);
  CHECK(r.sum_rate_nats <= outer_bound(ch) + 1e-8);
}

TEST_CASE("analytic gradients of every rate term match central differences") {
  oracles::Rng rng(97);
  const Term terms[] = {Term::mac1,    Term::mac2, Term::single1,
                        Term::single2, Term::tan1, Term::tan2};
  int points = 0;
  for (int rep = 0; rep < 17; ++rep) {
    const Index t = 1 + rep % 3;
    const ChannelPair ch = random_channel(rng, t, 0.5);
    const CovariancePair cov{
        SymMatrix(oracles::random_psd_with_trace(
            t, rng.uniform(0.1, 0.9) * ch.p1, rng)),
        SymMatrix(oracles::random_psd_with_trace(
            t, rng.uniform(0.1, 0.9) * ch.p2, rng))};
    Mat d1 = oracles::random_symmetric(t, 1.0, rng);
    Mat d2 = oracles::random_symmetric(t, 1.0, rng);
    d1 /= d1.norm();
    d2 /= d2.norm();
    for (const Term term : terms) {
      const ObjectiveEval e = iccap::detail::eval_term(term, ch, cov);
      const double analytic =
          (e.g1.array() * d1.array()).sum() + (e.g2.array() * d2.array()).sum();
      const double fd = oracles::fd_directional(
          [&](const Mat& s1, const Mat& s2) {
            return iccap::detail::eval_term(
                       term, ch, {SymMatrix(s1), SymMatrix(s2)})
                .value;
          },
          cov.s1.mat(), cov.s2.mat(), d1, d2, 1e-6);
      CHECK(std::abs(fd - analytic) <= 1e-5 * std::max(std::abs(analytic), 1e-3));
      ++points;
    }
  }
  CHECK(points >= 100);
}

TEST_CASE("max-min restarts agree within the concavity tolerance") {
  oracles::Rng rng(11);
  SearchConfig cfg;
  for (int rep = 0; rep < 5; ++rep) {
    const ChannelPair ch = strong_instance(rng, 2, 1.05, 1.8);
    REQUIRE(classify(ch).label == Regime::strong);
    const RateResult r = maximize_minmax(ch, Regime::strong, cfg);
    CHECK(r.multistart_spread <=
          cfg.agree_tol * std::max(1.0, r.sum_rate_nats));
    CHECK(r.sum_rate_nats <= outer_bound(ch) + 1e-8);
    CHECK(covariance_feasible(ch, r.achieving));
    // The searched optimum cannot fall below the bound at full power.
    const CovariancePair full = isotropic_full_power(ch);
    const double at_full =
        std::min({term_value(Term::mac1, ch, full),
                  term_value(Term::mac2, ch, full),
                  term_value(Term::single1, ch, full) +
                      term_value(Term::single2, ch, full)});
    CHECK(r.sum_rate_nats >= at_full - 1e-7);
  }
  for (int rep = 0; rep < 5; ++rep) {
    const ChannelPair ch = mixed_rx2_instance(rng, 2);
    REQUIRE(classify(ch).label == Regime::mixed_rx2_strong);
    const RateResult r = maximize_minmax(ch, Regime::mixed_rx2_strong, cfg);
    CHECK(r.multistart_spread <=
          cfg.agree_tol * std::max(1.0, r.sum_rate_nats));
    CHECK(r.sum_rate_nats <= outer_bound(ch) + 1e-8);
    CHECK(covariance_feasible(ch, r.achieving));
  }
}

TEST_CASE("max-min on random scalar strong channels equals the grid oracle") {
  oracles::Rng rng(23);
  for (int rep = 0; rep < 4; ++rep) {
    const double a = rng.uniform(1.2, 3.0);
    const double b = rng.uniform(1.2, 3.0);
    const double p = rng.uniform(0.4, 1.5);
    const ChannelPair ch = scalar_channel(a, b, p, p);
    REQUIRE(classify(ch).label == Regime::strong);
    const RateResult r = maximize_minmax(ch, Regime::strong);
    const auto branches = [&](double x, double y) {
      const double mac1 = 0.5 * std::log(1.0 + x + a * y);
      const double mac2 = 0.5 * std::log(1.0 + b * x + y);
      const double singles =
          0.5 * std::log(1.0 + x) + 0.5 * std::log(1.0 + y);
      return std::min({mac1, mac2, singles});
    };
    const double grid = oracles::grid_max_2d(branches, p, p, 1e-3);
    CHECK(r.sum_rate_nats == Approx(grid).margin(1e-4));
  }
}

TEST_CASE("vanishing budgets collapse the max-min value to zero") {
  ChannelPair ch = scalar_channel(2.0, 2.0, 1e-9, 1e-9);
  const RateResult r = maximize_minmax(ch, Regime::strong);
  CHECK(r.sum_rate_nats >= 0.0);
  CHECK(r.sum_rate_nats <= 1e-8);
}

TEST_CASE("max-min rejects labels without a concave branch menu") {
  const ChannelPair ch = scalar_channel(0.04, 0.04, 1.0, 1.0);
  CHECK_THROWS_AS(maximize_minmax(ch, Regime::noisy), WrongRegime);
  CHECK_THROWS_AS(maximize_minmax(ch, Regime::unclassified), WrongRegime);
}

TEST_CASE("sum capacity stays under the interference-free outer bound") {
  oracles::Rng rng(59);
  for (int rep = 0; rep < 10; ++rep) {
    const Index t = 1 + rep % 3;
    const double cross = rep % 2 == 0 ? 0.25 : 1.0;
    const ChannelPair ch = random_channel(rng, t, cross);
    const RateResult r = sum_capacity(ch);
    CHECK(r.sum_rate_nats >= 0.0);
    CHECK(r.sum_rate_nats <= outer_bound(ch) + 1e-8);
    CHECK(covariance_feasible(ch, r.achieving));
  }
}

TEST_CASE("region tracing needs a fully decodable regime") {
  const ChannelPair weak = scalar_channel(0.04, 0.04, 1.0, 1.0);
  CHECK_THROWS_AS(region_boundary(weak, 9), WrongRegime);
}

TEST_CASE(
    "symmetric strong region collapses to the simultaneous single-user "
    "corner") {
  const ChannelPair ch = scalar_channel(2.0, 2.0, 1.0, 1.0);
  const RegionBoundary b = region_boundary(ch, 33);
  REQUIRE(b.points.size() == 1);
  CHECK(b.points[0].r1_nats == Approx(0.5 * std::log(2.0)).margin(1e-5));
  CHECK(b.points[0].r2_nats == Approx(0.5 * std::log(2.0)).margin(1e-5));
}

TEST_CASE(
    "asymmetric one-sided strong region traces both sum-face corners and "
    "its apex matches the sum capacity") {
  // Larger user-1 budget makes the joint-decoding sum constraint bite.
  ChannelPair ch = scalar_channel(4.0, 0.0, 8.0, 1.0);
  REQUIRE(classify(ch).label == Regime::z_strong);
  const RegionBoundary b = region_boundary(ch, 33);
  REQUIRE(b.points.size() == 2);
  const double s_full = 0.5 * std::log(13.0);
  const double c1 = 0.5 * std::log(9.0);
  const double c2 = 0.5 * std::log(2.0);
  CHECK(b.points[0].r1_nats == Approx(s_full - c2).margin(1e-4));
  CHECK(b.points[0].r2_nats == Approx(c2).margin(1e-4));
  CHECK(b.points[1].r1_nats == Approx(c1).margin(1e-4));
  CHECK(b.points[1].r2_nats == Approx(s_full - c1).margin(1e-4));
  // Pareto ordering.
  CHECK(b.points[0].r1_nats < b.points[1].r1_nats);
  CHECK(b.points[0].r2_nats > b.points[1].r2_nats);
  // Apex consistency with the routed sum capacity.
  double apex = 0.0;
  for (const auto& pt : b.points)
    apex = std::max(apex, pt.r1_nats + pt.r2_nats);
  const RateResult c = sum_capacity(ch);
  CHECK(apex == Approx(c.sum_rate_nats).margin(1e-5));
  // A single weight yields the sum-rate apex point.
  const RegionBoundary one = region_boundary(ch, 1);
  REQUIRE(one.points.size() == 1);
  CHECK(one.points[0].r1_nats + one.points[0].r2_nats ==
        Approx(c.sum_rate_nats).margin(1e-5));
}

TEST_CASE("two-sided strong region apex matches the three-branch capacity") {
  ChannelPair ch = scalar_channel(2.0, 3.0, 2.0, 1.0);
  REQUIRE(classify(ch).label == Regime::strong);
  const RegionBoundary b = region_boundary(ch, 21);
  REQUIRE(b.points.size() >= 2);
  for (std::size_t i = 1; i < b.points.size(); ++i) {
    CHECK(b.points[i].r1_nats > b.points[i - 1].r1_nats);
    CHECK(b.points[i].r2_nats < b.points[i - 1].r2_nats);
  }
  double apex = 0.0;
  for (const auto& pt : b.points)
    apex = std::max(apex, pt.r1_nats + pt.r2_nats);
  const RateResult c = sum_capacity(ch);
  CHECK(apex == Approx(c.sum_rate_nats).margin(1e-5));
  CHECK(c.sum_rate_nats == Approx(0.5 * std::log(5.0)).margin(1e-5));
}

TEST_CASE("water-filling helper solves the single-user problem exactly") {
  SECTION("identity channel spreads power evenly") {
    const double c = single_user_capacity(Mat::Identity(3, 3), 3.0);
    CHECK(c == Approx(1.5 * std::log(2.0)).margin(1e-12));
  }
  SECTION("graded diagonal channel fills the strong modes first") {
    Mat h = Vec::Zero(3).asDiagonal();
    h(0, 0) = 2.0;
    h(1, 1) = 1.0;
    h(2, 2) = 0.5;
    const SingleUserSolution s = waterfill_single(h, 1.0);
    // Water level (1 + 0.25 + 1)/2 = 1.125 over the two strongest modes.
    CHECK(s.capacity_nats ==
          Approx(0.5 * (std::log(4.5) + std::log(1.125))).margin(1e-12));
    CHECK(s.cov.trace() == Approx(1.0).margin(1e-12));
    ChannelPair ch;
    ch.h1 = h;
    ch.h2 = Mat::Zero(3, 3);
    ch.h3 = Mat::Zero(3, 3);
    ch.h4 = Mat::Identity(3, 3);
    ch.p1 = 1.0;
    ch.p2 = 1.0;
    const double direct =
        term_value(Term::single1, ch, {s.cov, SymMatrix::zero(3)});
    CHECK(direct == Approx(s.capacity_nats).margin(1e-12));
  }
}

TEST_CASE("parallel allocation honors symmetry and the scalar reduction") {
  SECTION("symmetric subchannels get the symmetric split") {
    const Vec ones = Vec::Constant(2, 1.0);
    const Vec cross = Vec::Constant(2, 0.3);
    const ChannelPair ch = build_parallel(ones, cross, cross, ones, 2.0, 2.0);
    const PgicResult r = pgic_allocate(ch);
    CHECK(r.p1_alloc(0) == Approx(1.0).margin(1e-6));
    CHECK(r.p1_alloc(1) == Approx(1.0).margin(1e-6));
    CHECK(r.p2_alloc(0) == Approx(1.0).margin(1e-6));
    CHECK(r.p2_alloc(1) == Approx(1.0).margin(1e-6));
    CHECK(r.kkt_residual <= 1e-6);
  }
  SECTION("a single subchannel takes the whole budget at weak interference") {
    const Vec one = Vec::Constant(1, 1.0);
    const Vec cross = Vec::Constant(1, 0.2);
    const ChannelPair ch = build_parallel(one, cross, cross, one, 1.5, 1.5);
    const PgicResult r = pgic_allocate(ch);
    CHECK(r.p1_alloc(0) == Approx(1.5).margin(1e-9));
    CHECK(r.p2_alloc(0) == Approx(1.5).margin(1e-9));
    const double expect =
        std::log(1.0 + 1.5 / (1.0 + 0.04 * 1.5));
    CHECK(r.sum_rate_nats == Approx(expect).margin(1e-9));
  }
  SECTION("non-parallel channels are rejected") {
    ChannelPair ch = interference_free(2, 1.0);
    ch.h2 = 0.1 * Mat::Ones(2, 2);
    ch.h3 = 0.1 * Mat::Ones(2, 2);
    CHECK_THROWS_AS(pgic_allocate(ch), NotParallel);
  }
}

TEST_CASE("parallel allocation matches the exhaustive grid oracle") {
  Vec g1(2), g2(2), g3(2), g4(2);
  g1 << 1.0, 1.0;
  g4 << 1.0, 1.0;
  g2 << 0.1, 0.2;
  g3 << 0.1, 0.2;
  const ChannelPair ch = build_parallel(g1, g2, g3, g4, 2.0, 2.0);
  const PgicResult r = pgic_allocate(ch);
  const auto sum_rate = [&](const Vec& p, const Vec& q) {
    double total = 0.0;
    for (Index i = 0; i < 2; ++i) {
      const double d1 = 1.0 + g2(i) * g2(i) * q(i);
      const double d2 = 1.0 + g3(i) * g3(i) * p(i);
      total += 0.5 * std::log(1.0 + g1(i) * g1(i) * p(i) / d1) +
               0.5 * std::log(1.0 + g4(i) * g4(i) * q(i) / d2);
    }
    return total;
  };
  Vec op, oq;
  const double oracle = oracles::pgic_grid_2sub(sum_rate, 2.0, 2.0, 40, &op, &oq);
  CHECK(r.sum_rate_nats == Approx(oracle).margin(1e-5));
  CHECK((r.p1_alloc - op).cwiseAbs().maxCoeff() <= 2e-3);
  CHECK((r.p2_alloc - oq).cwiseAbs().maxCoeff() <= 2e-3);
  CHECK(r.kkt_residual <= 1e-6);
  for (const bool ok : r.per_sub_conditions) CHECK(ok);
  CHECK(r.p1_alloc.sum() <= 2.0 + 1e-9);
  CHECK(r.p2_alloc.sum() <= 2.0 + 1e-9);
  CHECK(r.p1_alloc.minCoeff() >= 0.0);
  CHECK(r.p2_alloc.minCoeff() >= 0.0);
}

TEST_CASE(
    "parallel and matrix treat-as-noise paths agree on a separable channel") {
  Vec g1(2), g2(2), g3(2), g4(2);
  g1 << 1.0, 1.0;
  g4 << 1.0, 1.0;
  g2 << 0.1, 0.2;
  g3 << 0.1, 0.2;
  const ChannelPair ch = build_parallel(g1, g2, g3, g4, 2.0, 2.0);
  const PgicResult alloc = pgic_allocate(ch);
  REQUIRE(alloc.kkt_residual <= 1e-6);
  for (const bool ok : alloc.per_sub_conditions) REQUIRE(ok);
  const RateResult matrix_path = maximize_tan(ch);
  CHECK(matrix_path.sum_rate_nats ==
        Approx(alloc.sum_rate_nats).margin(1e-5));
}

TEST_CASE("interference sweep reproduces the qualitative capacity trends") {
  ChannelPair base = interference_free(2, 2.0);
  Mat lam(2, 2);
  lam << 0.6, 0.2, 0.2, 0.8;
  base.h2 = lam;
  base.h3 = lam;
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.025 * i);
  const auto rows = sweep_fig2(base, grid);
  REQUIRE(rows.size() == grid.size());
  // a = 0 is interference-free with the exact closed-form capacity.
  CHECK(rows[0].regime == Regime::noisy);
  REQUIRE(rows[0].c_nats.has_value());
  CHECK(*rows[0].c_nats == Approx(2.0 * std::log(2.0)).margin(1e-6));
  // Capacity never increases along consecutive noisy rows.
  int last_noisy = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].regime != Regime::noisy) continue;
    if (rows[i - 1].regime == Regime::noisy)
      CHECK(*rows[i].c_nats <= *rows[i - 1].c_nats + 1e-7);
    last_noisy = static_cast<int>(i);
  }
  // The noisy range ends inside the sweep.
  CHECK(last_noisy < static_cast<int>(rows.size()) - 1);
  CHECK(last_noisy >= 1);

  // Doubling the interfering links shrinks the noisy range and lowers the
  // capacity pointwise on the shared noisy rows.
  ChannelPair scaled = base;
  scaled.h2 = 2.0 * lam;
  scaled.h3 = 2.0 * lam;
  const auto rows2 = sweep_fig2(scaled, grid);
  int last_noisy2 = -1;
  for (std::size_t i = 0; i < rows2.size(); ++i)
    if (rows2[i].regime == Regime::noisy) last_noisy2 = static_cast<int>(i);
  REQUIRE(last_noisy2 >= 0);
  CHECK(last_noisy2 < last_noisy);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].regime == Regime::noisy && rows2[i].regime == Regime::noisy)
      CHECK(*rows2[i].c_nats <= *rows[i].c_nats + 1e-7);
  }
}
