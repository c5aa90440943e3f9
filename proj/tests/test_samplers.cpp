#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "empot/error.hpp"
#include "empot/samplers.hpp"
#include "test_util.hpp"

using namespace empot;

namespace {

double coord_variance(const PointCloud& pts, std::size_t k) {
  double s = 0, s2 = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    s += pts.point(i)[k];
    s2 += pts.point(i)[k] * pts.point(i)[k];
  }
  const double n = static_cast<double>(pts.size());
  return s2 / n - (s / n) * (s / n);
}

double zeta3_direct() {
  double s = 0;
  for (int m = 2000000; m >= 1; --m) s += 1.0 / (double(m) * m * m);
  return s + 1.0 / (2.0 * 2000000.5 * 2000000.5);
}

}  // namespace

TEST(KL, ZeroScaleGivesZeroPoints) {
  const auto pts = sample_kl(KLSpec::poly(1.0, 0.0, ScoreDistribution::gaussian, 5), 20, 1);
  for (double x : pts.coords()) EXPECT_EQ(x, 0.0);
}

TEST(KL, SingleCoordinateVariance) {
  const auto spec = KLSpec::poly(1.0, 2.0, ScoreDistribution::gaussian, 1);
  const auto pts = sample_kl(spec, 10000, 2);
  // Var of the sample variance of N(0, 4) is 2 * 16 / n.
  EXPECT_NEAR(coord_variance(pts, 0), 4.0, 3.0 * std::sqrt(32.0 / 10000));
}

TEST(KL, ExponentialVarianceRatio) {
  const auto spec = KLSpec::exponential(2.0, 1.0, ScoreDistribution::gaussian, 4);
  const auto pts = sample_kl(spec, 40000, 3);
  for (std::size_t m = 0; m + 1 < 4; ++m) {
    EXPECT_NEAR(coord_variance(pts, m) / coord_variance(pts, m + 1), 4.0, 0.15);
  }
}

TEST(KL, SigmaNonincreasingAndTruncationTolerance) {
  for (const auto& spec : {KLSpec::poly(1.0), KLSpec::poly(0.6), KLSpec::exponential(1.5)}) {
    for (std::size_t m = 1; m < 50; ++m) EXPECT_GE(spec.sigma(m), spec.sigma(m + 1));
    const std::size_t M = spec.dimension();
    EXPECT_LE(spec.tail_energy_fraction(M), kDefaultTailTolerance);
    EXPECT_GT(spec.tail_energy_fraction(M - 1), kDefaultTailTolerance);
  }
}

TEST(KL, TailEnergyMatchesDirectSum) {
  const auto spec = KLSpec::poly(1.0);
  double total = 0, tail = 0;
  for (int m = 1; m <= 2000000; ++m) {
    const double s2 = spec.sigma(m) * spec.sigma(m);
    total += s2;
    if (m > 10) tail += s2;
  }
  EXPECT_NEAR(spec.tail_energy_fraction(10), tail / total, 1e-9);
}

TEST(KL, Deterministic) {
  const auto spec = KLSpec::exponential(2.0, 1.0, ScoreDistribution::laplace);
  EXPECT_EQ(sample_kl(spec, 50, 9).coords(), sample_kl(spec, 50, 9).coords());
  EXPECT_NE(sample_kl(spec, 50, 9).coords(), sample_kl(spec, 50, 10).coords());
  // Sample i does not depend on how many samples are drawn.
  const auto a = sample_kl(spec, 10, 9), b = sample_kl(spec, 30, 9);
  for (std::size_t k = 0; k < a.coords().size(); ++k) EXPECT_EQ(a.coords()[k], b.coords()[k]);
}

TEST(KL, ParseRoundTrip) {
  for (const char* s : {"poly:b0=1.5", "exp:gamma0=2,c0=0.5,dim=8,scores=uniform", "poly:b0=2,scores=laplace"}) {
    EXPECT_EQ(KLSpec::parse(KLSpec::parse(s).to_string()).to_string(), KLSpec::parse(s).to_string());
  }
  EXPECT_THROW(KLSpec::parse("poly:gamma0=2"), Error);
  EXPECT_THROW(KLSpec::parse("exp:gamma0=1"), Error);
  EXPECT_THROW(KLSpec::parse("poly:b0=1,colour=red"), Error);
}

TEST(Scores, StandardizedAndMomentsMatch) {
  RandomStream rng(4);
  for (auto sd : {ScoreDistribution::gaussian, ScoreDistribution::uniform, ScoreDistribution::laplace}) {
    const int n = 200000;
    double s2 = 0, s3 = 0;
    for (int i = 0; i < n; ++i) {
      const double z = std::abs(draw_score(sd, rng));
      s2 += z * z;
      s3 += z * z * z;
    }
    EXPECT_NEAR(s2 / n, 1.0, 0.02);
    EXPECT_NEAR(std::cbrt(s3 / n), score_q_norm(sd, 3.0), 0.02);
    EXPECT_NEAR(score_q_norm(sd, 2.0), 1.0, 1e-12);
  }
  // E|Z|^4 = 3 for the standard normal.
  EXPECT_NEAR(score_q_norm(ScoreDistribution::gaussian, 4.0), std::pow(3.0, 0.25), 1e-12);
}

TEST(MomentBound, PolyAgainstPoly) {
  // (sigma_m / tau_m)^2 = m^{-5} m^{2} = m^{-3}
  const double bound = fpc_moment_bound(KLSpec::poly(2.0), RhoFunctional::poly(1.0), 2.0, 1.0);
  EXPECT_NEAR(bound, std::sqrt(zeta3_direct()), 1e-12);
  EXPECT_NEAR(fpc_moment_bound(KLSpec::poly(1.0), RhoFunctional::euclidean(), 2.0, 1.0),
              std::sqrt(zeta3_direct()), 1e-12);
}

TEST(MomentBound, ExpAgainstExp) {
  const double bound = fpc_moment_bound(KLSpec::exponential(4.0), RhoFunctional::exponential(2.0), 3.0, 1.7);
  EXPECT_NEAR(bound, std::sqrt(4.0 / 3.0) * 1.7, 1e-14);
}

TEST(MomentBound, ExpAgainstPolyIsSummed) {
  const auto spec = KLSpec::exponential(3.0);
  double s = 0;
  for (int m = 1; m < 200; ++m) s += std::pow(spec.sigma(m) * std::pow(m, 1.5), 2);
  EXPECT_NEAR(fpc_moment_bound(spec, RhoFunctional::poly(1.5), 2.0, 1.0), std::sqrt(s), 1e-12);
}

TEST(MomentBound, DivergentPairsAreDomainErrors) {
  const auto expect_domain = [](const KLSpec& spec, const RhoFunctional& rho) {
    try {
      fpc_moment_bound(spec, rho, 2.0, 1.0);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::domain);
    }
  };
  expect_domain(KLSpec::poly(1.0), RhoFunctional::poly(1.0));
  expect_domain(KLSpec::poly(1.0), RhoFunctional::poly(1.5));
  expect_domain(KLSpec::exponential(2.0), RhoFunctional::exponential(2.0));
  expect_domain(KLSpec::poly(3.0), RhoFunctional::exponential(1.1));
  EXPECT_THROW(fpc_moment_bound(KLSpec::poly(2.0), RhoFunctional::poly(1.0), 1.5, 1.0), Error);
}

TEST(MomentBound, EmpiricalMomentBelowBound) {
  struct Case {
    KLSpec spec;
    RhoFunctional rho;
  };
  const std::vector<Case> cases{{KLSpec::poly(2.0), RhoFunctional::poly(1.0)},
                                {KLSpec::exponential(4.0), RhoFunctional::exponential(2.0)},
                                {KLSpec::exponential(3.0, 1.0, ScoreDistribution::laplace), RhoFunctional::poly(1.0)}};
  for (const auto& c : cases) {
    const double q = 3.0;
    const auto pts = sample_kl(c.spec, 10000, 5);
    const double bound = fpc_moment_bound(c.spec, c.rho, q, score_q_norm(c.spec.scores, q));
    EXPECT_LE(estimate_moment(pts, c.rho, q).M_q_empirical, 1.5 * bound);
  }
}

TEST(MomentBound, TruncationChangesMomentOnlySlightly) {
  const auto rho = RhoFunctional::poly(1.0);
  const auto coarse = KLSpec::poly(2.0, 1.0, ScoreDistribution::gaussian, 20);
  const auto fine = KLSpec::poly(2.0, 1.0, ScoreDistribution::gaussian, 40);
  const double a = estimate_moment(sample_kl(coarse, 10000, 6), rho, 2.0).M_q_empirical;
  const double b = estimate_moment(sample_kl(fine, 10000, 6), rho, 2.0).M_q_empirical;
  // The extra coordinates carry sum_{20<m<=40} m^{-3} of E rho^2.
  double extra = 0;
  for (int m = 21; m <= 40; ++m) extra += std::pow(m, -3.0);
  EXPECT_NEAR(b * b - a * a, extra, 3e-3);
}

TEST(Moment, Examples) {
  EXPECT_EQ(estimate_moment(PointCloud(2, {0.0, 0.0}), RhoFunctional::euclidean(), 2.0).M_q_empirical, 0.0);
  const PointCloud unit(2, {1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, -1.0});
  for (double q : {1.0, 2.5, 7.0}) {
    EXPECT_NEAR(estimate_moment(unit, RhoFunctional::euclidean(), q).M_q_empirical, 1.0, 1e-15);
  }
  // chi_4: E R^3 = 2^{3/2} Gamma(7/2) / Gamma(2)
  const double analytic = std::cbrt(std::pow(2.0, 1.5) * std::tgamma(3.5));
  const auto pts = DistributionSpec::parse("gaussian:d=4").sample(10000, 7);
  EXPECT_NEAR(estimate_moment(pts, RhoFunctional::euclidean(), 3.0).M_q_empirical, analytic, 0.05 * analytic);
}

TEST(HeavyTail, MomentsAndDirections) {
  const auto pts = sample_heavy_tail(3, 2.0, 200000, 8, 10.0);
  double mean[3] = {0, 0, 0}, m2 = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto x = pts.point(i);
    const double r = norm(x);
    EXPECT_GE(r, 1.0 - 1e-12);
    for (int k = 0; k < 3; ++k) mean[k] += x[k] / r;
    m2 += r * r;
  }
  for (double m : mean) EXPECT_NEAR(m / pts.size(), 0.0, 0.01);
  // Pareto(1, 10): E R^2 = 10 / 8
  EXPECT_NEAR(m2 / pts.size(), 1.25, 0.02);
}

TEST(HeavyTail, OneDimensionalIsSymmetric) {
  const auto pts = sample_heavy_tail(1, 3.0, 100000, 9);
  std::size_t positive = 0;
  for (double x : pts.coords()) {
    positive += x > 0;
    EXPECT_GE(std::abs(x), 1.0 - 1e-12);
  }
  EXPECT_NEAR(positive / 100000.0, 0.5, 0.01);
  EXPECT_THROW(sample_heavy_tail(1, 3.0, 10, 1, 2.0), Error);
}

TEST(Distribution, ParseAndSample) {
  const auto u = DistributionSpec::parse("uniform:d=3");
  const auto pts = u.sample(1000, 1);
  EXPECT_EQ(pts.dim(), 3u);
  for (double x : pts.coords()) {
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
  EXPECT_EQ(DistributionSpec::parse("heavy:d=2,q=3").tail_index, 3.25);
  EXPECT_EQ(DistributionSpec::parse("exp:gamma0=2,dim=6").dimension(), 6u);
  for (const char* s : {"uniform:d=3", "gaussian:d=2", "heavy:d=2,q=3,index=4", "poly:b0=1"}) {
    EXPECT_EQ(DistributionSpec::parse(DistributionSpec::parse(s).to_string()).to_string(),
              DistributionSpec::parse(s).to_string());
  }
  EXPECT_THROW(DistributionSpec::parse("cauchy:d=1"), Error);
  EXPECT_THROW(DistributionSpec::parse("uniform"), Error);
}
