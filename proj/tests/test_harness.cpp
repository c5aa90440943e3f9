#include <gtest/gtest.h>

#include <cmath>

#include "empot/error.hpp"
#include "empot/harness.hpp"
#include "empot/rng.hpp"

using namespace empot;

namespace {

RateExperimentConfig small_rate_config() {
  RateExperimentConfig cfg;
  cfg.distribution = DistributionSpec::parse("uniform:d=2");
  cfg.n_grid = {16, 32, 64};
  cfg.reps = 20;
  cfg.seed = 99;
  cfg.mode = EstimatorMode::two_sample;
  return cfg;
}

}  // namespace

TEST(ReferenceRate, ZetaTable) {
  EXPECT_EQ(zeta_exponent(1, 3, 4), 0.0);
  EXPECT_DOUBLE_EQ(euclidean_rate_exponent(1, 3, 4), 0.25);
  EXPECT_EQ(zeta_exponent(1, 2, 2), 2.0);
  // d != 2p and q = dp/(d-p) ^ 2p
  EXPECT_EQ(zeta_exponent(1, 1.5, 3), 1.0);
  EXPECT_EQ(zeta_exponent(1, 4.0 / 3.0, 4), 1.0);
  EXPECT_EQ(zeta_exponent(1, 2, 4), 0.0);
  // q > d = 2p
  EXPECT_EQ(zeta_exponent(1, 3, 2), 1.0);
  EXPECT_EQ(zeta_exponent(1.5, 3.5, 3), 1.0);
  // d <= p: dp/(d-p) is infinite, so only q = 2p is a boundary.
  EXPECT_EQ(zeta_exponent(1, 2, 1), 1.0);
  EXPECT_EQ(zeta_exponent(1, 5, 1), 0.0);
  EXPECT_EQ(zeta_exponent(2, 5, 10), 0.0);
  EXPECT_DOUBLE_EQ(euclidean_rate_exponent(1, 1.5, 10), 0.1);
  EXPECT_DOUBLE_EQ(euclidean_rate_exponent(2, 2.5, 10), 0.1);
  EXPECT_DOUBLE_EQ(euclidean_rate_exponent(1, INFINITY, 1), 0.5);
}

TEST(ReferenceRate, PowerLawRatioAndErrors) {
  const double n = 1000;
  EXPECT_NEAR(euclidean_reference_rate(1, 3, 4, n * std::exp(1.0)) / euclidean_reference_rate(1, 3, 4, n),
              std::exp(-0.25), 1e-14);
  EXPECT_NEAR(euclidean_reference_rate(1, 2, 2, n), std::pow(n, -0.5) * std::pow(std::log(n), 2.0), 1e-15);
  EXPECT_NEAR(euclidean_reference_rate(1, 3, 4, n, 2.5), 2.5 * std::pow(n, -0.25), 1e-15);
  try {
    euclidean_reference_rate(2, 2, 4, n);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::domain);
  }
  EXPECT_THROW(euclidean_reference_rate(1, 3, 4, 1), Error);
}

TEST(Fit, ExactDataIsRecovered) {
  std::vector<double> x{1, 2, 3, 4, 5}, y, w{1, 2, 1, 3, 1};
  for (double v : x) y.push_back(0.7 - 0.3 * v);
  const auto fit = weighted_linear_fit(x, y, w);
  EXPECT_NEAR(fit.intercept, 0.7, 1e-14);
  EXPECT_NEAR(fit.slope, -0.3, 1e-14);
  EXPECT_NEAR(fit.chi2, 0.0, 1e-25);
  EXPECT_EQ(fit.dof, 3u);
  EXPECT_THROW(weighted_linear_fit({1, 1}, {0, 1}, {1, 1}), Error);
}

// Synthetic cells drawn from each model with known noise: the slope lands
// within 2 standard errors about 95% of the time.
TEST(Fit, SelfTestRecoversEachModel) {
  RandomStream rng(3);
  const std::vector<std::size_t> ns{128, 256, 512, 1024, 2048, 4096};
  for (RateModel model : {RateModel::power, RateModel::polylog, RateModel::subpoly}) {
    const double a = 0.4, k = model == RateModel::power ? -0.25 : -1.2;
    int inside = 0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t) {
      std::vector<RateCell> cells;
      for (std::size_t n : ns) {
        RateCell c;
        c.n = n;
        c.reps_done = 50;
        const double truth = std::exp(a + k * model_abscissa(model, static_cast<double>(n)));
        c.se = 0.01 * truth;
        c.mean = truth * std::exp(0.01 * rng.normal());
        cells.push_back(c);
      }
      const auto fit = fit_rate(cells, model).fit;
      inside += std::abs(fit.slope - k) <= 2 * fit.slope_se && std::abs(fit.intercept - a) <= 2 * fit.intercept_se;
    }
    EXPECT_GE(inside, static_cast<int>(0.88 * trials)) << to_string(model);
  }
}

TEST(Fit, TimedOutCellsAreExcluded) {
  std::vector<RateCell> cells(3);
  const double ns[3] = {100, 200, 400};
  for (int i = 0; i < 3; ++i) {
    cells[i].n = static_cast<std::size_t>(ns[i]);
    cells[i].reps_done = 20;
    cells[i].mean = std::pow(ns[i], -0.5);
    cells[i].se = 0.01 * cells[i].mean;
  }
  cells[2].mean = 1.0;
  cells[2].timed_out = true;
  EXPECT_NEAR(fit_rate(cells, RateModel::power).fit.slope, -0.5, 1e-12);
  cells[1].timed_out = true;
  EXPECT_THROW(fit_rate(cells, RateModel::power), Error);
}

TEST(RateExperiment, DeterministicAcrossThreads) {
  auto cfg = small_rate_config();
  const auto a = run_rate_experiment(cfg);
  cfg.threads = 3;
  const auto b = run_rate_experiment(cfg);
  ASSERT_EQ(a.cells.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.cells[i].distances, b.cells[i].distances);
    EXPECT_EQ(a.cells[i].reps_done, 20u);
  }
  EXPECT_EQ(a.fit.slope, b.fit.slope);
  EXPECT_LT(a.fit.slope, 0.0);
  EXPECT_DOUBLE_EQ(a.reference_slope, -0.5);
}

TEST(RateExperiment, ReferenceModeUsesLargerDraws) {
  auto cfg = small_rate_config();
  cfg.mode = EstimatorMode::reference;
  cfg.reference_factor = 4;
  const auto r = run_rate_experiment(cfg);
  const auto t = run_rate_experiment(small_rate_config());
  // One-sample distances sit below two-sample ones on average.
  EXPECT_LT(r.cells[0].mean, t.cells[0].mean);
}

TEST(RateExperiment, CertificatesHold) {
  auto cfg = small_rate_config();
  cfg.certificate_check = true;
  cfg.certificate_max_n = 32;
  const auto r = run_rate_experiment(cfg);
  EXPECT_EQ(r.cells[0].certificate_checks, 20u);
  EXPECT_EQ(r.cells[1].certificate_checks, 20u);
  EXPECT_EQ(r.cells[2].certificate_checks, 0u);
  for (const auto& c : r.cells) EXPECT_EQ(c.certificate_violations, 0u);
}

TEST(RateExperiment, TimeLimitMarksCells) {
  auto cfg = small_rate_config();
  cfg.cell_time_limit = 1e-12;
  try {
    run_rate_experiment(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::budget_exhausted);
  }
}

TEST(RateExperiment, ConfigValidation) {
  auto cfg = small_rate_config();
  cfg.n_grid = {32, 16};
  EXPECT_THROW(cfg.validate(), Error);
  cfg.n_grid = {16};
  EXPECT_THROW(cfg.validate(), Error);
  cfg = small_rate_config();
  cfg.reps = 19;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(RateExperiment, ReferenceSlopes) {
  EXPECT_DOUBLE_EQ(reference_slope(DistributionSpec::parse("gaussian:d=6"), 1, RateModel::power), -1.0 / 6);
  EXPECT_DOUBLE_EQ(reference_slope(DistributionSpec::parse("heavy:d=2,q=1.5"), 1, RateModel::power), -1.0 / 3);
  EXPECT_DOUBLE_EQ(reference_slope(DistributionSpec::parse("poly:b0=1"), 1, RateModel::polylog), -1.0);
  EXPECT_NEAR(reference_slope(DistributionSpec::parse("exp:gamma0=2"), 1, RateModel::subpoly),
              -std::sqrt(2 * std::log(2.0)), 1e-15);
  EXPECT_TRUE(std::isnan(reference_slope(DistributionSpec::parse("poly:b0=1"), 1, RateModel::power)));
}

TEST(LowerBound, SinglePoint) {
  LowerBoundConfig cfg;
  cfg.n = 1;
  cfg.reps = 5;
  const auto r = run_lower_bound_experiment(cfg);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(r.kappa[i], 0.0);
    EXPECT_EQ(r.wp[i], 0.0);
  }
  EXPECT_EQ(r.violations, 0u);
}

TEST(LowerBound, InequalityHoldsForBothOrders) {
  for (double p : {1.0, 2.0}) {
    LowerBoundConfig cfg;
    cfg.n = 60;
    cfg.reps = 30;
    cfg.p = p;
    cfg.seed = 5;
    const auto r = run_lower_bound_experiment(cfg);
    EXPECT_EQ(r.violations, 0u);
    EXPECT_GE(r.min_ratio, 1.0 - 1e-9);
    EXPECT_EQ(r.packing_size, 60u);
    EXPECT_NEAR(r.mean_kappa, std::pow(1 - 1.0 / 60, 60), 0.05);
  }
}

TEST(LowerBound, DefaultSeparation) {
  EXPECT_NEAR(default_lower_bound_eps(RhoFunctional::exponential(2.0), 64),
              std::exp(-std::sqrt(2 * std::log(2.0) * std::log(64.0))), 1e-15);
  EXPECT_NEAR(default_lower_bound_eps(RhoFunctional::poly(2.0), 100), std::pow(std::log(100.0), -2.0), 1e-15);
  EXPECT_NEAR(default_lower_bound_eps(RhoFunctional::euclidean(), 64, 3), 0.25, 1e-15);
}

TEST(LowerBound, PackingShortfallIsAnError) {
  LowerBoundConfig cfg;
  cfg.rho = RhoFunctional::euclidean();
  cfg.euclidean_dim = 1;
  cfg.n = 10;
  cfg.eps_n = 0.5;
  cfg.packing_budget = 2000;
  try {
    run_lower_bound_experiment(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::budget_exhausted);
  }
}

TEST(ConcentrationExperiment, SmallRun) {
  ConcentrationConfig cfg;
  cfg.distribution = DistributionSpec::parse("gaussian:d=2");
  cfg.n = 16;
  cfg.reps = 100;
  cfg.grid_points = 8;
  cfg.reference_size = 128;
  cfg.orlicz_samples = 5000;
  const auto r = run_concentration_experiment(cfg);
  ASSERT_EQ(r.curve.t.size(), 8u);
  ASSERT_EQ(r.bernstein_bound.size(), 8u);
  EXPECT_GT(r.psi1_norm, 0.0);
  for (std::size_t k = 1; k < 8; ++k) {
    EXPECT_LE(r.bernstein_bound[k], r.bernstein_bound[k - 1]);
    EXPECT_LE(r.lsi_bound[k], r.lsi_bound[k - 1]);
  }
  EXPECT_EQ(r.violations, 0u);
}
