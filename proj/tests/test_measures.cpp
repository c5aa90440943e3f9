#include <gtest/gtest.h>

#include "empot/error.hpp"
#include "empot/measures.hpp"
#include "empot/rho.hpp"
#include "test_util.hpp"

using namespace empot;

TEST(Measures, RejectsBadWeights) {
  EXPECT_THROW(DiscreteMeasure(1, {0.0, 1.0}, {0.5, -0.5}), Error);
  EXPECT_THROW(DiscreteMeasure(1, {0.0, 1.0}, {1.0}), Error);
}

TEST(Measures, EmpiricalIsUniform) {
  const auto mu = empirical_measure({{0.0, 1.0}, {2.0, 3.0}, {4.0, 5.0}, {6.0, 7.0}});
  ASSERT_EQ(mu.size(), 4u);
  EXPECT_EQ(mu.dim(), 2u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(mu.weight(i), 0.25);
  EXPECT_TRUE(mu.is_probability());
}

TEST(Measures, MergeDuplicatesSumsWeights) {
  const DiscreteMeasure mu(1, {0.0, 1.0, 0.0, 2.0}, {0.1, 0.2, 0.3, 0.4});
  const auto m = merge_duplicates(mu);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_DOUBLE_EQ(m.point(0)[0], 0.0);
  EXPECT_DOUBLE_EQ(m.weight(0), 0.4);
}

TEST(Measures, WithoutZeroAtomsKeepsIndices) {
  const DiscreteMeasure mu(1, {0.0, 1.0, 2.0}, {0.5, 0.0, 0.5});
  std::vector<std::size_t> kept;
  const auto m = mu.without_zero_atoms(&kept);
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(kept, (std::vector<std::size_t>{0, 2}));
}

TEST(Telescope, LayerBoundaries) {
  EXPECT_EQ(telescope_layer(0.0), 0);
  EXPECT_EQ(telescope_layer(1.0), 0);
  EXPECT_EQ(telescope_layer(std::nextafter(1.0, 2.0)), 1);
  EXPECT_EQ(telescope_layer(2.0), 1);
  EXPECT_EQ(telescope_layer(std::nextafter(2.0, 3.0)), 2);
  EXPECT_EQ(telescope_layer(4.0), 2);
  EXPECT_EQ(telescope_layer(1000.0), 10);
}

TEST(Telescope, SplitThenReassembleIsIdentity) {
  RandomStream rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = testgen::random_points(rng, 30, 3, -9.0, 9.0);
    const DiscreteMeasure mu(pts, testgen::random_weights(rng, 30));
    const auto layers = telescope_split(mu, RhoFunctional::euclidean());
    double mass = 0;
    for (double m : layers.layer_masses) mass += m;
    EXPECT_NEAR(mass, 1.0, 1e-12);
    std::vector<DiscreteMeasure> parts;
    for (int j = 0; j < layers.num_layers(); ++j) {
      const auto part = rescaled_layer(mu, layers, j);
      for (std::size_t i = 0; i < part.size(); ++i) {
        EXPECT_LE(norm(part.point(i)), 1.0 + 1e-15);
      }
      parts.push_back(part);
    }
    const auto back = reassemble(parts, layers);
    ASSERT_EQ(back.size(), mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
      EXPECT_NEAR(back.weight(i), mu.weight(i), 1e-15);
      for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(back.point(i)[k], mu.point(i)[k]);
    }
  }
}

TEST(Telescope, RescaledLayerHasUnitMass) {
  const DiscreteMeasure mu(1, {0.5, 1.5, 3.0, -3.5}, {0.4, 0.3, 0.2, 0.1});
  const auto layers = telescope_split(mu, RhoFunctional::euclidean());
  EXPECT_EQ(layers.num_layers(), 3);
  EXPECT_DOUBLE_EQ(layers.layer_masses[2], 0.3);
  const auto part = rescaled_layer(mu, layers, 2);
  ASSERT_EQ(part.size(), 2u);
  EXPECT_DOUBLE_EQ(part.point(0)[0], 0.75);
  EXPECT_DOUBLE_EQ(part.point(1)[0], -0.875);
  EXPECT_NEAR(part.weight(0), 2.0 / 3.0, 1e-15);
}

TEST(Rho, GaugeValues) {
  const std::vector<double> x{1.0, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(RhoFunctional::euclidean()(x), std::sqrt(3.0));
  // tau = 1, 1/2, 1/4
  EXPECT_DOUBLE_EQ(RhoFunctional::exponential(2.0)(x), std::sqrt(1.0 + 4.0 + 16.0));
  // tau = 1, 2^{-1}, 3^{-1}
  EXPECT_DOUBLE_EQ(RhoFunctional::poly(1.0)(x), std::sqrt(1.0 + 4.0 + 9.0));
}

TEST(Rho, DominatesEuclideanNorm) {
  RandomStream rng(5);
  for (const auto& rho : {RhoFunctional::poly(0.75), RhoFunctional::exponential(1.5)}) {
    for (int i = 0; i < 200; ++i) {
      const auto p = testgen::random_points(rng, 1, 12, -1.0, 1.0);
      EXPECT_GE(rho(p.point(0)), norm(p.point(0)) * (1 - 1e-15));
    }
  }
}

TEST(Rho, ParseRoundTrip) {
  for (const char* s : {"euclidean", "poly:b=1.5", "exp:gamma=2", "exp:gamma=3,dim=12"}) {
    const auto rho = RhoFunctional::parse(s);
    EXPECT_EQ(RhoFunctional::parse(rho.to_string()).to_string(), rho.to_string());
  }
  EXPECT_THROW(RhoFunctional::parse("poly:b=0.5"), Error);
  EXPECT_THROW(RhoFunctional::parse("exp:gamma=1"), Error);
  EXPECT_THROW(RhoFunctional::parse("sobolev"), Error);
}
