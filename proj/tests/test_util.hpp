#pragma once

#include <cmath>
#include <vector>

#include "empot/measures.hpp"
#include "empot/rng.hpp"

namespace empot::testgen {

inline PointCloud random_points(RandomStream& rng, std::size_t n, std::size_t d, double lo = 0.0,
                                double hi = 1.0) {
  std::vector<double> c(n * d);
  for (double& x : c) x = lo + (hi - lo) * rng.uniform();
  return PointCloud(d, std::move(c));
}

inline std::vector<double> random_weights(RandomStream& rng, std::size_t n) {
  std::vector<double> w(n);
  double s = 0;
  for (double& x : w) s += (x = 0.05 + rng.uniform());
  for (double& x : w) x /= s;
  return w;
}

inline DiscreteMeasure uniform_on(PointCloud pts) {
  const std::size_t n = pts.size();
  return DiscreteMeasure(std::move(pts), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

inline DiscreteMeasure random_measure(RandomStream& rng, std::size_t n, std::size_t d,
                                      bool equal_weights = false) {
  PointCloud pts = random_points(rng, n, d);
  if (equal_weights) return uniform_on(std::move(pts));
  return DiscreteMeasure(std::move(pts), random_weights(rng, n));
}

/// Points on a small integer lattice, so many coincide across measures.
inline DiscreteMeasure lattice_measure(RandomStream& rng, std::size_t n, std::size_t d, int side) {
  std::vector<double> c(n * d);
  for (double& x : c) x = static_cast<double>(rng.below(static_cast<std::uint64_t>(side))) / side;
  return DiscreteMeasure(PointCloud(d, std::move(c)), random_weights(rng, n));
}

/// Same weights, points multiplied by `factor`.
inline DiscreteMeasure scaled_points(const DiscreteMeasure& mu, double factor) {
  std::vector<double> c = mu.points().coords();
  for (double& x : c) x *= factor;
  return DiscreteMeasure(PointCloud(mu.dim(), std::move(c)), mu.weights());
}

}  // namespace empot::testgen
