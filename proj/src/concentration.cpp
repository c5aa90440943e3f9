#include "empot/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "empot/error.hpp"
#include "empot/exact_ot.hpp"
#include "empot/rng.hpp"
#include "parallel.hpp"

namespace empot {

double bernstein_mcdiarmid_tail(double sigma2, double M, double t) {
  require(t >= 0.0, "t must be >= 0");
  require(sigma2 >= 0.0 && M >= 0.0, "Bernstein constants must be >= 0");
  if (t == 0.0) return 1.0;
  const double denom = 2.0 * sigma2 + 2.0 * t * M;
  if (denom == 0.0) return 0.0;
  return std::min(1.0, std::exp(-t * t / denom));
}

double bernstein_mcdiarmid_tail(const ConcentrationParams& params, double t) {
  return bernstein_mcdiarmid_tail(params.sigma2, params.M, t);
}

ConcentrationParams bounded_sum_bernstein(std::span<const double> variances, double b) {
  require(b >= 0.0, "bound must be >= 0");
  ConcentrationParams params;
  for (double v : variances) {
    require(v >= 0.0, "variances must be >= 0");
    params.sigma2 += v;
  }
  params.M = b / 3.0;
  params.n = static_cast<double>(variances.size());
  return params;
}

ConcentrationParams wasserstein_bernstein_params(double s, double V, double n, double p) {
  require(s >= 0.0 && V >= 0.0, "s and V must be >= 0");
  require(n >= 1.0 && p >= 1.0, "need n >= 1 and p >= 1");
  ConcentrationParams params;
  params.s = s;
  params.V = V;
  params.n = n;
  params.p = p;
  const double sigma_i = 2.0 * s * std::pow(n, -1.0 / p);
  params.sigma2 = n * sigma_i * sigma_i;
  params.M = 2.0 * V * std::pow(n, -1.0 / p);
  return params;
}

double wasserstein_mean_tail(const ConcentrationParams& params, double t) {
  require(t >= 0.0, "t must be >= 0");
  require(params.n >= 1.0 && params.p >= 1.0, "need n >= 1 and p >= 1");
  if (t == 0.0) return 1.0;
  const double n = params.n, p = params.p;
  const double denom = 8.0 * params.s * params.s * std::pow(n, 1.0 - 2.0 / p) +
                       4.0 * params.V * t * std::pow(n, -1.0 / p);
  if (denom == 0.0) return 0.0;
  return std::min(1.0, 2.0 * std::exp(-t * t / denom));
}

double lsi_mean_tail(double C_lsi, double n, double p, double t) {
  require(t >= 0.0, "t must be >= 0");
  require(C_lsi > 0.0, "log-Sobolev constant must be positive");
  require(n >= 1.0 && p >= 1.0, "need n >= 1 and p >= 1");
  return std::min(1.0, std::exp(-std::pow(n, 2.0 / std::max(2.0, p)) * t * t / (2.0 * C_lsi)));
}

double orlicz_norm(std::span<const double> samples, double alpha) {
  require(!samples.empty(), "Orlicz norm needs samples");
  require(alpha >= 1.0, "Orlicz index must be >= 1");
  double largest = 0.0;
  for (double z : samples) {
    require(std::isfinite(z), "samples must be finite");
    largest = std::max(largest, std::abs(z));
  }
  if (largest == 0.0) return 0.0;
  auto excess = [&](double c) {
    double sum = 0.0;
    for (double z : samples) sum += std::exp(std::pow(std::abs(z) / c, alpha));
    return sum / static_cast<double>(samples.size()) - 2.0;
  };
  double lo = largest / 1e3, hi = largest * 1e3;
  while (!(excess(lo) > 0.0)) lo /= 1e3;
  while (excess(hi) > 0.0) hi *= 1e3;
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

ConcentrationParams params_from_psi1(double psi1_norm, double n, double p) {
  require(psi1_norm >= 0.0, "psi_1 norm must be >= 0");
  return wasserstein_bernstein_params(std::sqrt(2.0) * psi1_norm, psi1_norm, n, p);
}

TailCurve mc_deviation_tail(const DistributionSpec& dist, std::size_t n, double p,
                            std::size_t reps, const std::vector<double>& t_grid,
                            std::uint64_t seed, std::size_t reference_size, unsigned threads) {
  require(reps >= 100, "deviation tail needs at least 100 replications");
  require(n >= 1 && reference_size >= 1, "sizes must be positive");
  const DiscreteMeasure reference =
      empirical_measure(dist.sample(reference_size, derive_seed(seed, {0x726566ULL})));

  TailCurve curve;
  curve.reference_size = reference_size;
  curve.distances.assign(reps, 0.0);
  parallel_for(reps, threads, [&](std::size_t r) {
    const DiscreteMeasure sample = empirical_measure(dist.sample(n, derive_seed(seed, {1, r})));
    curve.distances[r] = solve_wp(sample, reference, p).distance;
  });

  double sum = 0.0;
  for (double w : curve.distances) sum += w;
  curve.mean_distance = sum / static_cast<double>(reps);
  set_tail_grid(curve, t_grid);
  return curve;
}

void set_tail_grid(TailCurve& curve, const std::vector<double>& t_grid) {
  const double reps = static_cast<double>(curve.distances.size());
  curve.t = t_grid;
  curve.empirical_tail.clear();
  curve.mc_se.clear();
  for (double t : t_grid) {
    require(t >= 0.0, "t grid must be >= 0");
    std::size_t hits = 0;
    for (double w : curve.distances) hits += std::abs(w - curve.mean_distance) >= t ? 1 : 0;
    const double frac = static_cast<double>(hits) / reps;
    curve.empirical_tail.push_back(frac);
    curve.mc_se.push_back(std::sqrt(frac * (1.0 - frac) / reps));
  }
}

std::vector<double> deviation_grid(const std::vector<double>& distances, std::size_t points) {
  require(points >= 2, "grid needs at least two points");
  require(!distances.empty(), "grid needs observed distances");
  double mean = 0.0;
  for (double w : distances) mean += w;
  mean /= static_cast<double>(distances.size());
  double largest = 0.0;
  for (double w : distances) largest = std::max(largest, std::abs(w - mean));
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = largest * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  return grid;
}

}  // namespace empot
