#include "empot/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "empot/error.hpp"
#include "empot/rng.hpp"

namespace empot {

PointCloud greedy_cover(const PointCloud& points, double eps) {
  require(eps > 0.0, "cover radius must be positive");
  PointCloud centers(std::max<std::size_t>(points.dim(), 1), {});
  const std::size_t n = points.size();
  if (n == 0) return centers;
  const double eps2 = eps * eps;
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t next = 0;
  while (true) {
    centers.push_back(points.point(next));
    auto c = points.point(next);
    double far = -1.0;
    std::size_t far_index = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d2 = squared_distance(points.point(i), c);
      if (d2 < nearest[i]) nearest[i] = d2;
      if (nearest[i] > far) {
        far = nearest[i];
        far_index = i;
      }
    }
    if (far <= eps2) break;
    next = far_index;
  }
  return centers;
}

PointCloud GreedyCoverOracle::cover(const PointCloud& points, double eps) const {
  return greedy_cover(points, eps);
}

PointCloud GridCoverOracle::cover(const PointCloud& points, double eps) const {
  require(eps > 0.0, "cover radius must be positive");
  const std::size_t dim = std::max<std::size_t>(points.dim(), 1);
  PointCloud centers(dim, {});
  // The half-diagonal of a cube of side 2 eps / sqrt(D) is eps; shrink it by
  // a few ulps so rounding in the center arithmetic cannot push a corner out.
  const double side = 2.0 * eps / std::sqrt(static_cast<double>(dim)) * (1.0 - 1e-12);
  std::map<std::vector<long long>, bool> seen;
  std::vector<long long> key(dim);
  std::vector<double> center(dim);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto x = points.point(i);
    for (std::size_t k = 0; k < dim; ++k) key[k] = static_cast<long long>(std::floor(x[k] / side));
    if (!seen.emplace(key, true).second) continue;
    for (std::size_t k = 0; k < dim; ++k) center[k] = (static_cast<double>(key[k]) + 0.5) * side;
    centers.push_back(center);
  }
  return centers;
}

std::unique_ptr<CoveringOracle> make_covering_oracle(const std::string& name) {
  if (name == "greedy") return std::make_unique<GreedyCoverOracle>();
  if (name == "grid") return std::make_unique<GridCoverOracle>();
  fail(ErrorCode::invalid_argument, "unknown covering oracle '" + name + "'");
}

double level_radius(int ell) {
  require(ell >= 0, "partition level must be >= 0");
  return std::pow(3.0, -(ell + 1));
}

// ---------------------------------------------------------------------------

namespace {

double poly_cb_asymptotic(double b) { return b * std::pow(3.0, 1.0 / b) / std::numbers::ln2; }

}  // namespace

double poly_cb(double b) {
  require(b > 0.5, "poly ellipsoid needs b > 1/2");
  return kPolyCbCalibrated / poly_cb_asymptotic(1.0) * poly_cb_asymptotic(b);
}

ExpEntropyConstants exp_entropy_constants(double gamma) {
  require(std::isfinite(gamma) && gamma > 1.0, "exp ellipsoid needs gamma > 1");
  // Upper bound at theta = 1/3 with g = log gamma, L = log(1/eps),
  // u = L / g, k = log(3 / theta) = log 9 and a = log_gamma(1/sqrt(1-theta)):
  //
  //   log N_eps(B_2) <= (g/2) ceil(u) (2u - ceil(u) + 1) + ceil(u + a) k
  //                  <= (g/2)(u + 1)^2 + k (u + a + 1)
  //                   = (L + g + k)^2 / (2g) + k a - k^2 / (2g).
  //
  // B_0 sits in B_2 x B_3 and B_3 fits in one ball of radius sqrt(1-theta)
  // eps, so N_{sqrt(2-theta) eps}(B_0) <= N_eps(B_2). Taking
  // eps = 3^{-(l+1)} / sqrt(5/3) gives L = (l+1) log 3 + log(5/3) / 2 and
  //
  //   log bar_N(l) <= c_gamma (l + c_1)^2 + log c_0,
  //   c_gamma = (log 3)^2 / (2g),
  //   c_1     = 1 + (log(5/3)/2 + g + k) / log 3,
  //   log c_0 = k (log(3/2)/2 - k/2) / g = -(log 9)(log 6) / (2g).
  const double g = std::log(gamma);
  const double k = std::log(9.0);
  ExpEntropyConstants c{};
  c.c_gamma = std::log(3.0) * std::log(3.0) / (2.0 * g);
  c.c1 = 1.0 + (0.5 * std::log(5.0 / 3.0) + g + k) / std::log(3.0);
  c.log_c0 = k * (0.5 * std::log(1.5) - 0.5 * k) / g;
  return c;
}

double log_bar_N(const RhoFunctional& rho, int ell, std::size_t d, const BarNOptions& options) {
  require(ell >= 0, "partition level must be >= 0");
  double value = 0.0;
  switch (rho.kind()) {
    case RhoFunctional::Kind::euclidean:
      require(d >= 1, "Euclidean bar_N needs the dimension d");
      require(options.euclidean_c > 0.0, "Euclidean bar_N exponent c must be positive");
      value = (ell + options.euclidean_c) * static_cast<double>(d) * std::log(3.0);
      break;
    case RhoFunctional::Kind::poly: {
      const double b = rho.parameter();
      value = std::numbers::ln2 * poly_cb(b) * std::pow(3.0, ell / b);
      break;
    }
    case RhoFunctional::Kind::exp: {
      const ExpEntropyConstants c = exp_entropy_constants(rho.parameter());
      value = c.c_gamma * (ell + c.c1) * (ell + c.c1) + c.log_c0;
      break;
    }
  }
  return std::max(value, 0.0);
}

double bar_N(const RhoFunctional& rho, int ell, std::size_t d, const BarNOptions& options) {
  return std::exp(log_bar_N(rho, ell, d, options));
}

double ellipsoid_entropy_lower(double gamma, double eps) {
  require(std::isfinite(gamma) && gamma > 1.0, "exp ellipsoid needs gamma > 1");
  require(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
  const double l = std::log(1.0 / eps);
  return l * l / (2.0 * std::log(gamma));
}

double ellipsoid_entropy_upper(double gamma, double eps) {
  require(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
  const ExpEntropyConstants c = exp_entropy_constants(gamma);
  const double g = std::log(gamma);
  const double l = std::log(std::sqrt(5.0 / 3.0) / eps);
  const double shifted = l + g + std::log(9.0);
  return std::max(0.0, shifted * shifted / (2.0 * g) + c.log_c0);
}

double projection_entropy_lower(const RhoFunctional& rho, double eps, std::size_t euclidean_dim) {
  require(eps > 0.0, "eps must be positive");
  if (rho.kind() == RhoFunctional::Kind::euclidean) {
    require(euclidean_dim >= 1, "Euclidean entropy needs the dimension");
    return eps >= 1.0 ? 0.0 : static_cast<double>(euclidean_dim) * std::log(1.0 / eps);
  }
  double total = 0.0;
  const std::size_t cap = rho.truncation_dim();
  for (std::size_t m = 1; cap == 0 || m <= cap; ++m) {
    const double t = rho.tau(m);
    if (t <= eps) break;
    total += std::log(t / eps);
  }
  return total;
}

// ---------------------------------------------------------------------------

std::size_t packing_dim(const RhoFunctional& rho, double eps, std::size_t euclidean_dim) {
  require(eps > 0.0, "eps must be positive");
  if (rho.kind() == RhoFunctional::Kind::euclidean) {
    require(euclidean_dim >= 1, "Euclidean packing needs the dimension");
    return euclidean_dim;
  }
  std::size_t dim = 1;
  while (rho.tau(dim + 1) >= eps / 4.0) ++dim;
  if (rho.truncation_dim() != 0) dim = std::min(dim, rho.truncation_dim());
  return dim;
}

void sample_base_set(const RhoFunctional& rho, std::size_t dim, RandomStream& rng,
                     std::span<double> out) {
  require(out.size() == dim && dim >= 1, "output buffer has the wrong size");
  double sq = 0.0;
  do {
    sq = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      out[k] = rng.normal();
      sq += out[k] * out[k];
    }
  } while (sq == 0.0);
  const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(dim)) / std::sqrt(sq);
  for (std::size_t k = 0; k < dim; ++k) out[k] *= radius * rho.tau(k + 1);
}

namespace {

bool far_from_all(const std::vector<double>& kept, std::size_t dim, std::span<const double> x,
                  double eps2) {
  const std::size_t count = kept.size() / dim;
  for (std::size_t i = 0; i < count; ++i) {
    if (squared_distance({kept.data() + i * dim, dim}, x) < eps2) return false;
  }
  return true;
}

}  // namespace

PackingResult greedy_packing(const PointCloud& candidates, double eps, std::size_t target) {
  require(eps > 0.0, "packing separation must be positive");
  const std::size_t dim = std::max<std::size_t>(candidates.dim(), 1);
  std::vector<double> kept;
  PackingResult result;
  for (std::size_t i = 0; i < candidates.size() && kept.size() / dim < target; ++i) {
    ++result.draws;
    auto x = candidates.point(i);
    if (far_from_all(kept, dim, x, eps * eps)) kept.insert(kept.end(), x.begin(), x.end());
  }
  result.target_reached = kept.size() / dim >= target;
  result.points = PointCloud(dim, std::move(kept));
  return result;
}

PackingResult greedy_packing(const RhoFunctional& rho, double eps, std::size_t target,
                             std::uint64_t seed, std::size_t budget, std::size_t euclidean_dim) {
  require(eps > 0.0, "packing separation must be positive");
  const std::size_t dim = packing_dim(rho, eps, euclidean_dim);
  RandomStream rng(seed, {0x7061636BULL});
  std::vector<double> kept;
  std::vector<double> x(dim);
  PackingResult result;
  while (kept.size() / dim < target && result.draws < budget) {
    ++result.draws;
    sample_base_set(rho, dim, rng, x);
    if (far_from_all(kept, dim, x, eps * eps)) kept.insert(kept.end(), x.begin(), x.end());
  }
  result.target_reached = kept.size() / dim >= target;
  result.points = PointCloud(dim, std::move(kept));
  return result;
}

double calibrate_poly_cb(double b, std::size_t samples, std::uint64_t seed) {
  const RhoFunctional rho = RhoFunctional::poly(b);
  double cb = 0.0;
  for (int ell = 0; ell <= 1; ++ell) {
    const double eps = level_radius(ell);
    const std::size_t dim = packing_dim(rho, eps);
    RandomStream rng(seed, {static_cast<std::uint64_t>(ell)});
    std::vector<double> coords(samples * dim);
    for (std::size_t i = 0; i < samples; ++i) {
      sample_base_set(rho, dim, rng, {coords.data() + i * dim, dim});
    }
    const PointCloud centers = greedy_cover(PointCloud(dim, std::move(coords)), eps);
    const double count = static_cast<double>(centers.size());
    cb = std::max(cb, std::log2(count) / std::pow(3.0, ell / b));
  }
  return cb;
}

}  // namespace empot
