#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>

#include "empot/measures.hpp"
#include "empot/rho.hpp"

namespace empot {

class RandomStream;

// ---------------------------------------------------------------------------
// Covering oracles for finite point sets. A cover is a list of centers such
// that every input point lies within eps of at least one of them; the order of
// the centers matters because cells are assigned first-center-wins.

class CoveringOracle {
public:
  virtual ~CoveringOracle() = default;
  virtual PointCloud cover(const PointCloud& points, double eps) const = 0;
  virtual std::string name() const = 0;
};

/// Farthest-point traversal: starts at the first point and keeps adding the
/// point farthest from the current centers until that distance is <= eps.
/// Centers are input points.
class GreedyCoverOracle final : public CoveringOracle {
public:
  PointCloud cover(const PointCloud& points, double eps) const override;
  std::string name() const override { return "greedy"; }
};

/// Axis-aligned grid of side 2 eps / sqrt(D); one center per occupied grid
/// cell, ordered by first occurrence in the input.
class GridCoverOracle final : public CoveringOracle {
public:
  PointCloud cover(const PointCloud& points, double eps) const override;
  std::string name() const override { return "grid"; }
};

std::unique_ptr<CoveringOracle> make_covering_oracle(const std::string& name);

PointCloud greedy_cover(const PointCloud& points, double eps);

/// Radius 3^{-(l+1)} of the covers that generate partition level l.
double level_radius(int ell);

// ---------------------------------------------------------------------------
// Cell-count bounds bar_N(l) = N_{3^{-(l+1)}}(B_0).

struct BarNOptions {
  /// Exponent c in the Euclidean ball bound 3^{(l + c) d}.
  double euclidean_c = 1.5;
};

/// Natural log of bar_N(l). `d` is the dimension for the Euclidean kind and
/// ignored otherwise.
double log_bar_N(const RhoFunctional& rho, int ell, std::size_t d = 0,
                 const BarNOptions& options = {});
/// exp(log_bar_N); may be +inf for large l.
double bar_N(const RhoFunctional& rho, int ell, std::size_t d = 0,
             const BarNOptions& options = {});

/// Constant c_b in log2 bar_N(l) = c_b 3^{l/b} for the polynomial ellipsoid.
/// The b = 1 value comes from greedy covers of the truncated ellipsoid (see
/// calibrate_poly_cb); other b reuse the b = 1 calibration ratio against the
/// asymptotic value b 3^{1/b} / ln 2.
double poly_cb(double b);

/// Frozen output of calibrate_poly_cb(1, 20000, 1) used by poly_cb. Sample
/// covers undercount, so the value creeps up with more samples (4.52 at 50000).
inline constexpr double kPolyCbCalibrated = 4.392317423;

/// Re-runs the calibration: greedy-covers `samples` uniform draws from the
/// truncated b-ellipsoid at radius 3^{-(l+1)}, l = 0, 1, and returns
/// max_l log2(count_l) / 3^{l/b}.
double calibrate_poly_cb(double b, std::size_t samples, std::uint64_t seed);

/// Exp constants: log bar_N(l) <= c_gamma (l + c_1)^2 + log c_0.
struct ExpEntropyConstants {
  double c_gamma;
  double c1;
  double log_c0;
};
ExpEntropyConstants exp_entropy_constants(double gamma);

/// Lower bound [log(1/eps)]^2 / (2 log gamma) on log N_eps of the exp
/// ellipsoid.
double ellipsoid_entropy_lower(double gamma, double eps);

/// log N_eps upper bound for the exp ellipsoid at an arbitrary eps in (0,1)
/// from the same derivation as exp_entropy_constants.
double ellipsoid_entropy_upper(double gamma, double eps);

/// Volume lower bound sum_{m : tau_m > eps} log(tau_m / eps) from projecting
/// the base set onto the coordinates longer than eps. The Euclidean kind uses
/// `euclidean_dim` unit axes.
double projection_entropy_lower(const RhoFunctional& rho, double eps,
                                std::size_t euclidean_dim = 0);

// ---------------------------------------------------------------------------
// Greedy eps-packings.

struct PackingResult {
  PointCloud points;
  bool target_reached = false;
  std::size_t draws = 0;
};

/// Scans `candidates` in order, keeping each point at distance >= eps from
/// all kept points, until `target` points are kept.
PackingResult greedy_packing(const PointCloud& candidates, double eps, std::size_t target);

/// Draws candidates uniformly from the truncated base set {rho <= 1} until
/// `target` points are kept or `budget` draws are spent. The truncation keeps
/// coordinates with tau_m >= eps / 4 (further capped by rho's truncation_dim);
/// the Euclidean kind needs an explicit `euclidean_dim`.
PackingResult greedy_packing(const RhoFunctional& rho, double eps, std::size_t target,
                             std::uint64_t seed, std::size_t budget = 1000000,
                             std::size_t euclidean_dim = 0);

/// Number of leading coordinates used when sampling the base set at
/// resolution eps.
std::size_t packing_dim(const RhoFunctional& rho, double eps, std::size_t euclidean_dim = 0);

/// Uniform draw from {x in R^dim : rho(x) <= 1}.
void sample_base_set(const RhoFunctional& rho, std::size_t dim, RandomStream& rng,
                     std::span<double> out);

}  // namespace empot
