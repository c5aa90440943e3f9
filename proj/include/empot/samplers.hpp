#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "empot/measures.hpp"
#include "empot/rho.hpp"

namespace empot {

class RandomStream;

/// Standardized (mean 0, variance 1) score laws.
enum class ScoreDistribution { gaussian, uniform, laplace };

ScoreDistribution parse_score_distribution(const std::string& name);
std::string to_string(ScoreDistribution scores);
double draw_score(ScoreDistribution scores, RandomStream& rng);
/// (E|Z|^q)^{1/q}.
double score_q_norm(ScoreDistribution scores, double q);

inline constexpr double kDefaultTailTolerance = 1e-6;

/// Truncated Karhunen-Loeve law X = sum_{m<=M} sigma_m Z_m e_m.
///
///   poly(b0, c0)     sigma_m = c0 m^{-(b0 + 1/2)}
///   exp(gamma0, c0)  sigma_m = c0 gamma0^{-(m-1)}
struct KLSpec {
  enum class Decay { poly, exp };

  Decay decay = Decay::poly;
  double rate = 1.0;  // b0 or gamma0
  double c0 = 1.0;
  ScoreDistribution scores = ScoreDistribution::gaussian;
  /// Zero selects the smallest M whose relative tail energy is within
  /// kDefaultTailTolerance.
  std::size_t truncation_dim = 0;

  static KLSpec poly(double b0, double c0 = 1.0,
                     ScoreDistribution scores = ScoreDistribution::gaussian,
                     std::size_t truncation_dim = 0);
  static KLSpec exponential(double gamma0, double c0 = 1.0,
                            ScoreDistribution scores = ScoreDistribution::gaussian,
                            std::size_t truncation_dim = 0);
  /// "poly:b0=1.5" or "exp:gamma0=2", optional ",c0=..", ",dim=..",
  /// ",scores=gaussian|uniform|laplace".
  static KLSpec parse(const std::string& spec);
  std::string to_string() const;

  /// sigma_m for m >= 1.
  double sigma(std::size_t m) const;
  /// sum_{m > M} sigma_m^2 / sum_m sigma_m^2.
  double tail_energy_fraction(std::size_t M) const;
  /// truncation_dim, or the smallest M meeting `tail_tol`.
  std::size_t dimension(double tail_tol = kDefaultTailTolerance) const;
};

/// n draws of the truncated expansion; sample i uses its own substream of
/// `seed`, so output does not depend on how work is split.
PointCloud sample_kl(const KLSpec& spec, std::size_t n, std::uint64_t seed);

/// score_q_norm * (sum_m (sigma_m / tau_m)^2)^{1/2}, summed over the untruncated
/// expansion. Throws ErrorCode::domain when the series diverges.
double fpc_moment_bound(const KLSpec& spec, const RhoFunctional& rho, double q,
                        double score_q_norm);

struct MomentCertificate {
  double q = 0.0;
  std::optional<double> M_q_analytic;
  double M_q_empirical = 0.0;
  std::size_t sample_size = 0;
};

/// (mean rho(x_i)^q)^{1/q}.
MomentCertificate estimate_moment(const PointCloud& samples, const RhoFunctional& rho, double q,
                                  std::optional<double> analytic = std::nullopt);

/// Pareto radius (scale 1, tail index `index`) times a uniform direction; in
/// d = 1 a symmetric sign. Moments of order < index are finite.
PointCloud sample_heavy_tail(std::size_t d, double q_finite, std::size_t n, std::uint64_t seed,
                             double index);
/// Same with index = q_finite + 0.25.
PointCloud sample_heavy_tail(std::size_t d, double q_finite, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------

/// Sampling laws used by the experiments.
///
///   uniform:d=4            uniform on [0,1]^d
///   gaussian:d=4           standard normal in R^d
///   heavy:d=3,q=4          sample_heavy_tail (optional ",index=..")
///   poly:b0=1.5,... / exp:gamma0=2,...   KLSpec
struct DistributionSpec {
  enum class Kind { uniform_cube, gaussian, heavy_tail, kl };

  Kind kind = Kind::gaussian;
  std::size_t d = 1;
  double q_finite = 0.0;
  double tail_index = 0.0;
  KLSpec kl;

  static DistributionSpec parse(const std::string& spec);
  std::string to_string() const;
  std::size_t dimension() const;
  PointCloud sample(std::size_t n, std::uint64_t seed) const;
};

}  // namespace empot
