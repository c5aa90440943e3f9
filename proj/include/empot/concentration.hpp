#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "empot/samplers.hpp"

namespace empot {

struct ConcentrationParams {
  /// Bernstein variance proxy sum_i sigma_i^2 and scale M.
  double sigma2 = 0.0;
  double M = 0.0;
  /// Norm-moment constants: E||X||^k <= s^2 k! V^{k-2} / 2.
  double s = 0.0;
  double V = 0.0;
  double C_lsi = 1.0;
  double p = 1.0;
  double n = 1.0;
};

/// exp(-t^2 / (2 sigma^2 + 2 t M)), capped at 1.
double bernstein_mcdiarmid_tail(double sigma2, double M, double t);
double bernstein_mcdiarmid_tail(const ConcentrationParams& params, double t);

/// Bernstein constants for a sum of independent terms with |X_i - E X_i| <= b:
/// sigma^2 = sum Var X_i and M = b / 3.
ConcentrationParams bounded_sum_bernstein(std::span<const double> variances, double b);

/// Per-coordinate constants sigma_i = 2 s n^{-1/p}, M = 2 V n^{-1/p} for
/// f = W_p(muhat, mu); sigma2 is their sum over the n coordinates.
ConcentrationParams wasserstein_bernstein_params(double s, double V, double n, double p);

/// Two-sided 2 exp(-t^2 / (8 s^2 n^{1-2/p} + 4 V t n^{-1/p})), capped at 1.
double wasserstein_mean_tail(const ConcentrationParams& params, double t);

/// One-sided exp(-n^{2/(2 v p)} t^2 / (2 C)).
double lsi_mean_tail(double C_lsi, double n, double p, double t);

/// Empirical inf{c > 0 : mean exp(|z_i / c|^alpha) <= 2}, bisected to 1e-9
/// relative. All-zero input gives 0.
double orlicz_norm(std::span<const double> samples, double alpha);

/// s = sqrt(2) C, V = C from a psi_1 norm C of ||X||.
ConcentrationParams params_from_psi1(double psi1_norm, double n, double p);

struct TailCurve {
  std::vector<double> t;
  std::vector<double> empirical_tail;
  std::vector<double> mc_se;
  std::vector<double> distances;
  double mean_distance = 0.0;
  std::size_t reference_size = 0;
};

inline constexpr std::size_t kReferenceAtoms = 4096;

/// Fraction of replications with |W_p(muhat, mu_ref) - mean| >= t for each t,
/// mean being the replication average. mu_ref is one fixed draw of
/// `reference_size` atoms from its own substream of `seed`.
TailCurve mc_deviation_tail(const DistributionSpec& dist, std::size_t n, double p,
                            std::size_t reps, const std::vector<double>& t_grid,
                            std::uint64_t seed, std::size_t reference_size = kReferenceAtoms,
                            unsigned threads = 1);

/// Recomputes t, empirical_tail and mc_se of `curve` on a new grid from its
/// stored distances and mean.
void set_tail_grid(TailCurve& curve, const std::vector<double>& t_grid);

/// Evenly spaced grid of `points` values from 0 to the largest observed
/// deviation.
std::vector<double> deviation_grid(const std::vector<double>& distances, std::size_t points);

}  // namespace empot
