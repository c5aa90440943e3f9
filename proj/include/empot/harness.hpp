#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "empot/concentration.hpp"
#include "empot/rho.hpp"
#include "empot/samplers.hpp"

namespace empot {

// ---------------------------------------------------------------------------
// Euclidean reference rates.

/// Log exponent zeta_{p,q,d}: 2 if d = q = 2p; 1 if (d != 2p and
/// q = dp/(d-p) ^ 2p) or q > d = 2p; 0 otherwise. dp/(d-p) is +inf for d <= p.
double zeta_exponent(double p, double q, std::size_t d);

/// 1/((2p) v d) ^ (1/p - 1/q).
double euclidean_rate_exponent(double p, double q, std::size_t d);

/// M_q n^{-exponent} (log n)^{zeta/p}.
double euclidean_reference_rate(double p, double q, std::size_t d, double n, double M_q = 1.0);

// ---------------------------------------------------------------------------
// Rate experiments.

enum class RateModel { power, polylog, subpoly };
enum class EstimatorMode { reference, two_sample };

RateModel parse_rate_model(const std::string& name);
std::string to_string(RateModel model);
EstimatorMode parse_estimator_mode(const std::string& name);
std::string to_string(EstimatorMode mode);

/// Fitted models, all linear in log E W:
///   power    log E W = a + k log n
///   polylog  log E W = a - b log log n   (slope = -b)
///   subpoly  log E W = a - k sqrt(log n) (slope = -k)
double model_abscissa(RateModel model, double n);

struct RateExperimentConfig {
  DistributionSpec distribution;
  double p = 1.0;
  std::vector<std::size_t> n_grid;
  std::size_t reps = 20;
  std::uint64_t seed = 0;
  RateModel model = RateModel::power;
  /// reference: W_p to a fresh draw of reference_factor * n atoms;
  /// two_sample: W_p to a fresh draw of n atoms (about sqrt(2) times the
  /// one-sample value for p = 1 in high dimension).
  EstimatorMode mode = EstimatorMode::reference;
  std::size_t reference_factor = 16;
  /// Seconds per n; replications after the limit are skipped and the cell is
  /// marked timed out. Zero disables the limit.
  double cell_time_limit = 0.0;
  unsigned threads = 1;
  /// Also run the telescope multiscale construction on every replication
  /// with n <= certificate_max_n and check certified^{1/p} >= exact.
  bool certificate_check = false;
  std::size_t certificate_max_n = 256;
  int certificate_depth = 3;
  std::string certificate_rho = "euclidean";

  void validate() const;
};

struct RateCell {
  std::size_t n = 0;
  std::size_t reps_done = 0;
  double mean = 0.0;
  double se = 0.0;
  bool timed_out = false;
  std::vector<double> distances;
  std::size_t certificate_checks = 0;
  std::size_t certificate_violations = 0;
};

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double intercept_se = 0.0;
  double slope_se = 0.0;
  double chi2 = 0.0;
  std::size_t dof = 0;
  std::vector<double> residuals;
};

/// Weighted least squares y = a + b x with weights w_i (inverse variances).
/// Standard errors come from (X' W X)^{-1} without chi^2 rescaling.
LinearFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& w);

struct RateFit {
  RateModel model = RateModel::power;
  EstimatorMode mode = EstimatorMode::reference;
  std::string distribution;
  double p = 1.0;
  LinearFit fit;
  std::vector<RateCell> cells;
  /// Slope the theory predicts for the chosen model, NaN if unknown.
  double reference_slope = 0.0;
};

/// Fits `model` to the completed (not timed out) cells, weighting log means
/// by (mean / se)^2.
RateFit fit_rate(const std::vector<RateCell>& cells, RateModel model);

/// Predicted slope for the distribution and model, NaN if there is none.
double reference_slope(const DistributionSpec& dist, double p, RateModel model);

RateFit run_rate_experiment(const RateExperimentConfig& config);

// ---------------------------------------------------------------------------
// Packing lower bound.

struct LowerBoundConfig {
  RhoFunctional rho = RhoFunctional::exponential(2.0);
  /// Dimension for the Euclidean kind.
  std::size_t euclidean_dim = 0;
  std::size_t n = 1000;
  std::size_t reps = 100;
  double p = 1.0;
  /// Separation; non-positive selects default_lower_bound_eps.
  double eps_n = 0.0;
  std::uint64_t seed = 0;
  std::size_t packing_budget = 1000000;
  unsigned threads = 1;
};

/// e^{-sqrt(2 log gamma log n)} for exp, (log n)^{-b} for poly, n^{-1/d}
/// for Euclidean.
double default_lower_bound_eps(const RhoFunctional& rho, std::size_t n, std::size_t euclidean_dim = 0);

struct LowerBoundReport {
  std::size_t n = 0;
  std::size_t reps = 0;
  double p = 1.0;
  double eps_n = 0.0;
  std::size_t packing_size = 0;
  std::size_t packing_dim = 0;
  std::vector<double> kappa;
  std::vector<double> wp;
  double mean_kappa = 0.0;
  double kappa_se = 0.0;
  double mean_wp = 0.0;
  /// min over replications of W_p / (eps_n kappa^{1/p}) where kappa > 0.
  double min_ratio = 0.0;
  /// Replications with W_p < eps_n kappa^{1/p} - 1e-9.
  std::size_t violations = 0;
};

/// mu_n is uniform on a greedy eps_n-packing of n points of {rho <= 1};
/// each replication draws n points from mu_n, records the unoccupied fraction
/// kappa_n and the exact W_p to mu_n. Throws ErrorCode::budget_exhausted if
/// the packing falls short of n points.
LowerBoundReport run_lower_bound_experiment(const LowerBoundConfig& config);

// ---------------------------------------------------------------------------
// Concentration experiment.

struct ConcentrationConfig {
  DistributionSpec distribution;
  std::size_t n = 256;
  double p = 1.0;
  std::size_t reps = 2000;
  std::size_t grid_points = 20;
  std::size_t reference_size = kReferenceAtoms;
  /// Draws used to estimate the psi_1 norm of ||X||.
  std::size_t orlicz_samples = 100000;
  double C_lsi = 1.0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct ConcentrationReport {
  TailCurve curve;
  double psi1_norm = 0.0;
  ConcentrationParams params;
  std::vector<double> bernstein_bound;
  /// Two-sided version 2 exp(...) of the log-Sobolev bound, capped at 1.
  std::vector<double> lsi_bound;
  /// Grid points where the empirical tail exceeds the Bernstein bound by
  /// more than 3 Monte Carlo standard errors.
  std::size_t violations = 0;
};

ConcentrationReport run_concentration_experiment(const ConcentrationConfig& config);

}  // namespace empot
