#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "empot/covering.hpp"
#include "empot/exact_ot.hpp"
#include "empot/measures.hpp"
#include "empot/rho.hpp"

namespace empot {

// ---------------------------------------------------------------------------
// Nested partitions of a finite point set.

struct PartitionLevel {
  std::vector<int> cell_of_point;
  /// Parent cell (at level l-1) of every cell; {-1} at level 0.
  std::vector<int> parent;
  int num_cells = 0;
  /// Declared bound: the base diameter at level 0, 2 * 3^{-(l+1)} below.
  double diameter_bound = 0.0;
  /// Largest pairwise distance inside any one cell.
  double realized_diameter = 0.0;
};

struct PartitionTree {
  PointCloud points;
  std::vector<PartitionLevel> levels;

  int ell_star() const { return static_cast<int>(levels.size()) - 1; }
  std::vector<std::vector<std::size_t>> cells(int ell) const;
};

/// First-center-wins assignment: point i goes to the first center within
/// eps. Cells are numbered by center order with empty cells skipped.
/// Throws ErrorCode::check_failed if some point is farther than eps from
/// every center.
std::vector<int> partition_from_covering(const PointCloud& points, const PointCloud& centers,
                                         double eps);

/// Level 0 is the whole point set; level l >= 1 intersects the level l-1
/// cells with the cells of an oracle cover at radius 3^{-(l+1)}.
/// `base_diameter` (<= 2) bounds the diameter of the base set.
PartitionTree build_nested_tree(const PointCloud& points, const CoveringOracle& oracle,
                                int ell_star, double base_diameter = 2.0);

/// Throws ErrorCode::check_failed unless the tree is nested, every level
/// partitions the points and every cell's diameter is within its bound.
void verify_tree(const PartitionTree& tree);

/// Max pairwise distance over the points of each cell, maximized over cells.
double max_cell_diameter(const PointCloud& points, const std::vector<int>& cell_of_point,
                         int num_cells);

// ---------------------------------------------------------------------------
// Blurring and the two-measure coupling lemma.

struct BlurResult {
  DiscreteMeasure measure;
  /// Total target mass sitting in cells where mu has no mass.
  double mass_discrepancy = 0.0;
};

/// mu reweighted so each cell F carries nuhat(F): w_i * nuhat(F) / mu(F),
/// with 0/0 = 0.
BlurResult blurred_measure(const DiscreteMeasure& mu, const std::vector<int>& mu_cells,
                           const DiscreteMeasure& nuhat, const std::vector<int>& nu_cells,
                           int num_cells);

struct DssResult {
  CouplingPlan plan;
  double off_diagonal_mass = 0.0;
  /// 1/2 sum_C |nu(C) - mu(C)|.
  double predicted_off_diagonal = 0.0;
};

/// Coupling of two measures on the same atoms whose restrictions to every
/// cell are proportional: diagonal mu ^ nu plus the normalized product of the
/// surplus (mu - nu)_+ and deficit (nu - mu)_+. Cells where mu vanishes may
/// carry any nu.
DssResult dss_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const std::vector<int>& cells);

// ---------------------------------------------------------------------------
// Multiscale and telescope transport.

/// max(2^{p-1}(1 + 3^p), 2^p).
double bounded_support_constant(double p);

struct MultiscaleOptions {
  /// When false only costs and certificates are produced.
  bool build_plan = true;
};

struct MultiscaleResult {
  CouplingPlan plan;
  double plan_cost = 0.0;
  /// sum_l D_l^p * P(chain moves at step l), D_l the realized level-l cell
  /// diameter; always >= plan_cost.
  double certified_cost = 0.0;
  /// c_p (3^{-p l*} + sum_l 3^{-p l} S_l) with S_l = sum_{F in A_l} |nu(F) - mu(F)|.
  double lemma_bound = 0.0;
  double c_p = 0.0;
  std::vector<double> level_discrepancy;
  /// Off-diagonal mass of steps 0..l*-1 followed by the terminal step.
  std::vector<double> step_off_diagonal;
  /// Largest |mu_{l}(F) - nu(F)| over levels and cells.
  double max_chain_error = 0.0;
  std::vector<int> cells_per_level;
};

/// Distinct points of mu followed by the distinct points of nu not in mu.
PointCloud union_support(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Chain of blurred measures mu = mu_0 -> mu_1 -> ... -> mu_{l*} -> nu along
/// `tree`, whose points must contain every atom of both measures. Each step is
/// a per-cell coupling lemma; the last is a per-cell product coupling.
MultiscaleResult multiscale_transport(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                      const PartitionTree& tree, double p,
                                      const MultiscaleOptions& options = {});

/// Builds the tree over the union support (which must lie in {rho <= 1})
/// and runs multiscale_transport.
MultiscaleResult multiscale_transport(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                      const RhoFunctional& rho, const CoveringOracle& oracle,
                                      int ell_star, double p,
                                      const MultiscaleOptions& options = {});

struct TelescopeResult {
  CouplingPlan plan;
  double plan_cost = 0.0;
  double certified_cost = 0.0;
  std::vector<double> mu_layer_mass;
  std::vector<double> nu_layer_mass;
  /// 1/2 sum_j |mu(B_j) - nu(B_j)|.
  double eta = 0.0;
  double residual_cost = 0.0;
  /// Per-layer multiscale results (plans dropped); empty entries for layers
  /// without shared mass.
  std::vector<MultiscaleResult> layers;
};

/// Layer-wise multiscale couplings of the rescaled layers weighted by
/// mu(B_j) ^ nu(B_j), plus the product alpha x beta / eta of the leftover
/// layer masses.
TelescopeResult telescope_transport(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    const RhoFunctional& rho, const CoveringOracle& oracle,
                                    int ell_star, double p,
                                    const MultiscaleOptions& options = {});

// ---------------------------------------------------------------------------
// General upper bound on E W_p^p(muhat, mu).

struct BoundParams {
  double p = 1.0;
  double q = 2.0;
  double M_q = 1.0;
  int ell_star = 0;
  double n = 1.0;
  /// Telescope truncation; negative selects the default.
  int j_max = -1;
  /// Leading constant; zero or negative selects default_c_pq(p).
  double c_pq = 0.0;
};

/// Telescoping constant 2^{p-1} times bounded_support_constant(p).
double default_c_pq(double p);

/// Smallest j with 2^{(p-q) j} < 1e-16.
int default_j_max(double p, double q);

struct BoundEvaluation {
  double value = 0.0;
  double truncated_sum = 0.0;
  double remainder = 0.0;
  int j_max = 0;
  double c_pq = 0.0;
  /// Per j: the last l at which the sqrt branch is still the smaller one,
  /// -1 if it never is.
  std::vector<int> critical_level;
};

/// c M_q^p sum_{j<=j_max} 2^{pj} {2^{-qj} 3^{-p l*} + sum_l 3^{-p l}
/// [2^{-qj} ^ (barN(l) 2^{-qj} / n)^{1/2}]} plus the tail bound
/// c M_q^p sum_{j>j_max} 2^{(p-q)j} (1 + sum_l 3^{-p l}).
BoundEvaluation evaluate_general_bound(const BoundParams& params,
                                       const std::function<double(int)>& bar_n);

}  // namespace empot
