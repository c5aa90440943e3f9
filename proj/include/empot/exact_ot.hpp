#pragma once

#include <cstddef>
#include <vector>

#include "empot/measures.hpp"

namespace empot {

struct TransportEdge {
  std::size_t source;
  std::size_t target;
  double mass;
};

/// Sparse coupling between two discrete measures, indexed by atom position.
struct CouplingPlan {
  std::vector<TransportEdge> edges;
  double total_cost_p = 0.0;  // sum mass * |x - y|^p
  double order_p = 1.0;
};

/// Cost |x - y|^p with fast paths for p = 1 and p = 2.
double ground_cost(std::span<const double> x, std::span<const double> y, double p);

/// Recomputes sum mass * |x - y|^p from the edge list.
double plan_cost(const CouplingPlan& plan, const DiscreteMeasure& mu,
                 const DiscreteMeasure& nu, double p);

struct MarginalCheck {
  double max_row_error = 0.0;
  double max_col_error = 0.0;
  double min_edge_mass = 0.0;
  bool ok(double tol) const {
    return max_row_error <= tol && max_col_error <= tol && min_edge_mass >= 0.0;
  }
};

MarginalCheck check_marginals(const CouplingPlan& plan, const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu);

struct WassersteinResult {
  double distance = 0.0;
  CouplingPlan plan;
  /// Kantorovich dual value sum a_i f_i + sum b_j g_j from the solver's
  /// potentials and the worst reduced cost; both feed the optimality check.
  double dual_objective = 0.0;
  double min_reduced_cost = 0.0;
  std::size_t pivots = 0;
};

inline constexpr double kMarginalTolerance = 1e-9;
inline constexpr double kDualGapTolerance = 1e-9;

/// Exact W_p between two discrete measures of equal mass via network simplex
/// on the dense bipartite transportation graph. Zero-weight atoms are dropped
/// before solving; plan indices refer to the original atoms. Throws
/// ErrorCode::solver if the returned plan fails its primal/dual certificate.
WassersteinResult solve_wp(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

/// Minimum over all n! assignments. Test oracle for equal-weight measures of
/// the same size n <= 8.
double brute_force_wp(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

}  // namespace empot
