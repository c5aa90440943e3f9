#include "empot/exact_ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "empot/error.hpp"
#include "network_simplex.hpp"

namespace empot {

double ground_cost(std::span<const double> x, std::span<const double> y, double p) {
  const double sq = squared_distance(x, y);
  if (p == 2.0) return sq;
  if (p == 1.0) return std::sqrt(sq);
  return std::pow(sq, 0.5 * p);
}

double plan_cost(const CouplingPlan& plan, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                 double p) {
  double total = 0.0;
  for (const auto& e : plan.edges) {
    total += e.mass * ground_cost(mu.point(e.source), nu.point(e.target), p);
  }
  return total;
}

MarginalCheck check_marginals(const CouplingPlan& plan, const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu) {
  std::vector<double> rows(mu.size(), 0.0), cols(nu.size(), 0.0);
  MarginalCheck check;
  check.min_edge_mass = plan.edges.empty() ? 0.0 : plan.edges.front().mass;
  for (const auto& e : plan.edges) {
    require(e.source < mu.size() && e.target < nu.size(), "plan edge index out of range");
    rows[e.source] += e.mass;
    cols[e.target] += e.mass;
    check.min_edge_mass = std::min(check.min_edge_mass, e.mass);
  }
  for (std::size_t i = 0; i < mu.size(); ++i) {
    check.max_row_error = std::max(check.max_row_error, std::abs(rows[i] - mu.weight(i)));
  }
  for (std::size_t j = 0; j < nu.size(); ++j) {
    check.max_col_error = std::max(check.max_col_error, std::abs(cols[j] - nu.weight(j)));
  }
  return check;
}

namespace {

void validate_pair(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  require(std::isfinite(p) && p >= 1.0, "p must be a finite real >= 1");
  require(mu.size() > 0 && nu.size() > 0, "measures must be nonempty");
  require(mu.dim() == nu.dim(), "measures have different dimensions");
  const double a = mu.total_mass(), b = nu.total_mass();
  require(a > 0.0, "measures must have positive mass");
  if (std::abs(a - b) > kMarginalTolerance) {
    fail(ErrorCode::invalid_argument, "measures have different total mass");
  }
}

}  // namespace

WassersteinResult solve_wp(const DiscreteMeasure& mu_in, const DiscreteMeasure& nu_in, double p) {
  validate_pair(mu_in, nu_in, p);
  std::vector<std::size_t> rows_kept, cols_kept;
  const DiscreteMeasure mu = mu_in.without_zero_atoms(&rows_kept);
  const DiscreteMeasure nu = nu_in.without_zero_atoms(&cols_kept);
  const std::size_t m = mu.size(), n = nu.size();

  std::vector<double> cost(m * n);
  double max_cost = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    auto x = mu.point(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double c = ground_cost(x, nu.point(j), p);
      cost[i * n + j] = c;
      max_cost = std::max(max_cost, c);
    }
  }

  detail::TransportSimplex simplex(mu.weights(), nu.weights(), cost);
  simplex.run();

  WassersteinResult result;
  result.pivots = simplex.pivots();
  result.plan.order_p = p;
  double primal = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double f = simplex.flow(i, j);
      if (f > 0.0) {
        result.plan.edges.push_back({rows_kept[i], cols_kept[j], f});
        primal += f * cost[i * n + j];
      }
    }
  }
  result.plan.total_cost_p = primal;

  double dual = 0.0;
  for (std::size_t i = 0; i < m; ++i) dual += mu.weight(i) * simplex.row_potential(i);
  for (std::size_t j = 0; j < n; ++j) dual += nu.weight(j) * simplex.col_potential(j);
  double min_rc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double f = simplex.row_potential(i);
    for (std::size_t j = 0; j < n; ++j) {
      min_rc = std::min(min_rc, cost[i * n + j] - f - simplex.col_potential(j));
    }
  }
  result.dual_objective = dual;
  result.min_reduced_cost = min_rc;

  // Shifting the duals down by the worst violation makes them feasible, so
  // dual + min_rc * mass is a certified lower bound on the optimum.
  const double mass = mu.total_mass();
  const double lower = dual + min_rc * mass;
  const double gap = primal - lower;
  const double gap_tol = kDualGapTolerance * std::abs(primal) + 1e-12 * max_cost * mass;
  if (!(gap <= gap_tol) || !(std::abs(primal - dual) <= gap_tol)) {
    fail(ErrorCode::solver, "transport solution failed its duality certificate (gap " +
                                std::to_string(gap) + ")");
  }
  const MarginalCheck marg = check_marginals(result.plan, mu_in, nu_in);
  if (!marg.ok(kMarginalTolerance)) {
    fail(ErrorCode::solver, "transport solution violates its marginals");
  }

  result.distance = primal <= 0.0 ? 0.0 : std::pow(primal, 1.0 / p);
  return result;
}

double brute_force_wp(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  validate_pair(mu, nu, p);
  const std::size_t n = mu.size();
  require(nu.size() == n, "brute force oracle needs equal atom counts");
  require(n <= 8, "brute force oracle is limited to n <= 8");
  const double w = mu.weight(0);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(mu.weight(i) - w) > kMassTolerance || std::abs(nu.weight(i) - w) > kMassTolerance) {
      fail(ErrorCode::invalid_argument, "brute force oracle needs equal weights");
    }
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += ground_cost(mu.point(i), nu.point(perm[i]), p);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::pow(best * w, 1.0 / p);
}

}  // namespace empot
