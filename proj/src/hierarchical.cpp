#include "empot/hierarchical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "empot/error.hpp"

namespace empot {

namespace {

constexpr double kChainTolerance = 1e-12;
constexpr double kDiameterSlack = 1e-12;

using CoordKey = std::vector<double>;

CoordKey key_of(std::span<const double> x) { return CoordKey(x.begin(), x.end()); }

void check_same_mass(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (std::abs(mu.total_mass() - nu.total_mass()) > kMarginalTolerance) {
    fail(ErrorCode::invalid_argument, "measures have different total mass");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::vector<std::size_t>> PartitionTree::cells(int ell) const {
  require(ell >= 0 && ell <= ell_star(), "partition level out of range");
  const PartitionLevel& level = levels[ell];
  std::vector<std::vector<std::size_t>> out(level.num_cells);
  for (std::size_t i = 0; i < level.cell_of_point.size(); ++i) {
    out[level.cell_of_point[i]].push_back(i);
  }
  return out;
}

std::vector<int> partition_from_covering(const PointCloud& points, const PointCloud& centers,
                                         double eps) {
  require(eps > 0.0, "cover radius must be positive");
  require(points.empty() || centers.dim() == points.dim(), "centers have the wrong dimension");
  const double limit = eps * eps * (1.0 + kDiameterSlack);
  std::vector<int> raw(points.size(), -1);
  std::vector<char> used(centers.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto x = points.point(i);
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (squared_distance(x, centers.point(c)) <= limit) {
        raw[i] = static_cast<int>(c);
        used[c] = 1;
        break;
      }
    }
    if (raw[i] < 0) {
      fail(ErrorCode::check_failed,
           "centers do not cover point " + std::to_string(i) + " at radius " + std::to_string(eps));
    }
  }
  std::vector<int> compact(centers.size(), -1);
  int next = 0;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    if (used[c]) compact[c] = next++;
  }
  for (int& cell : raw) cell = compact[cell];
  return raw;
}

double max_cell_diameter(const PointCloud& points, const std::vector<int>& cell_of_point,
                         int num_cells) {
  std::vector<std::vector<std::size_t>> members(std::max(num_cells, 0));
  for (std::size_t i = 0; i < cell_of_point.size(); ++i) members[cell_of_point[i]].push_back(i);
  double worst = 0.0;
  for (const auto& cell : members) {
    for (std::size_t a = 0; a < cell.size(); ++a) {
      for (std::size_t b = a + 1; b < cell.size(); ++b) {
        worst = std::max(worst, squared_distance(points.point(cell[a]), points.point(cell[b])));
      }
    }
  }
  return std::sqrt(worst);
}

PartitionTree build_nested_tree(const PointCloud& points, const CoveringOracle& oracle,
                                int ell_star, double base_diameter) {
  require(ell_star >= 0, "partition depth must be >= 0");
  require(base_diameter > 0.0 && base_diameter <= 2.0, "base diameter must lie in (0, 2]");
  PartitionTree tree;
  tree.points = points;
  const std::size_t n = points.size();

  PartitionLevel base;
  base.cell_of_point.assign(n, 0);
  base.parent = {-1};
  base.num_cells = 1;
  base.diameter_bound = base_diameter;
  tree.levels.push_back(std::move(base));

  for (int ell = 1; ell <= ell_star; ++ell) {
    const double eps = level_radius(ell);
    const PartitionLevel& up = tree.levels.back();
    std::vector<int> cover_cells;
    if (n > 0) {
      const PointCloud centers = oracle.cover(points, eps);
      cover_cells = partition_from_covering(points, centers, eps);
    }
    PartitionLevel level;
    level.cell_of_point.resize(n);
    std::map<std::pair<int, int>, int> ids;
    for (std::size_t i = 0; i < n; ++i) {
      const std::pair<int, int> key{up.cell_of_point[i], cover_cells[i]};
      auto [it, inserted] = ids.emplace(key, level.num_cells);
      if (inserted) {
        level.parent.push_back(key.first);
        ++level.num_cells;
      }
      level.cell_of_point[i] = it->second;
    }
    level.diameter_bound = 2.0 * eps;
    tree.levels.push_back(std::move(level));
  }

  for (auto& level : tree.levels) {
    level.realized_diameter = max_cell_diameter(points, level.cell_of_point, level.num_cells);
  }
  verify_tree(tree);
  return tree;
}

void verify_tree(const PartitionTree& tree) {
  const std::size_t n = tree.points.size();
  if (tree.levels.empty()) fail(ErrorCode::check_failed, "partition tree has no levels");
  for (int ell = 0; ell <= tree.ell_star(); ++ell) {
    const PartitionLevel& level = tree.levels[ell];
    const std::string where = "partition level " + std::to_string(ell);
    if (level.cell_of_point.size() != n) fail(ErrorCode::check_failed, where + ": wrong size");
    if (static_cast<int>(level.parent.size()) != level.num_cells) {
      fail(ErrorCode::check_failed, where + ": parent table has the wrong size");
    }
    if (ell == 0 && level.num_cells != 1) fail(ErrorCode::check_failed, "level 0 must be one cell");
    std::vector<int> count(level.num_cells, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const int c = level.cell_of_point[i];
      if (c < 0 || c >= level.num_cells) fail(ErrorCode::check_failed, where + ": bad cell id");
      ++count[c];
      if (ell > 0 && level.parent[c] != tree.levels[ell - 1].cell_of_point[i]) {
        fail(ErrorCode::check_failed, where + ": cells are not nested");
      }
    }
    if (ell > 0) {
      for (int c : count) {
        if (c == 0) fail(ErrorCode::check_failed, where + ": empty cell");
      }
    }
    if (level.realized_diameter > level.diameter_bound * (1.0 + kDiameterSlack)) {
      fail(ErrorCode::check_failed, where + ": cell diameter " +
                                        std::to_string(level.realized_diameter) +
                                        " exceeds bound " + std::to_string(level.diameter_bound));
    }
  }
}

// ---------------------------------------------------------------------------

BlurResult blurred_measure(const DiscreteMeasure& mu, const std::vector<int>& mu_cells,
                           const DiscreteMeasure& nuhat, const std::vector<int>& nu_cells,
                           int num_cells) {
  require(mu_cells.size() == mu.size() && nu_cells.size() == nuhat.size(),
          "cell assignment does not match the measure");
  std::vector<double> mu_mass(num_cells, 0.0), nu_mass(num_cells, 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    require(mu_cells[i] >= 0 && mu_cells[i] < num_cells, "cell id out of range");
    mu_mass[mu_cells[i]] += mu.weight(i);
  }
  for (std::size_t i = 0; i < nuhat.size(); ++i) {
    require(nu_cells[i] >= 0 && nu_cells[i] < num_cells, "cell id out of range");
    nu_mass[nu_cells[i]] += nuhat.weight(i);
  }
  BlurResult result;
  std::vector<double> w(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const int c = mu_cells[i];
    w[i] = mu_mass[c] > 0.0 ? mu.weight(i) * nu_mass[c] / mu_mass[c] : 0.0;
  }
  for (int c = 0; c < num_cells; ++c) {
    if (mu_mass[c] == 0.0) result.mass_discrepancy += nu_mass[c];
  }
  result.measure = DiscreteMeasure(mu.points(), std::move(w));
  return result;
}

DssResult dss_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const std::vector<int>& cells) {
  const std::size_t n = mu.size();
  require(nu.size() == n && cells.size() == n, "coupling lemma needs both measures on the same atoms");
  require(mu.points().coords() == nu.points().coords(),
          "coupling lemma needs both measures on the same atoms");
  check_same_mass(mu, nu);

  int num_cells = 0;
  for (int c : cells) {
    require(c >= 0, "cell id out of range");
    num_cells = std::max(num_cells, c + 1);
  }
  std::vector<double> mu_mass(num_cells, 0.0), nu_mass(num_cells, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    mu_mass[cells[i]] += mu.weight(i);
    nu_mass[cells[i]] += nu.weight(i);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int c = cells[i];
    if (mu_mass[c] <= 0.0) continue;
    const double expected = mu.weight(i) * nu_mass[c] / mu_mass[c];
    if (std::abs(nu.weight(i) - expected) > kMarginalTolerance) {
      fail(ErrorCode::invalid_argument,
           "coupling lemma needs nu proportional to mu inside every cell");
    }
  }

  DssResult result;
  result.plan.order_p = 1.0;
  std::vector<std::size_t> surplus, deficit;
  double delta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = mu.weight(i), b = nu.weight(i);
    const double diag = std::min(a, b);
    if (diag > 0.0) result.plan.edges.push_back({i, i, diag});
    if (a > b) {
      surplus.push_back(i);
      delta += a - b;
    } else if (b > a) {
      deficit.push_back(i);
    }
  }
  if (delta > 0.0) {
    for (std::size_t i : surplus) {
      const double s = mu.weight(i) - nu.weight(i);
      for (std::size_t j : deficit) {
        const double mass = s * (nu.weight(j) - mu.weight(j)) / delta;
        if (mass > 0.0) {
          result.plan.edges.push_back({i, j, mass});
          result.off_diagonal_mass += mass;
        }
      }
    }
  }
  for (int c = 0; c < num_cells; ++c) {
    result.predicted_off_diagonal += 0.5 * std::abs(nu_mass[c] - mu_mass[c]);
  }
  return result;
}

// ---------------------------------------------------------------------------

double bounded_support_constant(double p) {
  return std::max(std::pow(2.0, p - 1.0) * (1.0 + std::pow(3.0, p)), std::pow(2.0, p));
}

PointCloud union_support(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require(mu.dim() == nu.dim(), "measures have different dimensions");
  std::map<CoordKey, std::size_t> seen;
  PointCloud pts(std::max<std::size_t>(mu.dim(), 1), {});
  auto add = [&](const DiscreteMeasure& m) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (seen.emplace(key_of(m.point(i)), pts.size()).second) pts.push_back(m.point(i));
    }
  };
  add(mu);
  add(nu);
  return pts;
}

MultiscaleResult multiscale_transport(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                      const PartitionTree& tree, double p,
                                      const MultiscaleOptions& options) {
  require(std::isfinite(p) && p >= 1.0, "p must be a finite real >= 1");
  require(mu.size() > 0 && nu.size() > 0, "measures must be nonempty");
  require(mu.dim() == nu.dim(), "measures have different dimensions");
  check_same_mass(mu, nu);
  require(!tree.levels.empty(), "partition tree has no levels");

  const PointCloud& pts = tree.points;
  const std::size_t N = pts.size();
  require(N == 0 || pts.dim() == mu.dim(), "tree points have the wrong dimension");

  std::map<CoordKey, std::size_t> index;
  for (std::size_t u = 0; u < N; ++u) index.emplace(key_of(pts.point(u)), u);
  auto locate = [&](const DiscreteMeasure& m, std::vector<std::size_t>& where,
                    std::vector<double>& mass) {
    where.resize(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      auto it = index.find(key_of(m.point(i)));
      if (it == index.end()) {
        fail(ErrorCode::domain, "atom " + std::to_string(i) + " lies outside the base cell");
      }
      where[i] = it->second;
      mass[it->second] += m.weight(i);
    }
  };
  std::vector<std::size_t> mu_at, nu_at;
  std::vector<double> a(N, 0.0), b(N, 0.0);
  locate(mu, mu_at, a);
  locate(nu, nu_at, b);

  const int L = tree.ell_star();
  MultiscaleResult result;
  result.c_p = bounded_support_constant(p);
  for (const auto& level : tree.levels) result.cells_per_level.push_back(level.num_cells);

  // S_l = sum_F |nu(F) - mu(F)| for the lemma bound.
  for (int ell = 0; ell <= L; ++ell) {
    const PartitionLevel& level = tree.levels[ell];
    std::vector<double> diff(level.num_cells, 0.0);
    for (std::size_t u = 0; u < N; ++u) diff[level.cell_of_point[u]] += b[u] - a[u];
    double s = 0.0;
    for (double d : diff) s += std::abs(d);
    result.level_discrepancy.push_back(s);
  }

  std::vector<std::size_t> rows;
  for (std::size_t u = 0; u < N; ++u) {
    if (a[u] > 0.0) rows.push_back(u);
  }
  const std::size_t R = rows.size();
  std::vector<double> plan(R * N, 0.0);
  for (std::size_t r = 0; r < R; ++r) plan[r * N + rows[r]] = a[rows[r]];

  std::vector<double> cur = a;
  // Mass of chains that have not moved yet, per current position.
  std::vector<double> unmoved = a;
  std::vector<double> first_move;  // P(first move happens at step l)

  result.max_chain_error = std::abs(mu.total_mass() - nu.total_mass());
  std::vector<double> next(N), keep(N), s(N), t(N);
  for (int ell = 0; ell < L; ++ell) {
    const PartitionLevel& parent = tree.levels[ell];
    const PartitionLevel& child = tree.levels[ell + 1];

    std::vector<double> child_cur(child.num_cells, 0.0), child_nu(child.num_cells, 0.0);
    for (std::size_t u = 0; u < N; ++u) {
      child_cur[child.cell_of_point[u]] += cur[u];
      child_nu[child.cell_of_point[u]] += b[u];
    }
    for (std::size_t u = 0; u < N; ++u) {
      const int c = child.cell_of_point[u];
      if (child_cur[c] > 0.0) {
        next[u] = cur[u] * (child_nu[c] / child_cur[c]);
      } else {
        // No mass has reached this cell yet; it takes the target's shape.
        next[u] = b[u];
      }
    }
    std::vector<double> child_next(child.num_cells, 0.0);
    for (std::size_t u = 0; u < N; ++u) child_next[child.cell_of_point[u]] += next[u];
    for (int c = 0; c < child.num_cells; ++c) {
      result.max_chain_error = std::max(result.max_chain_error, std::abs(child_next[c] - child_nu[c]));
    }
    if (result.max_chain_error > kChainTolerance) {
      fail(ErrorCode::check_failed, "blurred chain lost mass at level " + std::to_string(ell + 1));
    }

    std::vector<double> out_mass(parent.num_cells, 0.0), in_mass(parent.num_cells, 0.0);
    double moved = 0.0, step_first = 0.0;
    for (std::size_t u = 0; u < N; ++u) {
      s[u] = std::max(cur[u] - next[u], 0.0);
      t[u] = std::max(next[u] - cur[u], 0.0);
      keep[u] = cur[u] > 0.0 ? std::min(cur[u], next[u]) / cur[u] : 0.0;
      out_mass[parent.cell_of_point[u]] += s[u];
      in_mass[parent.cell_of_point[u]] += t[u];
      moved += s[u];
      step_first += unmoved[u] * (1.0 - keep[u]);
      unmoved[u] *= keep[u];
    }
    result.step_off_diagonal.push_back(moved);
    first_move.push_back(step_first);

    // Compose with the kernel K(y, z) = keep(y) 1{y=z} + s(y)/cur(y) t(z)/T_F.
    std::vector<double> leave(parent.num_cells);
    for (std::size_t r = 0; r < R; ++r) {
      double* row = plan.data() + r * N;
      std::fill(leave.begin(), leave.end(), 0.0);
      for (std::size_t y = 0; y < N; ++y) {
        if (s[y] > 0.0 && row[y] != 0.0) leave[parent.cell_of_point[y]] += row[y] * (s[y] / cur[y]);
      }
      for (std::size_t z = 0; z < N; ++z) {
        double v = row[z] * keep[z];
        const int f = parent.cell_of_point[z];
        if (t[z] > 0.0 && leave[f] != 0.0 && in_mass[f] > 0.0) v += leave[f] * (t[z] / in_mass[f]);
        row[z] = v;
      }
    }
    cur.swap(next);
  }

  // Terminal per-cell product coupling mu_{l*}|_F x nu|_F / nu(F).
  const PartitionLevel& last = tree.levels[L];
  std::vector<double> cell_nu(last.num_cells, 0.0);
  for (std::size_t u = 0; u < N; ++u) cell_nu[last.cell_of_point[u]] += b[u];
  double terminal_moved = 0.0, terminal_first = 0.0;
  for (std::size_t u = 0; u < N; ++u) {
    const double fnu = cell_nu[last.cell_of_point[u]];
    const double stay = fnu > 0.0 ? b[u] / fnu : 0.0;
    terminal_moved += cur[u] * (1.0 - stay);
    terminal_first += unmoved[u] * (1.0 - stay);
  }
  result.step_off_diagonal.push_back(terminal_moved);
  first_move.push_back(terminal_first);
  {
    std::vector<double> cell_row(last.num_cells);
    for (std::size_t r = 0; r < R; ++r) {
      double* row = plan.data() + r * N;
      std::fill(cell_row.begin(), cell_row.end(), 0.0);
      for (std::size_t y = 0; y < N; ++y) cell_row[last.cell_of_point[y]] += row[y];
      for (std::size_t z = 0; z < N; ++z) {
        const int f = last.cell_of_point[z];
        row[z] = cell_nu[f] > 0.0 ? cell_row[f] * (b[z] / cell_nu[f]) : 0.0;
      }
    }
  }

  double cost = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    auto x = pts.point(rows[r]);
    const double* row = plan.data() + r * N;
    for (std::size_t z = 0; z < N; ++z) {
      if (row[z] > 0.0) cost += row[z] * ground_cost(x, pts.point(z), p);
    }
  }
  result.plan_cost = cost;

  // A chain whose first move happens at step l never leaves the level-l cell
  // it was in, so it travels at most the realized level-l diameter.
  double cert = 0.0;
  for (int ell = 0; ell <= L; ++ell) {
    cert += std::pow(tree.levels[ell].realized_diameter, p) * first_move[ell];
  }
  result.certified_cost = cert;

  double lemma = std::pow(3.0, -p * L);
  for (int ell = 0; ell <= L; ++ell) lemma += std::pow(3.0, -p * ell) * result.level_discrepancy[ell];
  result.lemma_bound = result.c_p * lemma;

  if (options.build_plan) {
    result.plan.order_p = p;
    std::vector<std::vector<std::size_t>> nu_atoms_at(N);
    for (std::size_t j = 0; j < nu.size(); ++j) {
      if (nu.weight(j) > 0.0) nu_atoms_at[nu_at[j]].push_back(j);
    }
    std::vector<std::size_t> row_of(N, R);
    for (std::size_t r = 0; r < R; ++r) row_of[rows[r]] = r;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (mu.weight(i) <= 0.0) continue;
      const std::size_t x = mu_at[i];
      const double row_share = mu.weight(i) / a[x];
      const double* row = plan.data() + row_of[x] * N;
      for (std::size_t z = 0; z < N; ++z) {
        if (row[z] <= 0.0) continue;
        for (std::size_t j : nu_atoms_at[z]) {
          result.plan.edges.push_back({i, j, row[z] * row_share * (nu.weight(j) / b[z])});
        }
      }
    }
    result.plan.total_cost_p = cost;
  }
  return result;
}

MultiscaleResult multiscale_transport(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                      const RhoFunctional& rho, const CoveringOracle& oracle,
                                      int ell_star, double p, const MultiscaleOptions& options) {
  const PointCloud pts = union_support(mu, nu);
  for (std::size_t u = 0; u < pts.size(); ++u) {
    const double r = rho(pts.point(u));
    if (!(r <= 1.0 + 1e-12)) {
      fail(ErrorCode::domain, "support point with rho = " + std::to_string(r) +
                                  " lies outside the base cell {rho <= 1}");
    }
  }
  const PartitionTree tree = build_nested_tree(pts, oracle, ell_star, 2.0);
  return multiscale_transport(mu, nu, tree, p, options);
}

TelescopeResult telescope_transport(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    const RhoFunctional& rho, const CoveringOracle& oracle,
                                    int ell_star, double p, const MultiscaleOptions& options) {
  require(std::isfinite(p) && p >= 1.0, "p must be a finite real >= 1");
  require(mu.size() > 0 && nu.size() > 0, "measures must be nonempty");
  require(mu.dim() == nu.dim(), "measures have different dimensions");
  check_same_mass(mu, nu);

  const TelescopeLayers lmu = telescope_split(mu, rho);
  const TelescopeLayers lnu = telescope_split(nu, rho);
  const int J = std::max(lmu.num_layers(), lnu.num_layers());
  TelescopeResult result;
  result.mu_layer_mass.assign(J, 0.0);
  result.nu_layer_mass.assign(J, 0.0);
  for (int j = 0; j < lmu.num_layers(); ++j) result.mu_layer_mass[j] = lmu.layer_masses[j];
  for (int j = 0; j < lnu.num_layers(); ++j) result.nu_layer_mass[j] = lnu.layer_masses[j];
  result.layers.resize(J);
  result.plan.order_p = p;

  double cost = 0.0, cert = 0.0;
  for (int j = 0; j < J; ++j) {
    const double mj = result.mu_layer_mass[j], nj = result.nu_layer_mass[j];
    const double shared = std::min(mj, nj);
    const double scale_p = std::pow(2.0, p * j);
    cert += std::pow(2.0, p - 1.0) * scale_p * std::abs(mj - nj);
    if (shared <= 0.0) continue;
    const DiscreteMeasure mu_j = rescaled_layer(mu, lmu, j);
    const DiscreteMeasure nu_j = rescaled_layer(nu, lnu, j);
    MultiscaleResult layer = multiscale_transport(mu_j, nu_j, rho, oracle, ell_star, p, options);
    cost += scale_p * shared * layer.plan_cost;
    cert += scale_p * shared * layer.certified_cost;
    if (options.build_plan) {
      const auto src = lmu.atoms_in_layer(j);
      const auto dst = lnu.atoms_in_layer(j);
      for (const auto& e : layer.plan.edges) {
        result.plan.edges.push_back({src[e.source], dst[e.target], e.mass * shared});
      }
    }
    layer.plan = CouplingPlan{};
    result.layers[j] = std::move(layer);
  }

  // Leftover layer masses alpha (from mu) and beta (from nu), coupled as a
  // product normalized by eta.
  std::vector<std::pair<std::size_t, double>> alpha, beta;
  double alpha_mass = 0.0, beta_mass = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const int j = lmu.layer_of_atom[i];
    const double mj = result.mu_layer_mass[j], nj = result.nu_layer_mass[j];
    if (mj > nj && mu.weight(i) > 0.0) {
      const double w = mu.weight(i) * ((mj - nj) / mj);
      alpha.emplace_back(i, w);
      alpha_mass += w;
    }
  }
  for (std::size_t k = 0; k < nu.size(); ++k) {
    const int j = lnu.layer_of_atom[k];
    const double mj = result.mu_layer_mass[j], nj = result.nu_layer_mass[j];
    if (nj > mj && nu.weight(k) > 0.0) {
      const double w = nu.weight(k) * ((nj - mj) / nj);
      beta.emplace_back(k, w);
      beta_mass += w;
    }
  }
  for (int j = 0; j < J; ++j) {
    result.eta += 0.5 * std::abs(result.mu_layer_mass[j] - result.nu_layer_mass[j]);
  }
  if (alpha_mass > 0.0 && beta_mass > 0.0) {
    for (const auto& [i, wa] : alpha) {
      for (const auto& [k, wb] : beta) {
        const double mass = wa * wb / beta_mass;
        result.residual_cost += mass * ground_cost(mu.point(i), nu.point(k), p);
        if (options.build_plan) result.plan.edges.push_back({i, k, mass});
      }
    }
  }
  cost += result.residual_cost;
  result.plan_cost = cost;
  result.certified_cost = cert;
  result.plan.total_cost_p = cost;
  return result;
}

// ---------------------------------------------------------------------------

double default_c_pq(double p) { return std::pow(2.0, p - 1.0) * bounded_support_constant(p); }

int default_j_max(double p, double q) {
  require(q > p, "the general bound needs q > p");
  int j = static_cast<int>(std::ceil(std::log2(1e16) / (q - p)));
  while (j > 0 && std::pow(2.0, (p - q) * (j - 1)) < 1e-16) --j;
  while (std::pow(2.0, (p - q) * j) >= 1e-16) ++j;
  return j;
}

BoundEvaluation evaluate_general_bound(const BoundParams& params,
                                       const std::function<double(int)>& bar_n) {
  const double p = params.p, q = params.q;
  require(std::isfinite(p) && p >= 1.0, "p must be a finite real >= 1");
  if (!(q > p)) fail(ErrorCode::domain, "the general bound needs q > p (the j-series diverges)");
  require(params.M_q > 0.0 && std::isfinite(params.M_q), "M_q must be positive");
  require(params.ell_star >= 0, "ell_star must be >= 0");
  require(params.n >= 1.0, "n must be >= 1");

  BoundEvaluation out;
  out.c_pq = params.c_pq > 0.0 ? params.c_pq : default_c_pq(p);
  out.j_max = params.j_max >= 0 ? params.j_max : default_j_max(p, q);
  const int L = params.ell_star;

  std::vector<double> barn(L + 1), level_weight(L + 1);
  double level_weight_sum = 0.0;
  for (int ell = 0; ell <= L; ++ell) {
    barn[ell] = bar_n(ell);
    require(barn[ell] >= 0.0, "bar_N must be nonnegative");
    require(ell == 0 || barn[ell] >= barn[ell - 1], "bar_N must be nondecreasing in l");
    level_weight[ell] = std::pow(3.0, -p * ell);
    level_weight_sum += level_weight[ell];
  }

  double total = 0.0;
  out.critical_level.assign(out.j_max + 1, -1);
  for (int j = 0; j <= out.j_max; ++j) {
    const double mass = std::pow(2.0, -q * j);
    double inner = mass * std::pow(3.0, -p * L);
    for (int ell = 0; ell <= L; ++ell) {
      const double sampling = std::sqrt(barn[ell] * mass / params.n);
      if (sampling <= mass) out.critical_level[j] = ell;
      inner += level_weight[ell] * std::min(mass, sampling);
    }
    total += std::pow(2.0, p * j) * inner;
  }
  out.truncated_sum = total;
  const double ratio = std::pow(2.0, p - q);
  out.remainder = std::pow(ratio, out.j_max + 1) / (1.0 - ratio) * (1.0 + level_weight_sum);
  out.value = out.c_pq * std::pow(params.M_q, p) * (out.truncated_sum + out.remainder);
  return out;
}

}  // namespace empot
