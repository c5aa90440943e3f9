#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace empot::detail {

// Primal network simplex for the uncapacitated transportation problem
//
//   min sum_ij c_ij x_ij  s.t.  sum_j x_ij = a_i,  sum_i x_ij = b_j,  x >= 0
//
// on the complete bipartite graph. Spanning-tree bookkeeping (thread, reverse
// thread, successor counts, last successors) and block-search pricing follow
// the LEMON NetworkSimplex design. Supplies and costs are doubles.
class TransportSimplex {
public:
  /// `cost` is row-major m x n.
  TransportSimplex(std::vector<double> supply, std::vector<double> demand,
                   std::vector<double> cost);

  /// Runs to optimality. Returns false if the pivot limit was hit.
  bool run(std::size_t max_pivots = 0);

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  double flow(std::size_t i, std::size_t j) const { return flow_[i * n_ + j]; }
  /// Dual potentials in the convention f_i + g_j <= c_ij.
  double row_potential(std::size_t i) const { return -pi_[i]; }
  double col_potential(std::size_t j) const { return pi_[m_ + j]; }
  std::size_t pivots() const { return pivots_; }

private:
  enum : std::int8_t { kStateTree = 0, kStateLower = 1 };
  enum : std::int8_t { kDirUp = 1, kDirDown = -1 };

  bool find_entering_arc();
  void find_join_node();
  bool find_leaving_arc();
  void change_flow();
  void update_tree_structure();
  void update_potential();

  double arc_cost(std::size_t e) const;
  int arc_source(std::size_t e) const;
  int arc_target(std::size_t e) const;

  std::size_t m_, n_;
  std::size_t arc_num_, all_arc_num_;
  int node_num_, root_;
  std::vector<double> cost_;
  double art_cost_ = 0.0;

  // Per-arc data: real arcs first, then one artificial arc per node.
  std::vector<double> flow_;
  std::vector<std::int8_t> state_;
  std::vector<int> art_source_, art_target_;

  // Per-node spanning tree data (node_num_ + 1 entries incl. root).
  std::vector<double> supply_;
  std::vector<double> pi_;
  std::vector<int> parent_, pred_, thread_, rev_thread_, succ_num_, last_succ_;
  std::vector<std::int8_t> pred_dir_;
  std::vector<int> dirty_revs_;

  // Pivot state.
  std::size_t block_size_, next_arc_ = 0;
  std::size_t in_arc_ = 0;
  int join_ = 0, u_in_ = 0, v_in_ = 0, u_out_ = 0, v_out_ = 0;
  double delta_ = 0.0;
  double pricing_tol_ = 0.0;
  std::size_t pivots_ = 0;
};

}  // namespace empot::detail
