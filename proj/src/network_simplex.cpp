#include "network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "empot/error.hpp"

namespace empot::detail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TransportSimplex::TransportSimplex(std::vector<double> supply, std::vector<double> demand,
                                   std::vector<double> cost)
    : m_(supply.size()), n_(demand.size()), cost_(std::move(cost)) {
  require(m_ > 0 && n_ > 0, "transport problem needs at least one source and one target");
  require(cost_.size() == m_ * n_, "cost matrix has the wrong size");

  node_num_ = static_cast<int>(m_ + n_);
  root_ = node_num_;
  arc_num_ = m_ * n_;
  all_arc_num_ = arc_num_ + static_cast<std::size_t>(node_num_);

  double max_cost = 0.0;
  for (double c : cost_) max_cost = std::max(max_cost, c);
  // A direct arc i->j always exists, so any artificial cost above the largest
  // real cost drives artificial flow to zero. Keeping it small keeps the
  // potentials O(max cost) and the pricing arithmetic well conditioned.
  art_cost_ = max_cost + 1.0;
  pricing_tol_ = 1e-13 * art_cost_;

  flow_.assign(all_arc_num_, 0.0);
  state_.assign(all_arc_num_, kStateLower);
  art_source_.assign(node_num_, 0);
  art_target_.assign(node_num_, 0);

  const std::size_t nodes = static_cast<std::size_t>(node_num_) + 1;
  supply_.assign(nodes, 0.0);
  double sum_supply = 0.0;
  for (std::size_t i = 0; i < m_; ++i) {
    supply_[i] = supply[i];
    sum_supply += supply[i];
  }
  for (std::size_t j = 0; j < n_; ++j) {
    supply_[m_ + j] = -demand[j];
    sum_supply -= demand[j];
  }
  supply_[root_] = -sum_supply;

  pi_.assign(nodes, 0.0);
  parent_.assign(nodes, -1);
  pred_.assign(nodes, -1);
  thread_.assign(nodes, 0);
  rev_thread_.assign(nodes, 0);
  succ_num_.assign(nodes, 0);
  last_succ_.assign(nodes, 0);
  pred_dir_.assign(nodes, kDirUp);

  block_size_ = std::max<std::size_t>(
      static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(arc_num_)))), 10);

  parent_[root_] = -1;
  pred_[root_] = -1;
  thread_[root_] = 0;
  rev_thread_[0] = root_;
  succ_num_[root_] = node_num_ + 1;
  last_succ_[root_] = root_ - 1;
  pi_[root_] = 0.0;

  for (int u = 0; u < node_num_; ++u) {
    const std::size_t e = arc_num_ + static_cast<std::size_t>(u);
    parent_[u] = root_;
    pred_[u] = static_cast<int>(e);
    thread_[u] = u + 1;
    rev_thread_[u + 1] = u;
    succ_num_[u] = 1;
    last_succ_[u] = u;
    state_[e] = kStateTree;
    if (supply_[u] >= 0.0) {
      pred_dir_[u] = kDirUp;
      pi_[u] = 0.0;
      art_source_[u] = u;
      art_target_[u] = root_;
      flow_[e] = supply_[u];
    } else {
      pred_dir_[u] = kDirDown;
      pi_[u] = art_cost_;
      art_source_[u] = root_;
      art_target_[u] = u;
      flow_[e] = -supply_[u];
    }
  }
}

double TransportSimplex::arc_cost(std::size_t e) const {
  if (e < arc_num_) return cost_[e];
  return art_source_[e - arc_num_] == root_ ? art_cost_ : 0.0;
}

int TransportSimplex::arc_source(std::size_t e) const {
  if (e < arc_num_) return static_cast<int>(e / n_);
  return art_source_[e - arc_num_];
}

int TransportSimplex::arc_target(std::size_t e) const {
  if (e < arc_num_) return static_cast<int>(m_ + e % n_);
  return art_target_[e - arc_num_];
}

bool TransportSimplex::find_entering_arc() {
  double best = 0.0;
  std::size_t cnt = block_size_;
  std::size_t e = next_arc_;
  std::size_t i = e / n_, j = e % n_;
  const double* pi_rows = pi_.data();
  const double* pi_cols = pi_.data() + m_;

  auto scan = [&](std::size_t end) -> bool {
    for (; e < end; ++e) {
      if (state_[e] == kStateLower) {
        const double c = cost_[e] + pi_rows[i] - pi_cols[j];
        if (c < best) {
          best = c;
          in_arc_ = e;
        }
      }
      if (++j == n_) {
        j = 0;
        ++i;
      }
      if (--cnt == 0) {
        if (best < -pricing_tol_) return true;
        cnt = block_size_;
      }
    }
    return false;
  };

  if (scan(arc_num_)) {
    next_arc_ = e;
    return true;
  }
  const std::size_t stop = next_arc_;
  e = 0;
  i = 0;
  j = 0;
  if (scan(stop)) {
    next_arc_ = e;
    return true;
  }
  if (best >= -pricing_tol_) return false;
  next_arc_ = e;
  return true;
}

void TransportSimplex::find_join_node() {
  int u = arc_source(in_arc_);
  int v = arc_target(in_arc_);
  while (u != v) {
    if (succ_num_[u] < succ_num_[v]) {
      u = parent_[u];
    } else {
      v = parent_[v];
    }
  }
  join_ = u;
}

bool TransportSimplex::find_leaving_arc() {
  // Entering arcs are always at their lower bound (no finite capacities), so
  // flow is pushed from source to target along the entering arc.
  const int first = arc_source(in_arc_);
  const int second = arc_target(in_arc_);
  delta_ = kInf;
  int result = 0;

  for (int u = first; u != join_; u = parent_[u]) {
    if (pred_dir_[u] == kDirUp) {
      const double d = flow_[pred_[u]];
      if (d < delta_) {
        delta_ = d;
        u_out_ = u;
        result = 1;
      }
    }
  }
  for (int u = second; u != join_; u = parent_[u]) {
    if (pred_dir_[u] == kDirDown) {
      const double d = flow_[pred_[u]];
      if (d <= delta_) {
        delta_ = d;
        u_out_ = u;
        result = 2;
      }
    }
  }

  if (result == 1) {
    u_in_ = first;
    v_in_ = second;
  } else {
    u_in_ = second;
    v_in_ = first;
  }
  return result != 0;
}

void TransportSimplex::change_flow() {
  if (delta_ > 0.0) {
    const double val = delta_;
    flow_[in_arc_] += val;
    for (int u = arc_source(in_arc_); u != join_; u = parent_[u]) {
      flow_[pred_[u]] -= pred_dir_[u] * val;
    }
    for (int u = arc_target(in_arc_); u != join_; u = parent_[u]) {
      flow_[pred_[u]] += pred_dir_[u] * val;
    }
  }
  state_[in_arc_] = kStateTree;
  state_[pred_[u_out_]] = kStateLower;
  flow_[pred_[u_out_]] = 0.0;
}

void TransportSimplex::update_tree_structure() {
  const int old_rev_thread = rev_thread_[u_out_];
  const int old_succ_num = succ_num_[u_out_];
  const int old_last_succ = last_succ_[u_out_];
  v_out_ = parent_[u_out_];
  const int in_arc = static_cast<int>(in_arc_);

  if (u_in_ == u_out_) {
    parent_[u_in_] = v_in_;
    pred_[u_in_] = in_arc;
    pred_dir_[u_in_] = u_in_ == arc_source(in_arc_) ? kDirUp : kDirDown;

    if (thread_[v_in_] != u_out_) {
      int after = thread_[old_last_succ];
      thread_[old_rev_thread] = after;
      rev_thread_[after] = old_rev_thread;
      after = thread_[v_in_];
      thread_[v_in_] = u_out_;
      rev_thread_[u_out_] = v_in_;
      thread_[old_last_succ] = after;
      rev_thread_[after] = old_last_succ;
    }
  } else {
    // When old_rev_thread == v_in, join and v_out coincide.
    const int thread_continue =
        old_rev_thread == v_in_ ? thread_[old_last_succ] : thread_[v_in_];

    // Re-hang the stem (the path u_in .. u_out) below v_in.
    int stem = u_in_;
    int par_stem = v_in_;
    int next_stem;
    int last = last_succ_[u_in_];
    int before, after = thread_[last];
    thread_[v_in_] = u_in_;
    dirty_revs_.clear();
    dirty_revs_.push_back(v_in_);
    while (stem != u_out_) {
      next_stem = parent_[stem];
      thread_[last] = next_stem;
      dirty_revs_.push_back(last);

      before = rev_thread_[stem];
      thread_[before] = after;
      rev_thread_[after] = before;

      parent_[stem] = par_stem;
      par_stem = stem;
      stem = next_stem;

      last = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem]
                                                      : last_succ_[stem];
      after = thread_[last];
    }
    parent_[u_out_] = par_stem;
    thread_[last] = thread_continue;
    rev_thread_[thread_continue] = last;
    last_succ_[u_out_] = last;

    if (old_rev_thread != v_in_) {
      thread_[old_rev_thread] = after;
      rev_thread_[after] = old_rev_thread;
    }

    for (int u : dirty_revs_) rev_thread_[thread_[u]] = u;

    int tmp_sc = 0;
    const int tmp_ls = last_succ_[u_out_];
    for (int u = u_out_, p = parent_[u]; u != u_in_; u = p, p = parent_[u]) {
      pred_[u] = pred_[p];
      pred_dir_[u] = static_cast<std::int8_t>(-pred_dir_[p]);
      tmp_sc += succ_num_[u] - succ_num_[p];
      succ_num_[u] = tmp_sc;
      last_succ_[p] = tmp_ls;
    }
    pred_[u_in_] = in_arc;
    pred_dir_[u_in_] = u_in_ == arc_source(in_arc_) ? kDirUp : kDirDown;
    succ_num_[u_in_] = old_succ_num;
  }

  const int up_limit_out = last_succ_[join_] == v_in_ ? join_ : -1;
  const int last_succ_out = last_succ_[u_out_];
  for (int u = v_in_; u != -1 && last_succ_[u] == v_in_; u = parent_[u]) {
    last_succ_[u] = last_succ_out;
  }

  if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
    for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ;
         u = parent_[u]) {
      last_succ_[u] = old_rev_thread;
    }
  } else if (last_succ_out != old_last_succ) {
    for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ;
         u = parent_[u]) {
      last_succ_[u] = last_succ_out;
    }
  }

  for (int u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
  for (int u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
}

void TransportSimplex::update_potential() {
  const double sigma = pi_[v_in_] - pi_[u_in_] - pred_dir_[u_in_] * arc_cost(in_arc_);
  const int end = thread_[last_succ_[u_in_]];
  for (int u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
}

bool TransportSimplex::run(std::size_t max_pivots) {
  while (find_entering_arc()) {
    find_join_node();
    if (!find_leaving_arc()) fail(ErrorCode::solver, "network simplex: unbounded cycle");
    change_flow();
    update_tree_structure();
    update_potential();
    ++pivots_;
    if (max_pivots != 0 && pivots_ >= max_pivots) return false;
  }

  // Rebuild potentials from the final tree so incremental drift does not
  // leak into the dual certificate.
  pi_[root_] = 0.0;
  for (int u = thread_[root_]; u != root_; u = thread_[u]) {
    const int p = parent_[u];
    const double c = arc_cost(static_cast<std::size_t>(pred_[u]));
    pi_[u] = pred_dir_[u] == kDirUp ? pi_[p] - c : pi_[p] + c;
  }
  return true;
}

}  // namespace empot::detail
