#pragma once

// Primal network simplex for the balanced, uncapacitated transportation
// problem with integer supplies and real costs.
//
// Nodes: sources 0..m-1, sinks m..m+n-1 and an artificial root m+n. Arc
// (r, c) has id r*n + c and runs from source r to sink m + c; artificial arc
// m*n + v joins node v to the root (source -> root, root -> sink) with a
// big-M cost. The initial basis is the all-artificial star, which is strongly
// feasible; the leaving-arc rule keeps it so, which rules out cycling on
// degenerate pivots. Entering arcs come from block search over the real arcs
// (most negative reduced cost in a block, lowest id on ties). Potentials are
// accumulated in long double because they carry the big-M offset.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "conecd/error.hpp"

namespace conecd::detail {

struct TransportFlow {
  std::int64_t row;
  std::int64_t col;
  std::int64_t flow;
};

class TransportSimplex {
 public:
  /// cost is row-major m x n. supply and demand must have equal sums.
  TransportSimplex(std::vector<std::int64_t> supply, std::vector<std::int64_t> demand, std::vector<double> cost)
      : m_(static_cast<std::int64_t>(supply.size())),
        n_(static_cast<std::int64_t>(demand.size())),
        supply_(std::move(supply)),
        demand_(std::move(demand)),
        cost_(std::move(cost)) {
    if (m_ == 0 || n_ == 0) throw ValidationError("transport: empty marginal");
    if (static_cast<std::int64_t>(cost_.size()) != m_ * n_) throw ValidationError("transport: cost shape mismatch");
    std::int64_t a = 0, b = 0;
    for (auto s : supply_) {
      if (s <= 0) throw ValidationError("transport: supplies must be positive");
      a += s;
    }
    for (auto d : demand_) {
      if (d <= 0) throw ValidationError("transport: demands must be positive");
      b += d;
    }
    if (a != b) throw ValidationError("transport: unbalanced marginals");
    double max_cost = 0.0;
    for (double c : cost_) max_cost = std::max(max_cost, std::abs(c));
    eps_ = 1e-12 * std::max(1.0, max_cost);
    art_cost_ = (max_cost + 1.0) * static_cast<double>(m_ + n_ + 1);
  }

  std::vector<TransportFlow> solve() {
    init_star();
    rebuild_tree();
    const std::int64_t pivot_cap = 1000 * (m_ * n_ + m_ + n_) + 1000000;
    const std::int64_t arcs = m_ * n_;
    const std::int64_t block = std::max<std::int64_t>(16, static_cast<std::int64_t>(std::sqrt(static_cast<double>(arcs))));
    std::int64_t next = 0;
    for (;;) {
      // Block search pricing.
      std::int64_t best = -1;
      double best_rc = -eps_;
      std::int64_t scanned = 0;
      std::int64_t in_block = 0;
      while (scanned < arcs) {
        const std::int64_t a = next;
        next = next + 1 == arcs ? 0 : next + 1;
        ++scanned;
        ++in_block;
        if (!in_tree_[static_cast<std::size_t>(a)]) {
          const double rc = reduced_cost(a);
          if (rc < best_rc) {
            best_rc = rc;
            best = a;
          }
        }
        if (in_block == block) {
          if (best >= 0) break;
          in_block = 0;
        }
      }
      if (best < 0) break;
      pivot(best);
      if (++pivots_ > pivot_cap) throw std::logic_error("transport simplex: pivot limit exceeded");
    }
    std::vector<TransportFlow> out;
    for (std::int64_t a = 0; a < m_ * n_; ++a) {
      const auto f = flow_[static_cast<std::size_t>(a)];
      if (f > 0) out.push_back({a / n_, a % n_, f});
    }
    for (std::int64_t v = 0; v < m_ + n_; ++v)
      if (flow_[static_cast<std::size_t>(m_ * n_ + v)] != 0)
        throw std::logic_error("transport simplex: artificial flow left in optimal basis");
    std::sort(out.begin(), out.end(),
              [](const TransportFlow& x, const TransportFlow& y) { return x.row != y.row ? x.row < y.row : x.col < y.col; });
    return out;
  }

  std::int64_t pivots() const { return pivots_; }

 private:
  std::int64_t node_count() const { return m_ + n_ + 1; }
  std::int64_t root() const { return m_ + n_; }
  bool artificial(std::int64_t a) const { return a >= m_ * n_; }
  std::int64_t arc_source(std::int64_t a) const {
    if (!artificial(a)) return a / n_;
    const std::int64_t v = a - m_ * n_;
    return v < m_ ? v : root();
  }
  std::int64_t arc_target(std::int64_t a) const {
    if (!artificial(a)) return m_ + a % n_;
    const std::int64_t v = a - m_ * n_;
    return v < m_ ? root() : v;
  }
  double arc_cost(std::int64_t a) const { return artificial(a) ? art_cost_ : cost_[static_cast<std::size_t>(a)]; }
  double reduced_cost(std::int64_t a) const {
    return static_cast<double>(static_cast<long double>(cost_[static_cast<std::size_t>(a)]) +
                               pi_[static_cast<std::size_t>(arc_source(a))] -
                               pi_[static_cast<std::size_t>(arc_target(a))]);
  }

  void add_tree_arc(std::int64_t a) {
    in_tree_[static_cast<std::size_t>(a)] = 1;
    adj_[static_cast<std::size_t>(arc_source(a))].push_back(a);
    adj_[static_cast<std::size_t>(arc_target(a))].push_back(a);
  }

  void remove_tree_arc(std::int64_t a) {
    in_tree_[static_cast<std::size_t>(a)] = 0;
    for (std::int64_t v : {arc_source(a), arc_target(a)}) {
      auto& lst = adj_[static_cast<std::size_t>(v)];
      lst.erase(std::find(lst.begin(), lst.end(), a));
    }
  }

  void init_star() {
    const auto arcs = static_cast<std::size_t>(m_ * n_ + m_ + n_);
    flow_.assign(arcs, 0);
    in_tree_.assign(arcs, 0);
    adj_.assign(static_cast<std::size_t>(node_count()), {});
    for (std::int64_t v = 0; v < m_ + n_; ++v) {
      const std::int64_t id = m_ * n_ + v;
      flow_[static_cast<std::size_t>(id)] = v < m_ ? supply_[static_cast<std::size_t>(v)] : demand_[static_cast<std::size_t>(v - m_)];
      add_tree_arc(id);
    }
  }

  // Recomputes parent, depth, orientation and potentials from the root.
  void rebuild_tree() {
    const auto nodes = static_cast<std::size_t>(node_count());
    parent_.assign(nodes, -1);
    pred_.assign(nodes, -1);
    up_.assign(nodes, 0);
    depth_.assign(nodes, 0);
    pi_.assign(nodes, 0.0L);
    queue_.clear();
    queue_.push_back(root());
    parent_[static_cast<std::size_t>(root())] = root();
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const std::int64_t p = queue_[head];
      for (std::int64_t a : adj_[static_cast<std::size_t>(p)]) {
        if (a == pred_[static_cast<std::size_t>(p)]) continue;
        const bool p_is_source = arc_source(a) == p;
        const std::int64_t x = p_is_source ? arc_target(a) : arc_source(a);
        const auto xs = static_cast<std::size_t>(x);
        parent_[xs] = p;
        pred_[xs] = a;
        up_[xs] = p_is_source ? 0 : 1;  // up: arc runs x -> parent
        depth_[xs] = depth_[static_cast<std::size_t>(p)] + 1;
        const long double c = arc_cost(a);
        pi_[xs] = up_[xs] ? pi_[static_cast<std::size_t>(p)] - c : pi_[static_cast<std::size_t>(p)] + c;
        queue_.push_back(x);
      }
    }
    if (static_cast<std::int64_t>(queue_.size()) != node_count())
      throw std::logic_error("transport simplex: basis is not a spanning tree");
  }

  void pivot(std::int64_t entering) {
    const std::int64_t first = arc_source(entering);
    const std::int64_t second = arc_target(entering);
    std::int64_t u = first, v = second;
    while (u != v) {
      if (depth_[static_cast<std::size_t>(u)] >= depth_[static_cast<std::size_t>(v)])
        u = parent_[static_cast<std::size_t>(u)];
      else
        v = parent_[static_cast<std::size_t>(v)];
    }
    const std::int64_t join = u;

    // Flow is pushed along entering: first -> second -> ... -> join -> ... -> first.
    // On the first side arcs are traversed parent -> child, on the second side
    // child -> parent; an arc decreases when traversed against its orientation.
    constexpr std::int64_t kInf = INT64_MAX;
    std::int64_t delta = kInf;
    std::int64_t out_node = -1;
    for (std::int64_t x = first; x != join; x = parent_[static_cast<std::size_t>(x)]) {
      const auto xs = static_cast<std::size_t>(x);
      if (up_[xs]) {
        const std::int64_t d = flow_[static_cast<std::size_t>(pred_[xs])];
        if (d < delta) {
          delta = d;
          out_node = x;
        }
      }
    }
    for (std::int64_t x = second; x != join; x = parent_[static_cast<std::size_t>(x)]) {
      const auto xs = static_cast<std::size_t>(x);
      if (!up_[xs]) {
        const std::int64_t d = flow_[static_cast<std::size_t>(pred_[xs])];
        if (d <= delta) {
          delta = d;
          out_node = x;
        }
      }
    }
    if (out_node < 0) throw std::logic_error("transport simplex: unbounded pivot");

    if (delta > 0) {
      flow_[static_cast<std::size_t>(entering)] += delta;
      for (std::int64_t x = first; x != join; x = parent_[static_cast<std::size_t>(x)]) {
        const auto xs = static_cast<std::size_t>(x);
        flow_[static_cast<std::size_t>(pred_[xs])] += up_[xs] ? -delta : delta;
      }
      for (std::int64_t x = second; x != join; x = parent_[static_cast<std::size_t>(x)]) {
        const auto xs = static_cast<std::size_t>(x);
        flow_[static_cast<std::size_t>(pred_[xs])] += up_[xs] ? delta : -delta;
      }
    }
    remove_tree_arc(pred_[static_cast<std::size_t>(out_node)]);
    add_tree_arc(entering);
    rebuild_tree();
  }

  std::int64_t m_, n_;
  std::vector<std::int64_t> supply_, demand_;
  std::vector<double> cost_;
  double eps_ = 0.0;

  std::vector<std::int64_t> flow_;
  std::vector<char> in_tree_;
  std::vector<std::vector<std::int64_t>> adj_;
  std::vector<std::int64_t> parent_, pred_, depth_, queue_;
  std::vector<char> up_;
  std::vector<long double> pi_;
  double art_cost_ = 0.0;
  std::int64_t pivots_ = 0;
};

}  // namespace conecd::detail
