#pragma once

// Least-squares regression tree (CART) used as the boosting base learner.
//
// Growth is level by level. For every open node the split minimising the sum
// of squared errors of the two children is chosen over all features and all
// midpoints between consecutive distinct values. Equal gains resolve to the
// lowest feature index, then the lowest threshold. Rows with
// x[feature] <= threshold go left.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "flightgb/error.hpp"
#include "flightgb/matrix.hpp"
#include "flightgb/parallel.hpp"

namespace flightgb {

struct TreeParams {
  std::size_t max_depth = 3;  // root is depth 0
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;

  void validate() const {
    if (min_samples_split < 2) throw Error(Errc::InvalidArgument, "min_samples_split must be >= 2");
    if (min_samples_leaf < 1) throw Error(Errc::InvalidArgument, "min_samples_leaf must be >= 1");
  }

  friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  double value = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class RegressionTree {
 public:
  RegressionTree() = default;
  RegressionTree(std::vector<TreeNode> nodes, std::size_t n_features)
      : nodes_(std::move(nodes)), n_features_(n_features) {}

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t n_features() const noexcept { return n_features_; }

  std::size_t leaf_index(std::span<const double> x) const {
    if (x.size() != n_features_)
      throw Error(Errc::DimensionMismatch, "tree expects " + std::to_string(n_features_) +
                                               " features, got " + std::to_string(x.size()));
    std::size_t i = 0;
    while (!nodes_[i].is_leaf())
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(nodes_[i].feature)] <= nodes_[i].threshold
                                       ? nodes_[i].left
                                       : nodes_[i].right);
    return i;
  }

  double predict(std::span<const double> x) const { return nodes_[leaf_index(x)].value; }

  std::size_t depth() const {
    std::vector<std::size_t> d(nodes_.size(), 0);
    std::size_t best = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      best = std::max(best, d[i]);
      if (!nodes_[i].is_leaf()) {
        d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
        d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
      }
    }
    return best;
  }

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
  }

  /// Training rows that reached each leaf (ascending), available after a fit
  /// until release_samples(). Empty for internal nodes.
  std::span<const std::uint32_t> samples(std::size_t node) const {
    if (node >= samples_.size()) return {};
    return samples_[node];
  }

  void set_leaf_value(std::size_t node, double value) { nodes_[node].value = value; }

  void release_samples() { std::vector<std::vector<std::uint32_t>>().swap(samples_); }

  /// Structural validation used when trees come from outside (model files).
  bool well_formed() const {
    if (nodes_.empty()) return false;
    const auto n = static_cast<std::int64_t>(nodes_.size());
    for (std::int64_t i = 0; i < n; ++i) {
      const auto& nd = nodes_[static_cast<std::size_t>(i)];
      if (!std::isfinite(nd.value)) return false;
      if (nd.is_leaf()) continue;
      if (static_cast<std::size_t>(nd.feature) >= n_features_) return false;
      if (!std::isfinite(nd.threshold)) return false;
      // children always come after their parent, which rules out cycles
      if (nd.left <= i || nd.right <= i || nd.left >= n || nd.right >= n || nd.left == nd.right)
        return false;
    }
    return true;
  }

  friend bool operator==(const RegressionTree& a, const RegressionTree& b) {
    return a.n_features_ == b.n_features_ && a.nodes_ == b.nodes_;
  }

 private:
  friend class TreeBuilder;
  std::vector<TreeNode> nodes_;
  std::size_t n_features_ = 0;
  std::vector<std::vector<std::uint32_t>> samples_;
};

/// Row indices of each feature column sorted by (value, row).
struct SortedColumns {
  std::vector<std::vector<std::uint32_t>> order;

  explicit SortedColumns(const Matrix& X) : order(X.cols()) {
    for (std::size_t f = 0; f < X.cols(); ++f) {
      auto& o = order[f];
      o.resize(X.rows());
      std::iota(o.begin(), o.end(), std::uint32_t{0});
      std::stable_sort(o.begin(), o.end(),
                       [&](std::uint32_t a, std::uint32_t b) { return X(a, f) < X(b, f); });
    }
  }
};

inline double split_midpoint(double lo, double hi) noexcept {
  double mid = lo / 2.0 + hi / 2.0;
  if (!(mid < hi)) mid = lo;  // adjacent doubles: keep hi on the right
  return mid;
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, const SortedColumns& sorted, std::span<const double> targets,
              const TreeParams& params, std::size_t threads)
      : X_(X), sorted_(sorted), y_(targets), params_(params), threads_(threads) {}

  RegressionTree build() {
    const std::size_t n = X_.rows();
    RegressionTree tree;
    tree.n_features_ = X_.cols();
    node_of_.assign(n, 0);
    std::vector<std::uint32_t> all(n);
    std::iota(all.begin(), all.end(), std::uint32_t{0});
    add_node(tree, std::move(all), 0);

    std::vector<std::size_t> frontier;
    if (splittable(0)) frontier.push_back(0);
    std::vector<double> centered(n, 0.0);

    while (!frontier.empty()) {
      const std::size_t F = frontier.size();
      std::vector<std::int32_t> slot_of(info_.size(), -1);
      std::vector<double> total(F, 0.0), sse(F, 0.0);
      for (std::size_t s = 0; s < F; ++s) {
        const std::size_t nd = frontier[s];
        slot_of[nd] = static_cast<std::int32_t>(s);
        for (auto i : tree.samples_[nd]) {
          const double c = y_[i] - info_[nd].mean;
          centered[i] = c;
          total[s] += c;
          sse[s] += c * c;
        }
      }

      // best candidate per (feature, slot)
      const std::size_t d = X_.cols();
      std::vector<Candidate> cand(d * F);
      parallel_for(d, threads_, [&](std::size_t f) {
        scan_feature(f, frontier, slot_of, centered, total, std::span(cand).subspan(f * F, F));
      });

      std::vector<std::size_t> next;
      for (std::size_t s = 0; s < F; ++s) {
        Candidate best;
        for (std::size_t f = 0; f < d; ++f)
          if (cand[f * F + s].gain > best.gain) best = cand[f * F + s];
        if (!(best.gain > 1e-12 * sse[s]) || best.feature < 0) continue;
        const std::size_t nd = frontier[s];
        split(tree, nd, best);
        for (auto child : {tree.nodes_[nd].left, tree.nodes_[nd].right})
          if (splittable(static_cast<std::size_t>(child))) next.push_back(static_cast<std::size_t>(child));
      }
      frontier = std::move(next);
    }
    return tree;
  }

 private:
  struct NodeInfo {
    double mean = 0.0;
    std::size_t depth = 0;
    bool varies = false;
  };

  struct Candidate {
    double gain = 0.0;
    double threshold = 0.0;
    std::int32_t feature = -1;
  };

  void add_node(RegressionTree& tree, std::vector<std::uint32_t> rows, std::size_t depth) {
    double sum = 0.0;
    for (auto i : rows) sum += y_[i];
    NodeInfo info;
    info.depth = depth;
    info.mean = sum / static_cast<double>(rows.size());
    for (auto i : rows)
      if (y_[i] != y_[rows.front()]) {
        info.varies = true;
        break;
      }
    count_.push_back(rows.size());
    TreeNode node;
    node.value = info.mean;
    tree.nodes_.push_back(node);
    tree.samples_.push_back(std::move(rows));
    info_.push_back(info);
  }

  bool splittable(std::size_t nd) const {
    const auto& info = info_[nd];
    const std::size_t count = count_[nd];
    return info.depth < params_.max_depth && count >= params_.min_samples_split &&
           count >= 2 * params_.min_samples_leaf && info.varies;
  }

  void scan_feature(std::size_t f, const std::vector<std::size_t>& frontier,
                    const std::vector<std::int32_t>& slot_of, const std::vector<double>& centered,
                    const std::vector<double>& total, std::span<Candidate> out) const {
    const std::size_t F = frontier.size();
    std::vector<std::size_t> left_count(F, 0);
    std::vector<double> left_sum(F, 0.0);
    std::vector<double> last(F, 0.0);
    const std::size_t min_leaf = params_.min_samples_leaf;
    for (auto i : sorted_.order[f]) {
      const std::int32_t s_raw = slot_of[node_of_[i]];
      if (s_raw < 0) continue;
      const auto s = static_cast<std::size_t>(s_raw);
      const double v = X_(i, f);
      const std::size_t nl = left_count[s];
      if (nl > 0 && v > last[s]) {
        const std::size_t count = count_[frontier[s]];
        const std::size_t nr = count - nl;
        if (nl >= min_leaf && nr >= min_leaf) {
          const double sl = left_sum[s];
          const double sr = total[s] - sl;
          const double gain = sl * sl / static_cast<double>(nl) + sr * sr / static_cast<double>(nr) -
                              total[s] * total[s] / static_cast<double>(count);
          if (gain > out[s].gain)
            out[s] = {gain, split_midpoint(last[s], v), static_cast<std::int32_t>(f)};
        }
      }
      ++left_count[s];
      left_sum[s] += centered[i];
      last[s] = v;
    }
  }

  void split(RegressionTree& tree, std::size_t nd, const Candidate& c) {
    std::vector<std::uint32_t> left, right;
    const auto f = static_cast<std::size_t>(c.feature);
    for (auto i : tree.samples_[nd]) (X_(i, f) <= c.threshold ? left : right).push_back(i);
    std::vector<std::uint32_t>().swap(tree.samples_[nd]);
    tree.nodes_[nd].feature = c.feature;
    tree.nodes_[nd].threshold = c.threshold;
    const std::size_t depth = info_[nd].depth + 1;
    const auto li = static_cast<std::int32_t>(tree.nodes_.size());
    for (auto i : left) node_of_[i] = static_cast<std::uint32_t>(li);
    for (auto i : right) node_of_[i] = static_cast<std::uint32_t>(li + 1);
    add_node(tree, std::move(left), depth);
    add_node(tree, std::move(right), depth);
    tree.nodes_[nd].left = li;
    tree.nodes_[nd].right = li + 1;
  }

  const Matrix& X_;
  const SortedColumns& sorted_;
  std::span<const double> y_;
  TreeParams params_;
  std::size_t threads_;
  std::vector<std::uint32_t> node_of_;
  std::vector<NodeInfo> info_;
  std::vector<std::size_t> count_;
};

inline void check_fit_inputs(const Matrix& X, std::span<const double> targets) {
  if (X.rows() == 0) throw Error(Errc::EmptyInput, "cannot fit a tree on zero rows");
  if (targets.size() != X.rows())
    throw Error(Errc::DimensionMismatch, "target length differs from row count");
  for (double t : targets)
    if (!std::isfinite(t)) throw Error(Errc::NonFiniteTarget, "tree targets must be finite");
}

/// Fit with precomputed column orders (reused across boosting iterations).
inline RegressionTree fit_tree(const Matrix& X, const SortedColumns& sorted,
                               std::span<const double> targets, const TreeParams& params,
                               std::size_t threads = 1) {
  params.validate();
  check_fit_inputs(X, targets);
  return TreeBuilder(X, sorted, targets, params, threads).build();
}

inline RegressionTree fit_tree(const Matrix& X, std::span<const double> targets,
                               const TreeParams& params, std::size_t threads = 1) {
  params.validate();
  check_fit_inputs(X, targets);
  for (double v : X.data())
    if (!std::isfinite(v)) throw Error(Errc::NonFiniteFeature, "tree features must be finite");
  const SortedColumns sorted(X);
  return TreeBuilder(X, sorted, targets, params, threads).build();
}

}  // namespace flightgb
