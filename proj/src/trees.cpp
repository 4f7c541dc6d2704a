// SPDX-License-Identifier: Apache-2.0
#include "firepower/trees.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "serialize.hpp"

namespace firepower {

FeatureMatrix FeatureMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  FeatureMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) {
      throw Error(ErrorKind::kDimensionMismatch, "feature rows have different lengths");
    }
    std::copy(rows[r].begin(), rows[r].end(), m.data_.begin() + static_cast<long>(r * m.cols()));
  }
  return m;
}

void GbtHyperparams::validate() const {
  if (n_estimators < 1) throw Error(ErrorKind::kInvalidArgument, "n_estimators must be >= 1");
  if (max_depth < 1) throw Error(ErrorKind::kInvalidArgument, "max_depth must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "learning_rate must be in (0, 1]");
  }
  if (min_samples_leaf < 1) {
    throw Error(ErrorKind::kInvalidArgument, "min_samples_leaf must be >= 1");
  }
  if (!(l2_leaf_reg >= 0.0) || !std::isfinite(l2_leaf_reg)) {
    throw Error(ErrorKind::kInvalidArgument, "l2_leaf_reg must be >= 0");
  }
}

double RegressionTree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? i + 1
                                                              : static_cast<std::size_t>(n.right);
  }
  return nodes_[i].value;
}

int RegressionTree::depth() const {
  std::function<int(std::size_t)> walk = [&](std::size_t i) -> int {
    if (nodes_[i].is_leaf()) return 0;
    return 1 + std::max(walk(i + 1), walk(static_cast<std::size_t>(nodes_[i].right)));
  };
  return nodes_.empty() ? 0 : walk(0);
}

namespace {

// Grows one tree on the current residuals. Leaf weights are
// sum(r) / (count + lambda); a split's gain is the reduction of the
// L2-regularized squared error, which is the plain SSE reduction at lambda 0.
class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& X, const std::vector<double>& residual,
              const GbtHyperparams& hp, std::vector<double>& gains,
              std::vector<double>& row_output)
      : X_(X), r_(residual), hp_(hp), gains_(gains), out_(row_output) {}

  RegressionTree build() {
    std::vector<std::size_t> idx(X_.rows());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    grow(idx, 0);
    return RegressionTree(std::move(nodes_));
  }

 private:
  double score(double sum, std::size_t n) const {
    return sum * sum / (static_cast<double>(n) + hp_.l2_leaf_reg);
  }

  void grow(std::vector<std::size_t>& idx, int depth) {
    const std::size_t n = idx.size();
    double sum = 0.0;
    for (auto i : idx) sum += r_[i];

    const auto min_leaf = static_cast<std::size_t>(hp_.min_samples_leaf);
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_gain = kMinSplitGain;
    if (depth < hp_.max_depth && n >= 2 * min_leaf) {
      const double parent = score(sum, n);
      std::vector<std::size_t> order(idx);
      for (std::size_t f = 0; f < X_.cols(); ++f) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          const double va = X_.at(a, f);
          const double vb = X_.at(b, f);
          return va < vb || (va == vb && a < b);
        });
        double left = 0.0;
        for (std::size_t k = 1; k < n; ++k) {
          left += r_[order[k - 1]];
          const double lo = X_.at(order[k - 1], f);
          const double hi = X_.at(order[k], f);
          if (lo == hi || k < min_leaf || n - k < min_leaf) continue;
          const double gain = score(left, k) + score(sum - left, n - k) - parent;
          // Strict comparison keeps the lowest feature, then lowest threshold.
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = static_cast<int>(f);
            best_threshold = lo + (hi - lo) / 2.0;
          }
        }
      }
    }

    if (best_feature < 0) {
      TreeNode leaf;
      // A leaf whose SSE reduction is below the split floor only adds rounding
      // noise, so it stays at zero.
      if (score(sum, n) >= kMinSplitGain) leaf.value = sum / (static_cast<double>(n) + hp_.l2_leaf_reg);
      for (auto i : idx) out_[i] = leaf.value;
      nodes_.push_back(leaf);
      return;
    }

    gains_[static_cast<std::size_t>(best_feature)] += best_gain;
    const std::size_t self = nodes_.size();
    nodes_.push_back({best_feature, best_threshold, 0.0, -1});

    std::vector<std::size_t> left_idx;
    std::vector<std::size_t> right_idx;
    for (auto i : idx) {
      (X_.at(i, static_cast<std::size_t>(best_feature)) <= best_threshold ? left_idx : right_idx)
          .push_back(i);
    }
    grow(left_idx, depth + 1);
    nodes_[self].right = static_cast<int>(nodes_.size());
    grow(right_idx, depth + 1);
  }

  const FeatureMatrix& X_;
  const std::vector<double>& r_;
  const GbtHyperparams& hp_;
  std::vector<double>& gains_;
  std::vector<double>& out_;
  std::vector<TreeNode> nodes_;
};

double sse(std::span<const double> y, const std::vector<double>& pred) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - pred[i]) * (y[i] - pred[i]);
  return s;
}

}  // namespace

GbtModel fit_gbt(const FeatureMatrix& X, std::span<const double> y, const GbtHyperparams& hp,
                 FitTrace* trace) {
  hp.validate();
  if (X.rows() == 0 || y.empty()) throw Error(ErrorKind::kInvalidArgument, "fit_gbt: empty input");
  if (X.cols() == 0) throw Error(ErrorKind::kInvalidArgument, "fit_gbt: no features");
  if (X.rows() != y.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "fit_gbt: X and y row counts differ");
  }
  for (std::size_t r = 0; r < X.rows(); ++r) {
    for (double v : X.row(r)) {
      if (!std::isfinite(v)) throw Error(ErrorKind::kInvalidArgument, "fit_gbt: non-finite feature");
    }
    if (!std::isfinite(y[r])) throw Error(ErrorKind::kInvalidArgument, "fit_gbt: non-finite target");
  }

  GbtModel m;
  m.hyperparams = hp;
  m.feature_count = X.cols();
  m.cumulative_gain.assign(X.cols(), 0.0);
  m.base_prediction = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());

  std::vector<double> pred(y.size(), m.base_prediction);
  std::vector<double> residual(y.size());
  std::vector<double> row_output(y.size());
  if (trace) trace->sse_per_round = {sse(y, pred)};
  m.trees.reserve(static_cast<std::size_t>(hp.n_estimators));
  for (int t = 0; t < hp.n_estimators; ++t) {
    for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - pred[i];
    TreeBuilder builder(X, residual, hp, m.cumulative_gain, row_output);
    m.trees.push_back(builder.build());
    for (std::size_t i = 0; i < y.size(); ++i) pred[i] += hp.learning_rate * row_output[i];
    if (trace) trace->sse_per_round.push_back(sse(y, pred));
  }
  if (trace) trace->training_predictions = pred;
  return m;
}

double predict_gbt(const GbtModel& m, std::span<const double> x) {
  if (x.size() != m.feature_count) {
    throw Error(ErrorKind::kDimensionMismatch,
                "predict_gbt: expected " + std::to_string(m.feature_count) + " features, got " +
                    std::to_string(x.size()));
  }
  // Same accumulation order as training so training rows reproduce exactly.
  double acc = m.base_prediction;
  for (const auto& tree : m.trees) acc += m.hyperparams.learning_rate * tree.predict(x);
  return acc;
}

double total_gain(const GbtModel& m) {
  return std::accumulate(m.cumulative_gain.begin(), m.cumulative_gain.end(), 0.0);
}

std::vector<double> feature_importance(const GbtModel& m) {
  const double total = total_gain(m);
  const std::size_t d = m.cumulative_gain.size();
  if (d == 0) return {};
  if (!(total > 0.0)) return std::vector<double>(d, 1.0 / static_cast<double>(d));
  std::vector<double> imp(d);
  for (std::size_t j = 0; j < d; ++j) imp[j] = m.cumulative_gain[j] / total;
  return imp;
}

LinearModel fit_linear_one_feature(std::span<const double> x, std::span<const double> y,
                                   int feature_index) {
  if (x.empty()) throw Error(ErrorKind::kInvalidArgument, "fit_linear: empty input");
  if (x.size() != y.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "fit_linear: x and y lengths differ");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw Error(ErrorKind::kInvalidArgument, "fit_linear: non-finite value");
    }
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;

  LinearModel m;
  m.feature_index = feature_index;
  const bool flat = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
  if (flat) {
    m.is_constant = true;
    m.intercept = my;
    return m;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  m.slope = sxy / sxx;
  m.intercept = my - m.slope * mx;
  return m;
}

double predict_linear(const LinearModel& m, double x) { return m.slope * x + m.intercept; }

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

json hyperparams_to_json(const GbtHyperparams& hp) {
  return {{"n_estimators", hp.n_estimators},
          {"max_depth", hp.max_depth},
          {"learning_rate", hp.learning_rate},
          {"min_samples_leaf", hp.min_samples_leaf},
          {"l2_leaf_reg", hp.l2_leaf_reg}};
}

GbtHyperparams hyperparams_from_json(const json& j) {
  reject_unknown_keys(j, {"n_estimators", "max_depth", "learning_rate", "min_samples_leaf",
                          "l2_leaf_reg"},
                      "hyperparams");
  GbtHyperparams hp;
  hp.n_estimators = static_cast<int>(require_number(j, "n_estimators", "hyperparams"));
  hp.max_depth = static_cast<int>(require_number(j, "max_depth", "hyperparams"));
  hp.learning_rate = require_number(j, "learning_rate", "hyperparams");
  hp.min_samples_leaf = static_cast<int>(require_number(j, "min_samples_leaf", "hyperparams"));
  hp.l2_leaf_reg = require_number(j, "l2_leaf_reg", "hyperparams");
  hp.validate();
  return hp;
}

json gbt_to_json(const GbtModel& m) {
  json trees = json::array();
  for (const auto& t : m.trees) {
    json nodes = json::array();
    for (const auto& n : t.nodes()) {
      if (n.is_leaf()) {
        nodes.push_back({{"leaf", n.value}});
      } else {
        nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}});
      }
    }
    trees.push_back(std::move(nodes));
  }
  return {{"hyperparams", hyperparams_to_json(m.hyperparams)},
          {"base_prediction", m.base_prediction},
          {"feature_count", m.feature_count},
          {"cumulative_gain", m.cumulative_gain},
          {"trees", std::move(trees)}};
}

namespace {

// Rebuilds right-child links from a preorder node list.
std::size_t link_preorder(std::vector<TreeNode>& nodes, std::size_t i, std::size_t feature_count) {
  if (i >= nodes.size()) throw Error(ErrorKind::kSchema, "tree: truncated preorder node list");
  if (nodes[i].is_leaf()) return i + 1;
  if (static_cast<std::size_t>(nodes[i].feature) >= feature_count) {
    throw Error(ErrorKind::kSchema, "tree: feature index out of range");
  }
  const std::size_t right = link_preorder(nodes, i + 1, feature_count);
  nodes[i].right = static_cast<int>(right);
  return link_preorder(nodes, right, feature_count);
}

}  // namespace

GbtModel gbt_from_json(const json& j) {
  reject_unknown_keys(j, {"hyperparams", "base_prediction", "feature_count", "cumulative_gain",
                          "trees"},
                      "gbt");
  GbtModel m;
  m.hyperparams = hyperparams_from_json(require(j, "hyperparams", "gbt"));
  m.base_prediction = require_number(j, "base_prediction", "gbt");
  m.feature_count = require(j, "feature_count", "gbt").get<std::size_t>();
  m.cumulative_gain = require(j, "cumulative_gain", "gbt").get<std::vector<double>>();
  if (m.cumulative_gain.size() != m.feature_count) {
    throw Error(ErrorKind::kSchema, "gbt: cumulative_gain length differs from feature_count");
  }
  for (const auto& jt : require(j, "trees", "gbt")) {
    std::vector<TreeNode> nodes;
    for (const auto& jn : jt) {
      TreeNode n;
      if (jn.contains("leaf")) {
        n.value = jn["leaf"].get<double>();
      } else {
        n.feature = require(jn, "feature", "tree node").get<int>();
        n.threshold = require_number(jn, "threshold", "tree node");
        if (n.feature < 0) throw Error(ErrorKind::kSchema, "tree: negative feature index");
      }
      nodes.push_back(n);
    }
    if (link_preorder(nodes, 0, m.feature_count) != nodes.size()) {
      throw Error(ErrorKind::kSchema, "tree: trailing nodes after preorder traversal");
    }
    m.trees.emplace_back(std::move(nodes));
  }
  return m;
}

json linear_to_json(const LinearModel& m) {
  return {{"feature_index", m.feature_index},
          {"slope", m.slope},
          {"intercept", m.intercept},
          {"is_constant", m.is_constant}};
}

LinearModel linear_from_json(const json& j) {
  reject_unknown_keys(j, {"feature_index", "slope", "intercept", "is_constant"}, "linear");
  LinearModel m;
  m.feature_index = require(j, "feature_index", "linear").get<int>();
  m.slope = require_number(j, "slope", "linear");
  m.intercept = require_number(j, "intercept", "linear");
  m.is_constant = require(j, "is_constant", "linear").get<bool>();
  return m;
}

}  // namespace detail

std::string gbt_to_string(const GbtModel& m) { return detail::gbt_to_json(m).dump() + "\n"; }

GbtModel gbt_from_string(std::string_view text) {
  return detail::gbt_from_json(detail::parse_json(text, "gbt model"));
}

}  // namespace firepower
