// SPDX-License-Identifier: Apache-2.0
//
// Gradient-boosted regression trees on squared-error loss with exact greedy
// splits, impurity-decrease feature importance, and a one-feature linear
// regressor.
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "firepower/error.hpp"

namespace firepower {

// Dense row-major matrix of training features.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  static FeatureMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct GbtHyperparams {
  int n_estimators = 100;
  int max_depth = 3;
  double learning_rate = 0.3;
  int min_samples_leaf = 1;
  double l2_leaf_reg = 1.0;

  void validate() const;
  bool operator==(const GbtHyperparams&) const = default;
};

inline constexpr double kMinSplitGain = 1e-12;

// Nodes are stored in preorder; an internal node's left child is the next
// node and `right` indexes the right child.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  double value = 0.0;
  int right = -1;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  double predict(std::span<const double> x) const;
  int depth() const;
  bool is_single_leaf() const { return nodes_.size() == 1; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }

  bool operator==(const RegressionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
};

struct GbtModel {
  GbtHyperparams hyperparams;
  double base_prediction = 0.0;
  std::vector<RegressionTree> trees;
  std::size_t feature_count = 0;
  std::vector<double> cumulative_gain;

  bool operator==(const GbtModel&) const = default;
};

// Optional per-round bookkeeping from fit_gbt.
struct FitTrace {
  std::vector<double> training_predictions;  // final accumulated value per row
  std::vector<double> sse_per_round;         // [0] = base only, [t] = after t trees
};

GbtModel fit_gbt(const FeatureMatrix& X, std::span<const double> y, const GbtHyperparams& hp,
                 FitTrace* trace = nullptr);
double predict_gbt(const GbtModel& m, std::span<const double> x);
// Normalized cumulative gains; uniform when no split was ever accepted.
std::vector<double> feature_importance(const GbtModel& m);
double total_gain(const GbtModel& m);

struct LinearModel {
  int feature_index = 0;
  double slope = 0.0;
  double intercept = 0.0;
  bool is_constant = false;

  bool operator==(const LinearModel&) const = default;
};

LinearModel fit_linear_one_feature(std::span<const double> x, std::span<const double> y,
                                   int feature_index = 0);
double predict_linear(const LinearModel& m, double x);

std::string gbt_to_string(const GbtModel& m);
GbtModel gbt_from_string(std::string_view text);

}  // namespace firepower
