// SPDX-License-Identifier: Apache-2.0
//
// Few-shot experiment protocol: for each (k, seed) draw k labeled target
// configurations, train every requested method on that one split and score
// total power on the remaining configurations.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "firepower/baselines.hpp"
#include "firepower/knowledge.hpp"

namespace firepower {

enum class Method {
  kMcpatCalib,
  kMcpatCalibComponent,
  kMcpatCalibTransfer,
  kMcpatCalibComponentTransfer,
  kFirePowerNoRetrain,
  kFirePower,
};

std::string_view method_key(Method m);
Method parse_method(std::string_view key);
const std::vector<Method>& all_methods();

struct SamplePrediction {
  std::string config_id;
  std::string workload;
  double predicted = 0.0;
  double label = 0.0;
};

struct EvalResult {
  Method method = Method::kFirePower;
  int k = 0;
  std::uint64_t seed = 0;
  double mape_percent = 0.0;
  double pearson_r = 0.0;  // NaN when undefined (constant predictions)
  std::vector<std::string> labeled_configs;
  std::vector<SamplePrediction> per_sample;
};

struct ExperimentOptions {
  GbtHyperparams hyperparams;
  double threshold = kDefaultStrategyThreshold;
  double min_power_variation = kDefaultMinPowerVariation;
  // Unset: use the analytical estimate iff every sample of both datasets has one.
  std::optional<bool> use_analytical;
};

// Uniform draw of k configurations without replacement, returned in dataset order.
std::vector<std::string> choose_labeled_configs(const Dataset& ds_target, int k,
                                                std::uint64_t seed);

std::vector<EvalResult> run_experiment(const Dataset& ds_known, const Dataset& ds_target,
                                       const std::vector<Method>& methods,
                                       const std::vector<int>& ks,
                                       const std::vector<std::uint64_t>& seeds,
                                       const ExperimentOptions& options = {});

struct SummaryRow {
  Method method = Method::kFirePower;
  int k = 0;
  std::size_t runs = 0;
  double mean_mape = 0.0;
  double std_mape = 0.0;
  double mean_r = 0.0;
};

// Per-(method, k) averages of per-seed metrics.
std::vector<SummaryRow> summarize(const std::vector<EvalResult>& results);
const SummaryRow& find_summary(const std::vector<SummaryRow>& rows, Method m, int k);

// Header: method,k,seed,mape_percent,pearson_r
std::string results_csv(const std::vector<EvalResult>& results);
// Header: method,k,seed,config_id,workload,predicted_mw,label_mw
std::string per_sample_csv(const std::vector<EvalResult>& results);
std::string summary_table(const std::vector<SummaryRow>& rows);

}  // namespace firepower
