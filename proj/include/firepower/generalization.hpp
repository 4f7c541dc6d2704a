// SPDX-License-Identifier: Apache-2.0
//
// Generalization-quality check: inherited hardware models are compared with
// the workload-averaged labels of the accessible target configurations after
// an ideal (least-squares) scaling, and gated on MAPE.
#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "firepower/knowledge.hpp"

namespace firepower {

inline constexpr double kDefaultGeneralizationThreshold = 10.0;  // percent

enum class Verdict { kHigh, kLow };
const char* to_string(Verdict v);

struct ComponentGeneralization {
  double scaling_factor = 1.0;
  double observed_mape = 0.0;  // percent
  Verdict verdict = Verdict::kHigh;
  // One point per accessible configuration, for golden-vs-adjusted plots.
  std::vector<std::string> config_ids;
  std::vector<double> golden_average;
  std::vector<double> adjusted_prediction;
};

struct GeneralizationReport {
  double threshold = kDefaultGeneralizationThreshold;
  std::vector<std::string> order;  // component-table order
  std::map<std::string, ComponentGeneralization> per_component;

  std::vector<std::string> low_components() const;
};

// s* = sum(pred * label) / sum(pred^2).
double ideal_scaling_factor(std::span<const double> preds, std::span<const double> labels);

GeneralizationReport evaluate_generalization(const KnowledgeBase& kb,
                                             const Dataset& ds_target_train,
                                             double threshold = kDefaultGeneralizationThreshold);

std::string report_to_string(const GeneralizationReport& r);
// Header: component,scaling_factor,mape_percent,verdict
std::string report_to_csv(const GeneralizationReport& r);
// Header: component,config_id,golden_avg_mw,adjusted_prediction_mw
std::string report_points_csv(const GeneralizationReport& r);

}  // namespace firepower
