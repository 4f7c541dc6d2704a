// SPDX-License-Identifier: Apache-2.0
//
// Phase 1: per-component hardware models trained on the known architecture's
// workload-averaged power, their parameter importance, and the resulting
// generalization strategy.
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "firepower/dataset.hpp"
#include "firepower/trees.hpp"

namespace firepower {

// Importance per hardware parameter, in the component's hw_params order.
using ParameterImportance = std::vector<std::pair<std::string, double>>;

struct Strategy {
  enum class Kind { kRetrain, kNoRetrain };
  Kind kind = Kind::kNoRetrain;
  std::string important_param;  // set for kRetrain only

  static Strategy retrain(std::string param) { return {Kind::kRetrain, std::move(param)}; }
  static Strategy no_retrain() { return {}; }
  bool is_retrain() const { return kind == Kind::kRetrain; }
  std::string describe() const;

  bool operator==(const Strategy&) const = default;
};

inline constexpr double kDefaultStrategyThreshold = 0.95;
inline constexpr double kDefaultMinPowerVariation = 0.02;

struct ComponentKnowledge {
  std::string component;
  GbtModel hardware_model;
  ParameterImportance importance;
  Strategy strategy;
  // Coefficient of variation of the averaged power across known configs.
  double power_variation = 0.0;

  bool operator==(const ComponentKnowledge&) const = default;
};

struct KnowledgeBase {
  std::string known_architecture;
  double threshold = kDefaultStrategyThreshold;
  double min_power_variation = kDefaultMinPowerVariation;
  std::map<std::string, ComponentKnowledge> per_component;
  ComponentTable component_table;

  const ComponentKnowledge& at(const std::string& component) const;
  std::size_t retrain_count() const;
  bool operator==(const KnowledgeBase&) const = default;
};

struct ExtractOptions {
  GbtHyperparams hyperparams;
  double threshold = kDefaultStrategyThreshold;
  // Components whose averaged power barely moves across configurations carry
  // no usable trend for a linear refit and stay on the inherited model.
  double min_power_variation = kDefaultMinPowerVariation;
};

// One row per configuration (H_i), label = workload-averaged component power.
GbtModel train_hardware_model(const Dataset& ds, const ComponentDef& comp,
                              const GbtHyperparams& hp);
ParameterImportance compute_importance(const GbtModel& m, const ComponentDef& comp);
// Retrain(argmax) iff max importance > threshold (strict); ties resolve to the
// earliest parameter.
Strategy select_strategy(const ParameterImportance& importance, double threshold);

KnowledgeBase extract_knowledge(const Dataset& ds_known, const ExtractOptions& options = {});

std::string knowledge_to_string(const KnowledgeBase& kb);
KnowledgeBase knowledge_from_string(std::string_view text);
void write_knowledge(const KnowledgeBase& kb, const std::filesystem::path& path);
KnowledgeBase load_knowledge(const std::filesystem::path& path);

}  // namespace firepower
