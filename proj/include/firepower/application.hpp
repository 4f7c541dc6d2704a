// SPDX-License-Identifier: Apache-2.0
//
// Phase 2: the target-architecture model. Each component's power is the
// product of a hardware model (inherited from the knowledge base or
// retrained as a one-parameter linear fit) and an event model trained on the
// ratio between target labels and that hardware model.
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>

#include "firepower/knowledge.hpp"

namespace firepower {

inline constexpr double kDefaultHardwareEpsilon = 1e-9;  // mW

struct EffectiveHardwareModel {
  std::string component;
  std::variant<GbtModel, LinearModel> model;
  std::string retrained_param;  // important parameter when retrained

  bool retrained() const { return std::holds_alternative<LinearModel>(model); }
  bool operator==(const EffectiveHardwareModel&) const = default;
};

struct EventModel {
  std::string component;
  GbtModel model;  // features: H_i ++ E_i

  bool operator==(const EventModel&) const = default;
};

struct ComponentPowerModel {
  EffectiveHardwareModel hw;
  EventModel ev;

  bool operator==(const ComponentPowerModel&) const = default;
};

struct FirePowerModel {
  std::string target_architecture;
  std::map<std::string, ComponentPowerModel> per_component;
  ComponentTable component_table;
  double epsilon = kDefaultHardwareEpsilon;

  const ComponentPowerModel& at(const std::string& component) const;
  std::size_t retrained_count() const;
  bool operator==(const FirePowerModel&) const = default;
};

LinearModel retrain_hardware_model(const Dataset& ds_target_train, const ComponentDef& comp,
                                   const std::string& important_param);

double effective_hw_predict(const EffectiveHardwareModel& hw, const ComponentDef& comp,
                            const Configuration& config,
                            double epsilon = kDefaultHardwareEpsilon);

EventModel train_event_model(const Dataset& ds_target_train, const ComponentDef& comp,
                             const EffectiveHardwareModel& hw, const GbtHyperparams& hp,
                             double epsilon = kDefaultHardwareEpsilon);

struct BuildOptions {
  GbtHyperparams hyperparams;
  // Ablation switch: inherit every hardware model regardless of strategy.
  bool force_no_retrain = false;
  // A Retrain component whose labeled configurations share one value of the
  // important parameter keeps its inherited hardware model.
  bool inherit_when_unidentifiable = true;
  double epsilon = kDefaultHardwareEpsilon;
};

FirePowerModel build_target_model(const KnowledgeBase& kb, const Dataset& ds_target_train,
                                  const BuildOptions& options = {});

double predict_component_power(const FirePowerModel& m, const std::string& component,
                               const Configuration& config,
                               const std::map<std::string, double>& event_stats);
// Sum of predict_component_power over the component table, in table order.
double predict_total_power(const FirePowerModel& m, const Configuration& config,
                           const std::map<std::string, double>& event_stats);

std::string model_to_string(const FirePowerModel& m);
FirePowerModel model_from_string(std::string_view text);
void write_model(const FirePowerModel& m, const std::filesystem::path& path);
FirePowerModel load_model(const std::filesystem::path& path);

}  // namespace firepower
