// SPDX-License-Identifier: Apache-2.0
//
// Data model for architectures, configurations, workloads, per-component
// power samples and the component table, plus loading/validation and the
// few-shot split.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "firepower/error.hpp"

namespace firepower {

inline constexpr std::string_view kOtherLogic = "Other Logic";

struct HardwareParameter {
  std::string name;
  std::vector<std::string> aliases;

  bool operator==(const HardwareParameter&) const = default;
};

// Canonical hardware-parameter names and the aliases that fold onto them.
class ParameterRegistry {
 public:
  ParameterRegistry() = default;
  explicit ParameterRegistry(std::vector<HardwareParameter> params);

  // The 14 parameters of the BOOM/XiangShan configuration table.
  static const ParameterRegistry& builtin();

  // Maps a canonical name or alias to its canonical name; throws kAlias.
  std::string canonicalize(std::string_view name) const;
  bool contains(std::string_view canonical) const;
  std::size_t index_of(std::string_view canonical) const;

  const std::vector<HardwareParameter>& parameters() const { return params_; }
  std::vector<std::string> canonical_names() const;
  std::size_t size() const { return params_.size(); }

  bool operator==(const ParameterRegistry& o) const { return params_ == o.params_; }

 private:
  std::vector<HardwareParameter> params_;
  std::map<std::string, std::string, std::less<>> lookup_;
};

struct Configuration {
  std::string id;
  std::string architecture;
  std::map<std::string, std::int64_t> params;

  std::int64_t value(const std::string& param) const;
  bool operator==(const Configuration&) const = default;
};

struct ComponentDef {
  std::string name;
  std::vector<std::string> hw_params;
  std::vector<std::string> event_stats;
  std::optional<std::string> important_param;

  bool operator==(const ComponentDef&) const = default;
};

using ComponentTable = std::vector<ComponentDef>;

struct PowerSample {
  std::string config_id;
  std::string workload;
  std::map<std::string, double> component_power;  // mW
  double total_power = 0.0;                       // mW; 0 when unlabeled
  std::map<std::string, double> event_stats;
  std::optional<double> analytical_estimate;      // McPAT-style output, mW

  bool labeled() const { return total_power > 0.0; }
  double component(const std::string& name) const;
  bool operator==(const PowerSample&) const = default;
};

// Built-in 22-entry component table (8 Frontend, 7 Execution, 6 Mem Access,
// Other Logic). Event-statistic lists ship empty.
ComponentTable builtin_component_table();

// Illustrative event-statistic names for a component, used by the synthetic
// generator and documented as a starting point for real importers.
std::vector<std::string> example_event_stats(std::string_view component);

const ComponentDef& find_component(const ComponentTable& table, std::string_view name);

struct LoadOptions {
  // Prediction inputs may omit power labels.
  bool require_labels = true;
};

// Immutable after construction. The constructor canonicalizes parameter
// names, derives missing "Other Logic" labels and validates every invariant.
class Dataset {
 public:
  Dataset(std::string architecture, ParameterRegistry registry, ComponentTable table,
          std::vector<Configuration> configs, std::vector<PowerSample> samples,
          LoadOptions options = {});

  const std::string& architecture() const { return architecture_; }
  const ParameterRegistry& registry() const { return registry_; }
  const ComponentTable& component_table() const { return table_; }
  const std::vector<Configuration>& configurations() const { return configs_; }
  const std::vector<PowerSample>& samples() const { return samples_; }

  const Configuration& config(std::string_view id) const;
  bool has_config(std::string_view id) const;
  const ComponentDef& component(std::string_view name) const;

  // Samples of one configuration, in file order.
  std::vector<const PowerSample*> samples_of(std::string_view config_id) const;
  std::vector<std::string> config_ids() const;
  bool fully_labeled() const;

  // New dataset restricted to the given configurations (and their samples).
  Dataset subset(const std::vector<std::string>& config_ids) const;
  // Same data with a replaced component table (e.g. an override file).
  Dataset with_component_table(ComponentTable table) const;

  bool operator==(const Dataset& o) const;

 private:
  std::string architecture_;
  ParameterRegistry registry_;
  ComponentTable table_;
  std::vector<Configuration> configs_;
  std::vector<PowerSample> samples_;
  LoadOptions options_;
  std::map<std::string, std::size_t, std::less<>> config_index_;
};

Dataset load_dataset(const std::filesystem::path& path, LoadOptions options = {});
Dataset parse_dataset(std::string_view text, LoadOptions options = {});
std::string dataset_to_string(const Dataset& ds);
void write_dataset(const Dataset& ds, const std::filesystem::path& path);

ComponentTable load_component_table(const std::filesystem::path& path);

// Mean of the component's power over all workloads of each configuration.
std::map<std::string, double> average_power_per_config(const Dataset& ds,
                                                       std::string_view component);

std::pair<Dataset, Dataset> few_shot_split(const Dataset& ds,
                                           const std::vector<std::string>& labeled_config_ids);

// [H_i in hw_params order] then, if include_events, [E_i in event_stats order].
std::vector<double> feature_vector(const Dataset& ds, const ComponentDef& comp,
                                   const PowerSample& sample, bool include_events);
std::vector<double> hardware_features(const ComponentDef& comp, const Configuration& config);
std::vector<double> event_features(const ComponentDef& comp,
                                   const std::map<std::string, double>& event_stats);

}  // namespace firepower
