// SPDX-License-Identifier: Apache-2.0
#include "firepower/application.hpp"

#include <algorithm>

#include "serialize.hpp"

namespace firepower {

using detail::json;

const ComponentPowerModel& FirePowerModel::at(const std::string& component) const {
  auto it = per_component.find(component);
  if (it == per_component.end()) {
    throw Error(ErrorKind::kInvalidArgument, "model has no component '" + component + "'");
  }
  return it->second;
}

std::size_t FirePowerModel::retrained_count() const {
  return static_cast<std::size_t>(
      std::count_if(per_component.begin(), per_component.end(),
                    [](const auto& kv) { return kv.second.hw.retrained(); }));
}

namespace {

std::size_t param_position(const ComponentDef& comp, const std::string& param) {
  auto it = std::find(comp.hw_params.begin(), comp.hw_params.end(), param);
  if (it == comp.hw_params.end()) {
    throw Error(ErrorKind::kMissingData,
                "component '" + comp.name + "' has no hardware parameter '" + param + "'");
  }
  return static_cast<std::size_t>(it - comp.hw_params.begin());
}

std::vector<double> event_row(const ComponentDef& comp, const Configuration& config,
                              const std::map<std::string, double>& event_stats) {
  auto x = hardware_features(comp, config);
  const auto e = event_features(comp, event_stats);
  x.insert(x.end(), e.begin(), e.end());
  return x;
}

void check_same_table(const ComponentTable& kb_table, const ComponentTable& ds_table) {
  if (kb_table.size() != ds_table.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "component-table mismatch between knowledge base and target dataset");
  }
  for (std::size_t i = 0; i < kb_table.size(); ++i) {
    if (kb_table[i].name != ds_table[i].name || kb_table[i].hw_params != ds_table[i].hw_params) {
      throw Error(ErrorKind::kInvalidArgument,
                  "component-table mismatch at '" + kb_table[i].name + "'");
    }
  }
}

}  // namespace

LinearModel retrain_hardware_model(const Dataset& ds_target_train, const ComponentDef& comp,
                                   const std::string& important_param) {
  const auto pos = param_position(comp, important_param);
  const auto avg = average_power_per_config(ds_target_train, comp.name);
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& c : ds_target_train.configurations()) {
    x.push_back(static_cast<double>(c.value(important_param)));
    y.push_back(avg.at(c.id));
  }
  return fit_linear_one_feature(x, y, static_cast<int>(pos));
}

double effective_hw_predict(const EffectiveHardwareModel& hw, const ComponentDef& comp,
                            const Configuration& config, double epsilon) {
  const auto h = hardware_features(comp, config);
  double p = 0.0;
  if (const auto* lin = std::get_if<LinearModel>(&hw.model)) {
    p = predict_linear(*lin, h.at(static_cast<std::size_t>(lin->feature_index)));
  } else {
    p = predict_gbt(std::get<GbtModel>(hw.model), h);
  }
  return std::max(p, epsilon);
}

EventModel train_event_model(const Dataset& ds_target_train, const ComponentDef& comp,
                             const EffectiveHardwareModel& hw, const GbtHyperparams& hp,
                             double epsilon) {
  if (ds_target_train.samples().empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "event model for '" + comp.name + "': no training samples");
  }
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  for (const auto& s : ds_target_train.samples()) {
    const auto& config = ds_target_train.config(s.config_id);
    rows.push_back(event_row(comp, config, s.event_stats));
    labels.push_back(s.component(comp.name) / effective_hw_predict(hw, comp, config, epsilon));
  }
  return {comp.name, fit_gbt(FeatureMatrix::from_rows(rows), labels, hp)};
}

FirePowerModel build_target_model(const KnowledgeBase& kb, const Dataset& ds_target_train,
                                  const BuildOptions& options) {
  check_same_table(kb.component_table, ds_target_train.component_table());
  FirePowerModel m;
  m.target_architecture = ds_target_train.architecture();
  m.component_table = ds_target_train.component_table();
  m.epsilon = options.epsilon;
  for (const auto& comp : m.component_table) {
    const auto& k = kb.at(comp.name);
    EffectiveHardwareModel hw{comp.name, k.hardware_model, {}};
    if (k.strategy.is_retrain() && !options.force_no_retrain) {
      auto lin = retrain_hardware_model(ds_target_train, comp, k.strategy.important_param);
      // No spread in the important parameter: keep the inherited trend.
      if (!(lin.is_constant && options.inherit_when_unidentifiable)) {
        hw.model = lin;
        hw.retrained_param = k.strategy.important_param;
      }
    }
    auto ev = train_event_model(ds_target_train, comp, hw, options.hyperparams, options.epsilon);
    m.per_component.emplace(comp.name, ComponentPowerModel{std::move(hw), std::move(ev)});
  }
  return m;
}

double predict_component_power(const FirePowerModel& m, const std::string& component,
                               const Configuration& config,
                               const std::map<std::string, double>& event_stats) {
  const auto& cm = m.at(component);
  const auto& comp = find_component(m.component_table, component);
  const double hw = effective_hw_predict(cm.hw, comp, config, m.epsilon);
  const double ratio = predict_gbt(cm.ev.model, event_row(comp, config, event_stats));
  return std::max(0.0, hw * ratio);
}

double predict_total_power(const FirePowerModel& m, const Configuration& config,
                           const std::map<std::string, double>& event_stats) {
  double total = 0.0;
  for (const auto& comp : m.component_table) {
    total += predict_component_power(m, comp.name, config, event_stats);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Serialization

std::string model_to_string(const FirePowerModel& m) {
  json comps = json::array();
  for (const auto& comp : m.component_table) {
    const auto& cm = m.at(comp.name);
    json hw = {{"variant", cm.hw.retrained() ? "retrained" : "inherited"}};
    if (cm.hw.retrained()) {
      hw["param"] = cm.hw.retrained_param;
      hw["model"] = detail::linear_to_json(std::get<LinearModel>(cm.hw.model));
    } else {
      hw["model"] = detail::gbt_to_json(std::get<GbtModel>(cm.hw.model));
    }
    comps.push_back({{"component", comp.name},
                     {"hardware_model", std::move(hw)},
                     {"event_model", detail::gbt_to_json(cm.ev.model)}});
  }
  json root = {{"target_architecture", m.target_architecture},
               {"epsilon", m.epsilon},
               {"component_table", detail::table_to_json(m.component_table)},
               {"per_component", std::move(comps)}};
  return root.dump(1) + "\n";
}

FirePowerModel model_from_string(std::string_view text) {
  const json root = detail::parse_json(text, "power model");
  detail::reject_unknown_keys(root,
                              {"target_architecture", "epsilon", "component_table",
                               "per_component"},
                              "power model");
  FirePowerModel m;
  m.target_architecture = detail::require_string(root, "target_architecture", "power model");
  m.epsilon = detail::require_number(root, "epsilon", "power model");
  m.component_table = detail::table_from_json(detail::require(root, "component_table", "model"));
  for (const auto& jc : detail::require(root, "per_component", "power model")) {
    detail::reject_unknown_keys(jc, {"component", "hardware_model", "event_model"},
                                "per_component[]");
    const auto name = detail::require_string(jc, "component", "per_component[]");
    const auto& jhw = detail::require(jc, "hardware_model", name);
    detail::reject_unknown_keys(jhw, {"variant", "param", "model"}, name + ".hardware_model");
    const auto variant = detail::require_string(jhw, "variant", name);
    EffectiveHardwareModel hw{name, GbtModel{}, {}};
    if (variant == "retrained") {
      hw.model = detail::linear_from_json(detail::require(jhw, "model", name));
      hw.retrained_param = detail::require_string(jhw, "param", name);
    } else if (variant == "inherited") {
      hw.model = detail::gbt_from_json(detail::require(jhw, "model", name));
    } else {
      throw Error(ErrorKind::kSchema, name + ": unknown hardware-model variant '" + variant + "'");
    }
    EventModel ev{name, detail::gbt_from_json(detail::require(jc, "event_model", name))};
    if (!m.per_component.emplace(name, ComponentPowerModel{std::move(hw), std::move(ev)}).second) {
      throw Error(ErrorKind::kDuplicate, "power model lists '" + name + "' twice");
    }
  }
  for (const auto& comp : m.component_table) {
    if (!m.per_component.contains(comp.name)) {
      throw Error(ErrorKind::kSchema, "power model is missing component '" + comp.name + "'");
    }
  }
  if (m.per_component.size() != m.component_table.size()) {
    throw Error(ErrorKind::kSchema, "power model has components outside its table");
  }
  return m;
}

void write_model(const FirePowerModel& m, const std::filesystem::path& path) {
  detail::write_text_atomic(path, model_to_string(m));
}

FirePowerModel load_model(const std::filesystem::path& path) {
  return model_from_string(detail::read_text_file(path));
}

}  // namespace firepower
