// SPDX-License-Identifier: Apache-2.0
#include "firepower/knowledge.hpp"

#include <cmath>

#include "serialize.hpp"

namespace firepower {

using detail::json;

std::string Strategy::describe() const {
  return is_retrain() ? "Retrain(" + important_param + ")" : "NoRetrain";
}

const ComponentKnowledge& KnowledgeBase::at(const std::string& component) const {
  auto it = per_component.find(component);
  if (it == per_component.end()) {
    throw Error(ErrorKind::kInvalidArgument,
                "knowledge base has no component '" + component + "'");
  }
  return it->second;
}

std::size_t KnowledgeBase::retrain_count() const {
  std::size_t n = 0;
  for (const auto& [_, k] : per_component) n += k.strategy.is_retrain() ? 1 : 0;
  return n;
}

namespace {

struct AveragedRows {
  FeatureMatrix X;
  std::vector<double> y;
};

AveragedRows averaged_rows(const Dataset& ds, const ComponentDef& comp) {
  const auto avg = average_power_per_config(ds, comp.name);
  AveragedRows rows{FeatureMatrix(ds.configurations().size(), comp.hw_params.size()), {}};
  std::size_t r = 0;
  for (const auto& c : ds.configurations()) {
    const auto h = hardware_features(comp, c);
    for (std::size_t j = 0; j < h.size(); ++j) rows.X.at(r, j) = h[j];
    rows.y.push_back(avg.at(c.id));
    ++r;
  }
  return rows;
}

double coefficient_of_variation(const std::vector<double>& y) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(y.size());
  return mean > 0.0 ? std::sqrt(var) / mean : 0.0;
}

}  // namespace

GbtModel train_hardware_model(const Dataset& ds, const ComponentDef& comp,
                              const GbtHyperparams& hp) {
  if (ds.configurations().size() < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "hardware model for '" + comp.name + "' needs at least 2 configurations");
  }
  const auto rows = averaged_rows(ds, comp);
  return fit_gbt(rows.X, rows.y, hp);
}

ParameterImportance compute_importance(const GbtModel& m, const ComponentDef& comp) {
  if (m.feature_count != comp.hw_params.size()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "hardware model for '" + comp.name + "' has " + std::to_string(m.feature_count) +
                    " features but the component has " + std::to_string(comp.hw_params.size()) +
                    " parameters");
  }
  const auto imp = feature_importance(m);
  ParameterImportance out;
  out.reserve(imp.size());
  for (std::size_t j = 0; j < imp.size(); ++j) out.emplace_back(comp.hw_params[j], imp[j]);
  return out;
}

Strategy select_strategy(const ParameterImportance& importance, double threshold) {
  if (importance.empty()) throw Error(ErrorKind::kInvalidArgument, "empty importance map");
  std::size_t best = 0;
  for (std::size_t j = 1; j < importance.size(); ++j) {
    if (importance[j].second > importance[best].second) best = j;
  }
  if (importance[best].second > threshold) return Strategy::retrain(importance[best].first);
  return Strategy::no_retrain();
}

KnowledgeBase extract_knowledge(const Dataset& ds_known, const ExtractOptions& options) {
  if (ds_known.samples().empty()) {
    throw Error(ErrorKind::kInvalidArgument, "known dataset has no samples");
  }
  KnowledgeBase kb;
  kb.known_architecture = ds_known.architecture();
  kb.threshold = options.threshold;
  kb.min_power_variation = options.min_power_variation;
  kb.component_table = ds_known.component_table();
  for (const auto& comp : kb.component_table) {
    if (ds_known.configurations().size() < 2) {
      throw Error(ErrorKind::kInvalidArgument,
                  "knowledge extraction needs at least 2 known configurations");
    }
    const auto rows = averaged_rows(ds_known, comp);
    ComponentKnowledge k;
    k.component = comp.name;
    k.hardware_model = fit_gbt(rows.X, rows.y, options.hyperparams);
    k.importance = compute_importance(k.hardware_model, comp);
    k.power_variation = coefficient_of_variation(rows.y);
    k.strategy = select_strategy(k.importance, options.threshold);
    if (k.strategy.is_retrain() && !(k.power_variation > options.min_power_variation)) {
      k.strategy = Strategy::no_retrain();
    }
    kb.per_component.emplace(comp.name, std::move(k));
  }
  return kb;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json strategy_to_json(const Strategy& s) {
  json j = {{"kind", s.is_retrain() ? "retrain" : "no_retrain"}};
  if (s.is_retrain()) j["important_param"] = s.important_param;
  return j;
}

Strategy strategy_from_json(const json& j) {
  detail::reject_unknown_keys(j, {"kind", "important_param"}, "strategy");
  const auto kind = detail::require_string(j, "kind", "strategy");
  if (kind == "retrain") {
    return Strategy::retrain(detail::require_string(j, "important_param", "strategy"));
  }
  if (kind == "no_retrain") return Strategy::no_retrain();
  throw Error(ErrorKind::kSchema, "strategy: unknown kind '" + kind + "'");
}

}  // namespace

std::string knowledge_to_string(const KnowledgeBase& kb) {
  json comps = json::array();
  for (const auto& comp : kb.component_table) {
    const auto& k = kb.at(comp.name);
    json imp = json::array();
    for (const auto& [p, v] : k.importance) imp.push_back({{"param", p}, {"importance", v}});
    comps.push_back({{"component", k.component},
                     {"hardware_model", detail::gbt_to_json(k.hardware_model)},
                     {"importance", std::move(imp)},
                     {"strategy", strategy_to_json(k.strategy)},
                     {"power_variation", k.power_variation}});
  }
  json root = {{"known_architecture", kb.known_architecture},
               {"threshold", kb.threshold},
               {"min_power_variation", kb.min_power_variation},
               {"component_table", detail::table_to_json(kb.component_table)},
               {"per_component", std::move(comps)}};
  return root.dump(1) + "\n";
}

KnowledgeBase knowledge_from_string(std::string_view text) {
  const json root = detail::parse_json(text, "knowledge base");
  detail::reject_unknown_keys(root,
                              {"known_architecture", "threshold", "min_power_variation",
                               "component_table", "per_component"},
                              "knowledge base");
  KnowledgeBase kb;
  kb.known_architecture = detail::require_string(root, "known_architecture", "knowledge base");
  kb.threshold = detail::require_number(root, "threshold", "knowledge base");
  kb.min_power_variation = detail::require_number(root, "min_power_variation", "knowledge base");
  kb.component_table = detail::table_from_json(detail::require(root, "component_table", "knowledge base"));
  for (const auto& jc : detail::require(root, "per_component", "knowledge base")) {
    detail::reject_unknown_keys(
        jc, {"component", "hardware_model", "importance", "strategy", "power_variation"},
        "per_component[]");
    ComponentKnowledge k;
    k.component = detail::require_string(jc, "component", "per_component[]");
    k.hardware_model = detail::gbt_from_json(detail::require(jc, "hardware_model", k.component));
    for (const auto& ji : detail::require(jc, "importance", k.component)) {
      k.importance.emplace_back(detail::require_string(ji, "param", "importance"),
                                detail::require_number(ji, "importance", "importance"));
    }
    k.strategy = strategy_from_json(detail::require(jc, "strategy", k.component));
    k.power_variation = detail::require_number(jc, "power_variation", k.component);
    const auto name = k.component;
    if (!kb.per_component.emplace(name, std::move(k)).second) {
      throw Error(ErrorKind::kDuplicate, "knowledge base lists '" + name + "' twice");
    }
  }
  for (const auto& comp : kb.component_table) {
    if (!kb.per_component.contains(comp.name)) {
      throw Error(ErrorKind::kSchema, "knowledge base is missing component '" + comp.name + "'");
    }
  }
  if (kb.per_component.size() != kb.component_table.size()) {
    throw Error(ErrorKind::kSchema, "knowledge base has components outside its table");
  }
  return kb;
}

void write_knowledge(const KnowledgeBase& kb, const std::filesystem::path& path) {
  detail::write_text_atomic(path, knowledge_to_string(kb));
}

KnowledgeBase load_knowledge(const std::filesystem::path& path) {
  return knowledge_from_string(detail::read_text_file(path));
}

}  // namespace firepower
