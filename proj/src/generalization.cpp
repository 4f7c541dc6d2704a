// SPDX-License-Identifier: Apache-2.0
#include "firepower/generalization.hpp"

#include <cmath>
#include <sstream>

#include "firepower/metrics.hpp"
#include "json_io.hpp"

namespace firepower {

using detail::json;

const char* to_string(Verdict v) { return v == Verdict::kHigh ? "High" : "Low"; }

std::vector<std::string> GeneralizationReport::low_components() const {
  std::vector<std::string> out;
  for (const auto& name : order) {
    if (per_component.at(name).verdict == Verdict::kLow) out.push_back(name);
  }
  return out;
}

double ideal_scaling_factor(std::span<const double> preds, std::span<const double> labels) {
  if (preds.empty()) throw Error(ErrorKind::kInvalidArgument, "ideal_scaling_factor: empty input");
  if (preds.size() != labels.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "ideal_scaling_factor: length mismatch");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    num += preds[i] * labels[i];
    den += preds[i] * preds[i];
  }
  if (!(den > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "ideal_scaling_factor: all predictions are zero");
  }
  return num / den;
}

GeneralizationReport evaluate_generalization(const KnowledgeBase& kb,
                                             const Dataset& ds_target_train, double threshold) {
  GeneralizationReport report;
  report.threshold = threshold;
  for (const auto& comp : ds_target_train.component_table()) {
    const auto& k = kb.at(comp.name);
    const auto avg = average_power_per_config(ds_target_train, comp.name);
    ComponentGeneralization g;
    std::vector<double> preds;
    for (const auto& c : ds_target_train.configurations()) {
      // Always the phase-1 model, never a retrained one.
      preds.push_back(std::max(predict_gbt(k.hardware_model, hardware_features(comp, c)),
                               1e-9));
      g.config_ids.push_back(c.id);
      g.golden_average.push_back(avg.at(c.id));
    }
    g.scaling_factor = ideal_scaling_factor(preds, g.golden_average);
    for (double p : preds) g.adjusted_prediction.push_back(g.scaling_factor * p);
    g.observed_mape = mape(g.adjusted_prediction, g.golden_average);
    g.verdict = g.observed_mape < threshold ? Verdict::kHigh : Verdict::kLow;
    report.order.push_back(comp.name);
    report.per_component.emplace(comp.name, std::move(g));
  }
  return report;
}

std::string report_to_string(const GeneralizationReport& r) {
  json comps = json::array();
  for (const auto& name : r.order) {
    const auto& g = r.per_component.at(name);
    comps.push_back({{"component", name},
                     {"scaling_factor", g.scaling_factor},
                     {"observed_mape", g.observed_mape},
                     {"verdict", to_string(g.verdict)},
                     {"config_ids", g.config_ids},
                     {"golden_average", g.golden_average},
                     {"adjusted_prediction", g.adjusted_prediction}});
  }
  json root = {{"threshold", r.threshold}, {"per_component", std::move(comps)}};
  return root.dump(1) + "\n";
}

std::string report_to_csv(const GeneralizationReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "component,scaling_factor,mape_percent,verdict\n";
  for (const auto& name : r.order) {
    const auto& g = r.per_component.at(name);
    out << name << ',' << g.scaling_factor << ',' << g.observed_mape << ','
        << to_string(g.verdict) << '\n';
  }
  return out.str();
}

std::string report_points_csv(const GeneralizationReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "component,config_id,golden_avg_mw,adjusted_prediction_mw\n";
  for (const auto& name : r.order) {
    const auto& g = r.per_component.at(name);
    for (std::size_t i = 0; i < g.config_ids.size(); ++i) {
      out << name << ',' << g.config_ids[i] << ',' << g.golden_average[i] << ','
          << g.adjusted_prediction[i] << '\n';
    }
  }
  return out.str();
}

}  // namespace firepower
