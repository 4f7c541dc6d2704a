// SPDX-License-Identifier: Apache-2.0
#include "firepower/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace firepower {

std::vector<double> MonolithicFeatures::row(const Configuration& config,
                                            const PowerSample& sample) const {
  std::vector<double> x;
  x.reserve(size());
  for (const auto& p : hw_params) x.push_back(static_cast<double>(config.value(p)));
  for (const auto& e : event_stats) {
    auto it = sample.event_stats.find(e);
    if (it == sample.event_stats.end()) {
      throw Error(ErrorKind::kMissingData, "sample (" + sample.config_id + ", " + sample.workload +
                                               ") lacks event statistic '" + e + "'");
    }
    x.push_back(it->second);
  }
  if (analytical) {
    if (!sample.analytical_estimate) {
      throw Error(ErrorKind::kMissingData, "sample (" + sample.config_id + ", " +
                                               sample.workload + ") lacks analytical_estimate");
    }
    x.push_back(*sample.analytical_estimate);
  }
  return x;
}

MonolithicFeatures monolithic_features(const Dataset& ds, bool use_analytical) {
  MonolithicFeatures f;
  f.hw_params = ds.registry().canonical_names();
  for (const auto& comp : ds.component_table()) {
    for (const auto& e : comp.event_stats) {
      if (std::find(f.event_stats.begin(), f.event_stats.end(), e) == f.event_stats.end()) {
        f.event_stats.push_back(e);
      }
    }
  }
  f.analytical = use_analytical;
  return f;
}

MonolithicModel train_monolithic(const Dataset& ds_train, bool use_analytical,
                                 const GbtHyperparams& hp) {
  if (ds_train.samples().empty()) {
    throw Error(ErrorKind::kInvalidArgument, "monolithic model: no training samples");
  }
  MonolithicModel m;
  m.features = monolithic_features(ds_train, use_analytical);
  m.uses_analytical_feature = use_analytical;
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  for (const auto& s : ds_train.samples()) {
    rows.push_back(m.features.row(ds_train.config(s.config_id), s));
    labels.push_back(s.total_power);
  }
  m.model = fit_gbt(FeatureMatrix::from_rows(rows), labels, hp);
  return m;
}

double predict_monolithic(const MonolithicModel& m, const Configuration& config,
                          const PowerSample& sample) {
  return predict_gbt(m.model, m.features.row(config, sample));
}

namespace {

std::vector<double> component_row(const ComponentDef& comp, const Configuration& config,
                                  const std::map<std::string, double>& event_stats) {
  auto x = hardware_features(comp, config);
  const auto e = event_features(comp, event_stats);
  x.insert(x.end(), e.begin(), e.end());
  return x;
}

}  // namespace

PerComponentModels train_monolithic_per_component(const Dataset& ds_train,
                                                  const GbtHyperparams& hp) {
  if (ds_train.samples().empty()) {
    throw Error(ErrorKind::kInvalidArgument, "per-component models: no training samples");
  }
  PerComponentModels m;
  m.component_table = ds_train.component_table();
  for (const auto& comp : m.component_table) {
    std::vector<std::vector<double>> rows;
    std::vector<double> labels;
    for (const auto& s : ds_train.samples()) {
      rows.push_back(component_row(comp, ds_train.config(s.config_id), s.event_stats));
      labels.push_back(s.component(comp.name));
    }
    m.models.emplace(comp.name, fit_gbt(FeatureMatrix::from_rows(rows), labels, hp));
  }
  return m;
}

double predict_component(const PerComponentModels& m, const std::string& component,
                         const Configuration& config,
                         const std::map<std::string, double>& event_stats) {
  const auto& comp = find_component(m.component_table, component);
  return predict_gbt(m.models.at(component), component_row(comp, config, event_stats));
}

double predict_components_total(const PerComponentModels& m, const Configuration& config,
                                const std::map<std::string, double>& event_stats) {
  double total = 0.0;
  for (const auto& comp : m.component_table) {
    total += predict_component(m, comp.name, config, event_stats);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Pseudo-label transfer

TransferWrapper make_transfer_wrapper(GbtModel source, std::vector<std::vector<double>> features,
                                      std::vector<double> labels, double epsilon) {
  if (features.empty()) throw Error(ErrorKind::kInvalidArgument, "transfer: empty labeled pool");
  if (features.size() != labels.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "transfer: pool features and labels differ");
  }
  const std::size_t d = features.front().size();
  for (const auto& f : features) {
    if (f.size() != d || d != source.feature_count) {
      throw Error(ErrorKind::kDimensionMismatch, "transfer: pool feature width mismatch");
    }
  }
  TransferWrapper w;
  w.source = std::move(source);
  w.epsilon = epsilon;
  w.mean.assign(d, 0.0);
  w.stddev.assign(d, 0.0);
  const double n = static_cast<double>(features.size());
  for (const auto& f : features) {
    for (std::size_t j = 0; j < d; ++j) w.mean[j] += f[j];
  }
  for (auto& m : w.mean) m /= n;
  for (const auto& f : features) {
    for (std::size_t j = 0; j < d; ++j) w.stddev[j] += (f[j] - w.mean[j]) * (f[j] - w.mean[j]);
  }
  for (auto& s : w.stddev) s = std::sqrt(s / n);
  w.pool_features = std::move(features);
  w.pool_labels = std::move(labels);
  return w;
}

std::size_t nearest_pool_index(const TransferWrapper& w, std::span<const double> x) {
  if (w.pool_features.empty()) throw Error(ErrorKind::kInvalidArgument, "transfer: empty pool");
  if (x.size() != w.mean.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "transfer: test feature width mismatch");
  }
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.pool_features.size(); ++i) {
    const auto& f = w.pool_features[i];
    double d2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (!(w.stddev[j] > 0.0)) continue;
      const double z = (x[j] - f[j]) / w.stddev[j];
      d2 += z * z;
    }
    if (d2 < best_d) {
      best_d = d2;
      best = i;
    }
  }
  return best;
}

double transfer_predict(const TransferWrapper& w, std::span<const double> x) {
  const std::size_t i = nearest_pool_index(w, x);
  const auto& nearest = w.pool_features[i];
  if (std::equal(x.begin(), x.end(), nearest.begin(), nearest.end())) return w.pool_labels[i];
  const double p_t = predict_gbt(w.source, x);
  const double p_l = predict_gbt(w.source, nearest);
  return p_t / std::max(p_l, w.epsilon) * w.pool_labels[i];
}

TransferWrapper monolithic_transfer(const MonolithicModel& source,
                                    const Dataset& ds_target_train) {
  std::vector<std::vector<double>> features;
  std::vector<double> labels;
  for (const auto& s : ds_target_train.samples()) {
    features.push_back(source.features.row(ds_target_train.config(s.config_id), s));
    labels.push_back(s.total_power);
  }
  return make_transfer_wrapper(source.model, std::move(features), std::move(labels));
}

std::map<std::string, TransferWrapper> per_component_transfer(const PerComponentModels& source,
                                                              const Dataset& ds_target_train) {
  std::map<std::string, TransferWrapper> out;
  for (const auto& comp : source.component_table) {
    std::vector<std::vector<double>> features;
    std::vector<double> labels;
    for (const auto& s : ds_target_train.samples()) {
      features.push_back(component_row(comp, ds_target_train.config(s.config_id), s.event_stats));
      labels.push_back(s.component(comp.name));
    }
    out.emplace(comp.name, make_transfer_wrapper(source.models.at(comp.name), std::move(features),
                                                 std::move(labels)));
  }
  return out;
}

FirePowerModel firepower_without_retraining(const KnowledgeBase& kb, const Dataset& ds_target_train,
                                            const GbtHyperparams& hp) {
  BuildOptions options;
  options.hyperparams = hp;
  options.force_no_retrain = true;
  return build_target_model(kb, ds_target_train, options);
}

}  // namespace firepower
