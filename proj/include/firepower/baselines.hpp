// SPDX-License-Identifier: Apache-2.0
//
// Comparison methods: a McPAT-Calib-style monolithic regressor, its
// per-component variant, pseudo-label transfer on top of either, and
// FirePower restricted to inherited hardware models.
#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "firepower/application.hpp"

namespace firepower {

// Feature layout of the monolithic model: every hardware parameter, every
// event statistic of the component table (first-appearance order), then the
// analytical estimate when used.
struct MonolithicFeatures {
  std::vector<std::string> hw_params;
  std::vector<std::string> event_stats;
  bool analytical = false;

  std::size_t size() const { return hw_params.size() + event_stats.size() + (analytical ? 1 : 0); }
  std::vector<double> row(const Configuration& config, const PowerSample& sample) const;
  bool operator==(const MonolithicFeatures&) const = default;
};

MonolithicFeatures monolithic_features(const Dataset& ds, bool use_analytical);

struct MonolithicModel {
  GbtModel model;
  MonolithicFeatures features;
  bool uses_analytical_feature = false;
};

MonolithicModel train_monolithic(const Dataset& ds_train, bool use_analytical,
                                 const GbtHyperparams& hp);
double predict_monolithic(const MonolithicModel& m, const Configuration& config,
                          const PowerSample& sample);

struct PerComponentModels {
  ComponentTable component_table;
  std::map<std::string, GbtModel> models;  // features: H_i ++ E_i
};

PerComponentModels train_monolithic_per_component(const Dataset& ds_train,
                                                  const GbtHyperparams& hp);
double predict_component(const PerComponentModels& m, const std::string& component,
                         const Configuration& config,
                         const std::map<std::string, double>& event_stats);
// Sum over the component table, in table order.
double predict_components_total(const PerComponentModels& m, const Configuration& config,
                                const std::map<std::string, double>& event_stats);

// Pseudo-label transfer: P_t = (p_t / p_l) * L with L the label of the
// nearest labeled target sample (Euclidean on features z-scored with the
// pool's mean/std; zero-std features ignored; ties to the earliest entry).
struct TransferWrapper {
  GbtModel source;
  std::vector<std::vector<double>> pool_features;
  std::vector<double> pool_labels;
  std::vector<double> mean;
  std::vector<double> stddev;
  double epsilon = kDefaultHardwareEpsilon;
};

TransferWrapper make_transfer_wrapper(GbtModel source, std::vector<std::vector<double>> features,
                                      std::vector<double> labels,
                                      double epsilon = kDefaultHardwareEpsilon);
std::size_t nearest_pool_index(const TransferWrapper& w, std::span<const double> x);
double transfer_predict(const TransferWrapper& w, std::span<const double> x);

TransferWrapper monolithic_transfer(const MonolithicModel& source, const Dataset& ds_target_train);
std::map<std::string, TransferWrapper> per_component_transfer(const PerComponentModels& source,
                                                              const Dataset& ds_target_train);

FirePowerModel firepower_without_retraining(const KnowledgeBase& kb, const Dataset& ds_target_train,
                                            const GbtHyperparams& hp);

}  // namespace firepower
