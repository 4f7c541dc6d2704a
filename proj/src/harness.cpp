// SPDX-License-Identifier: Apache-2.0
#include "firepower/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "firepower/metrics.hpp"

namespace firepower {

std::string_view method_key(Method m) {
  switch (m) {
    case Method::kMcpatCalib: return "mcpat_calib";
    case Method::kMcpatCalibComponent: return "mcpat_calib_component";
    case Method::kMcpatCalibTransfer: return "mcpat_calib_transfer";
    case Method::kMcpatCalibComponentTransfer: return "mcpat_calib_component_transfer";
    case Method::kFirePowerNoRetrain: return "firepower_no_retrain";
    case Method::kFirePower: return "firepower";
  }
  return "unknown";
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {
      Method::kMcpatCalib,         Method::kMcpatCalibComponent,
      Method::kMcpatCalibTransfer, Method::kMcpatCalibComponentTransfer,
      Method::kFirePowerNoRetrain, Method::kFirePower,
  };
  return methods;
}

Method parse_method(std::string_view key) {
  for (auto m : all_methods()) {
    if (method_key(m) == key) return m;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown method '" + std::string(key) + "'");
}

std::vector<std::string> choose_labeled_configs(const Dataset& ds_target, int k,
                                                std::uint64_t seed) {
  const auto ids = ds_target.config_ids();
  if (k < 1 || static_cast<std::size_t>(k) >= ids.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "cannot label " + std::to_string(k) + " of " + std::to_string(ids.size()) +
                    " target configurations and keep a test set");
  }
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(k));
  std::vector<std::size_t> order(ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<std::size_t> chosen(order.begin(), order.begin() + k);
  std::sort(chosen.begin(), chosen.end());
  std::vector<std::string> out;
  for (auto i : chosen) out.push_back(ids[i]);
  return out;
}

namespace {

bool all_have_analytical(const Dataset& ds) {
  return std::all_of(ds.samples().begin(), ds.samples().end(),
                     [](const PowerSample& s) { return s.analytical_estimate.has_value(); });
}

// Models trained once on the known architecture and shared by every split.
struct KnownArtifacts {
  std::optional<KnowledgeBase> kb;
  std::optional<MonolithicModel> monolithic;
  std::optional<PerComponentModels> per_component;
};

bool wants(const std::vector<Method>& methods, Method m) {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

EvalResult score(Method method, int k, std::uint64_t seed, std::vector<std::string> labeled,
                 std::vector<SamplePrediction> per_sample) {
  EvalResult r;
  r.method = method;
  r.k = k;
  r.seed = seed;
  r.labeled_configs = std::move(labeled);
  std::vector<double> preds;
  std::vector<double> labels;
  for (const auto& p : per_sample) {
    preds.push_back(p.predicted);
    labels.push_back(p.label);
  }
  r.mape_percent = mape(preds, labels);
  try {
    r.pearson_r = pearson_r(preds, labels);
  } catch (const Error&) {
    r.pearson_r = std::numeric_limits<double>::quiet_NaN();
  }
  r.per_sample = std::move(per_sample);
  return r;
}

}  // namespace

std::vector<EvalResult> run_experiment(const Dataset& ds_known, const Dataset& ds_target,
                                       const std::vector<Method>& methods,
                                       const std::vector<int>& ks,
                                       const std::vector<std::uint64_t>& seeds,
                                       const ExperimentOptions& options) {
  if (methods.empty()) throw Error(ErrorKind::kInvalidArgument, "no methods requested");
  const int max_k = ks.empty() ? 0 : *std::max_element(ks.begin(), ks.end());
  if (static_cast<std::size_t>(max_k) >= ds_target.configurations().size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "target dataset needs more than " + std::to_string(max_k) + " configurations");
  }
  if (!ds_known.fully_labeled() || !ds_target.fully_labeled()) {
    throw Error(ErrorKind::kMissingData, "experiment datasets must be fully labeled");
  }
  const bool use_m = options.use_analytical.value_or(all_have_analytical(ds_known) &&
                                                     all_have_analytical(ds_target));
  const auto& hp = options.hyperparams;

  KnownArtifacts known;
  if (wants(methods, Method::kFirePower) || wants(methods, Method::kFirePowerNoRetrain)) {
    ExtractOptions eo;
    eo.hyperparams = hp;
    eo.threshold = options.threshold;
    eo.min_power_variation = options.min_power_variation;
    known.kb = extract_knowledge(ds_known, eo);
  }
  if (wants(methods, Method::kMcpatCalibTransfer)) {
    known.monolithic = train_monolithic(ds_known, use_m, hp);
  }
  if (wants(methods, Method::kMcpatCalibComponentTransfer)) {
    known.per_component = train_monolithic_per_component(ds_known, hp);
  }

  std::vector<EvalResult> results;
  for (int k : ks) {
    for (auto seed : seeds) {
      const auto labeled = choose_labeled_configs(ds_target, k, seed);
      const auto [train, test] = few_shot_split(ds_target, labeled);

      for (auto method : methods) {
        std::vector<SamplePrediction> per_sample;
        auto emit = [&](const PowerSample& s, double pred) {
          per_sample.push_back({s.config_id, s.workload, pred, s.total_power});
        };
        switch (method) {
          case Method::kMcpatCalib: {
            const auto m = train_monolithic(train, use_m, hp);
            for (const auto& s : test.samples()) {
              emit(s, predict_monolithic(m, test.config(s.config_id), s));
            }
            break;
          }
          case Method::kMcpatCalibComponent: {
            const auto m = train_monolithic_per_component(train, hp);
            for (const auto& s : test.samples()) {
              emit(s, predict_components_total(m, test.config(s.config_id), s.event_stats));
            }
            break;
          }
          case Method::kMcpatCalibTransfer: {
            const auto w = monolithic_transfer(*known.monolithic, train);
            for (const auto& s : test.samples()) {
              emit(s, transfer_predict(w, known.monolithic->features.row(
                                                 test.config(s.config_id), s)));
            }
            break;
          }
          case Method::kMcpatCalibComponentTransfer: {
            const auto wrappers = per_component_transfer(*known.per_component, train);
            for (const auto& s : test.samples()) {
              const auto& config = test.config(s.config_id);
              double total = 0.0;
              for (const auto& comp : known.per_component->component_table) {
                auto x = hardware_features(comp, config);
                const auto e = event_features(comp, s.event_stats);
                x.insert(x.end(), e.begin(), e.end());
                total += transfer_predict(wrappers.at(comp.name), x);
              }
              emit(s, total);
            }
            break;
          }
          case Method::kFirePowerNoRetrain:
          case Method::kFirePower: {
            BuildOptions bo;
            bo.hyperparams = hp;
            bo.force_no_retrain = method == Method::kFirePowerNoRetrain;
            const auto m = build_target_model(*known.kb, train, bo);
            for (const auto& s : test.samples()) {
              emit(s, predict_total_power(m, test.config(s.config_id), s.event_stats));
            }
            break;
          }
        }
        results.push_back(score(method, k, seed, labeled, std::move(per_sample)));
      }
    }
  }
  std::stable_sort(results.begin(), results.end(), [](const EvalResult& a, const EvalResult& b) {
    if (a.method != b.method) return a.method < b.method;
    if (a.k != b.k) return a.k < b.k;
    return a.seed < b.seed;
  });
  return results;
}

std::vector<SummaryRow> summarize(const std::vector<EvalResult>& results) {
  std::map<std::pair<Method, int>, std::vector<const EvalResult*>> groups;
  for (const auto& r : results) groups[{r.method, r.k}].push_back(&r);
  std::vector<SummaryRow> rows;
  for (const auto& [key, rs] : groups) {
    SummaryRow row;
    row.method = key.first;
    row.k = key.second;
    row.runs = rs.size();
    const double n = static_cast<double>(rs.size());
    for (const auto* r : rs) {
      row.mean_mape += r->mape_percent;
      row.mean_r += r->pearson_r;
    }
    row.mean_mape /= n;
    row.mean_r /= n;
    for (const auto* r : rs) row.std_mape += (r->mape_percent - row.mean_mape) * (r->mape_percent - row.mean_mape);
    row.std_mape = std::sqrt(row.std_mape / n);
    rows.push_back(row);
  }
  return rows;
}

const SummaryRow& find_summary(const std::vector<SummaryRow>& rows, Method m, int k) {
  for (const auto& r : rows) {
    if (r.method == m && r.k == k) return r;
  }
  throw Error(ErrorKind::kInvalidArgument, "no summary for " + std::string(method_key(m)) +
                                               " at k=" + std::to_string(k));
}

std::string results_csv(const std::vector<EvalResult>& results) {
  std::ostringstream out;
  out.precision(17);
  out << "method,k,seed,mape_percent,pearson_r\n";
  for (const auto& r : results) {
    out << method_key(r.method) << ',' << r.k << ',' << r.seed << ',' << r.mape_percent << ','
        << r.pearson_r << '\n';
  }
  return out.str();
}

std::string per_sample_csv(const std::vector<EvalResult>& results) {
  std::ostringstream out;
  out.precision(17);
  out << "method,k,seed,config_id,workload,predicted_mw,label_mw\n";
  for (const auto& r : results) {
    for (const auto& p : r.per_sample) {
      out << method_key(r.method) << ',' << r.k << ',' << r.seed << ',' << p.config_id << ','
          << p.workload << ',' << p.predicted << ',' << p.label << '\n';
    }
  }
  return out.str();
}

std::string summary_table(const std::vector<SummaryRow>& rows) {
  std::set<int> ks;
  for (const auto& r : rows) ks.insert(r.k);
  std::ostringstream out;
  out << std::left << std::setw(32) << "method";
  for (int k : ks) {
    out << std::right << std::setw(22) << ("k=" + std::to_string(k) + " MAPE% (R)");
  }
  out << '\n';
  for (auto m : all_methods()) {
    if (std::none_of(rows.begin(), rows.end(), [&](const SummaryRow& r) { return r.method == m; })) {
      continue;
    }
    out << std::left << std::setw(32) << method_key(m);
    for (int k : ks) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(2);
      auto it = std::find_if(rows.begin(), rows.end(),
                             [&](const SummaryRow& r) { return r.method == m && r.k == k; });
      if (it == rows.end()) {
        cell << "-";
      } else {
        cell << it->mean_mape << " (" << std::setprecision(3) << it->mean_r << ")";
      }
      out << std::right << std::setw(22) << cell.str();
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace firepower
