// Python bindings for the core pipeline. Heavy structures stay opaque and
// move across the boundary as JSON text; results come back as plain dicts.
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "firepower/application.hpp"
#include "firepower/cli.hpp"
#include "firepower/generalization.hpp"
#include "firepower/harness.hpp"
#include "firepower/knowledge.hpp"
#include "firepower/metrics.hpp"
#include "firepower/synthgen.hpp"

namespace py = pybind11;
using namespace firepower;

namespace {

GbtHyperparams make_hp(int n_estimators, int max_depth, double learning_rate) {
  GbtHyperparams hp;
  hp.n_estimators = n_estimators;
  hp.max_depth = max_depth;
  hp.learning_rate = learning_rate;
  hp.validate();
  return hp;
}

py::list per_sample_rows(const FirePowerModel& m, const Dataset& ds) {
  py::list rows;
  for (const auto& s : ds.samples()) {
    const auto& config = ds.config(s.config_id);
    py::dict comps;
    double total = 0.0;
    for (const auto& comp : m.component_table) {
      const double p = predict_component_power(m, comp.name, config, s.event_stats);
      comps[py::str(comp.name)] = p;
      total += p;
    }
    py::dict row;
    row["config_id"] = s.config_id;
    row["workload"] = s.workload;
    row["predicted"] = total;
    row["label"] = s.labeled() ? py::object(py::float_(s.total_power)) : py::object(py::none());
    row["components"] = comps;
    rows.append(row);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Component-wise few-shot CPU power modeling";

  py::register_exception<Error>(m, "FirePowerError", PyExc_ValueError);

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("architecture", &Dataset::architecture)
      .def_property_readonly("config_ids", &Dataset::config_ids)
      .def_property_readonly("n_samples", [](const Dataset& d) { return d.samples().size(); })
      .def_property_readonly("components", [](const Dataset& d) {
        std::vector<std::string> names;
        for (const auto& c : d.component_table()) names.push_back(c.name);
        return names;
      })
      .def_property_readonly("fully_labeled", &Dataset::fully_labeled)
      .def("config_params", [](const Dataset& d, const std::string& id) { return d.config(id).params; })
      .def("average_power", [](const Dataset& d, const std::string& comp) {
        return average_power_per_config(d, comp);
      })
      .def("to_json", [](const Dataset& d) { return dataset_to_string(d); })
      .def("save", [](const Dataset& d, const std::filesystem::path& p) { write_dataset(d, p); })
      .def(py::self == py::self)
      .def("__repr__", [](const Dataset& d) {
        std::ostringstream os;
        os << "<Dataset " << d.architecture() << ": " << d.configurations().size() << " configs, "
           << d.samples().size() << " samples>";
        return os.str();
      });

  py::class_<KnowledgeBase>(m, "KnowledgeBase")
      .def_readonly("threshold", &KnowledgeBase::threshold)
      .def_property_readonly("retrain_count", &KnowledgeBase::retrain_count)
      .def("strategies", [](const KnowledgeBase& kb) {
        std::map<std::string, std::optional<std::string>> out;
        for (const auto& [name, ck] : kb.per_component) {
          out[name] = ck.strategy.is_retrain() ? std::optional(ck.strategy.important_param) : std::nullopt;
        }
        return out;
      }, "component -> important parameter, or None when the model is inherited")
      .def("importance", [](const KnowledgeBase& kb, const std::string& comp) {
        std::map<std::string, double> out;
        for (const auto& [p, v] : kb.at(comp).importance) out[p] = v;
        return out;
      })
      .def("to_json", [](const KnowledgeBase& kb) { return knowledge_to_string(kb); })
      .def("save", [](const KnowledgeBase& kb, const std::filesystem::path& p) { write_knowledge(kb, p); })
      .def(py::self == py::self);

  py::class_<FirePowerModel>(m, "Model")
      .def_property_readonly("retrained_count", &FirePowerModel::retrained_count)
      .def("retrained", [](const FirePowerModel& fm) {
        std::map<std::string, std::string> out;
        for (const auto& [name, cm] : fm.per_component) {
          if (cm.hw.retrained()) out[name] = cm.hw.retrained_param;
        }
        return out;
      })
      .def("predict", &per_sample_rows, py::arg("dataset"),
           "per-sample dicts with total, label and per-component predictions")
      .def("predict_total", [](const FirePowerModel& fm, const Dataset& ds) {
        std::vector<double> out;
        for (const auto& s : ds.samples()) {
          out.push_back(predict_total_power(fm, ds.config(s.config_id), s.event_stats));
        }
        return out;
      })
      .def("to_json", [](const FirePowerModel& fm) { return model_to_string(fm); })
      .def("save", [](const FirePowerModel& fm, const std::filesystem::path& p) { write_model(fm, p); })
      .def(py::self == py::self);

  py::class_<GeneralizationReport>(m, "GeneralizationReport")
      .def_readonly("threshold", &GeneralizationReport::threshold)
      .def("low_components", &GeneralizationReport::low_components)
      .def("rows", [](const GeneralizationReport& r) {
        py::list rows;
        for (const auto& name : r.order) {
          const auto& g = r.per_component.at(name);
          py::dict row;
          row["component"] = name;
          row["scaling_factor"] = g.scaling_factor;
          row["mape_percent"] = g.observed_mape;
          row["verdict"] = to_string(g.verdict);
          rows.append(row);
        }
        return rows;
      })
      .def("to_csv", &report_to_csv)
      .def("to_json", &report_to_string);

  m.def("parse_dataset", [](const std::string& text, bool require_labels) {
    LoadOptions lo;
    lo.require_labels = require_labels;
    return parse_dataset(text, lo);
  }, py::arg("text"), py::arg("require_labels") = true);
  m.def("load_dataset", [](const std::filesystem::path& p, bool require_labels) {
    LoadOptions lo;
    lo.require_labels = require_labels;
    return load_dataset(p, lo);
  }, py::arg("path"), py::arg("require_labels") = true);
  m.def("parse_knowledge", [](const std::string& t) { return knowledge_from_string(t); });
  m.def("load_knowledge", [](const std::filesystem::path& p) { return load_knowledge(p); });
  m.def("parse_model", [](const std::string& t) { return model_from_string(t); });
  m.def("load_model", [](const std::filesystem::path& p) { return load_model(p); });

  m.def("synth", [](std::uint64_t seed, std::optional<std::string> spec_json,
                    std::vector<std::string> dissimilar) {
    SynthSpec spec = spec_json ? spec_from_string(*spec_json) : default_synth_spec(seed);
    if (!spec_json) spec.seed = seed;
    for (auto& c : spec.components) {
      for (const auto& d : dissimilar) {
        if (c.name == d) c.dissimilar = true;
      }
    }
    auto pair = generate_pair(spec);
    return py::make_tuple(pair.known, pair.target, truth_to_string(pair.truth));
  }, py::arg("seed") = 1, py::arg("spec_json") = py::none(),
     py::arg("dissimilar") = std::vector<std::string>{},
     "(known, target, truth_json) synthetic dataset pair");
  m.def("default_spec_json", [](std::uint64_t seed) { return spec_to_string(default_synth_spec(seed)); },
        py::arg("seed") = 1);

  m.def("choose_labeled_configs", &choose_labeled_configs, py::arg("dataset"), py::arg("k"),
        py::arg("seed"));
  m.def("few_shot_split", [](const Dataset& ds, const std::vector<std::string>& ids) {
    auto [train, test] = few_shot_split(ds, ids);
    return py::make_tuple(train, test);
  });

  m.def("extract_knowledge", [](const Dataset& ds, double threshold, double min_variation,
                                int n_estimators, int max_depth, double learning_rate) {
    ExtractOptions eo;
    eo.threshold = threshold;
    eo.min_power_variation = min_variation;
    eo.hyperparams = make_hp(n_estimators, max_depth, learning_rate);
    return extract_knowledge(ds, eo);
  }, py::arg("known"), py::arg("threshold") = kDefaultStrategyThreshold,
     py::arg("min_variation") = kDefaultMinPowerVariation, py::arg("n_estimators") = 100,
     py::arg("max_depth") = 3, py::arg("learning_rate") = 0.3);

  m.def("evaluate_generalization", &evaluate_generalization, py::arg("kb"), py::arg("target_train"),
        py::arg("threshold") = kDefaultGeneralizationThreshold);

  m.def("build_target_model", [](const KnowledgeBase& kb, const Dataset& train, bool no_retrain,
                                 int n_estimators, int max_depth, double learning_rate) {
    BuildOptions bo;
    bo.force_no_retrain = no_retrain;
    bo.hyperparams = make_hp(n_estimators, max_depth, learning_rate);
    return build_target_model(kb, train, bo);
  }, py::arg("kb"), py::arg("target_train"), py::arg("no_retrain") = false,
     py::arg("n_estimators") = 100, py::arg("max_depth") = 3, py::arg("learning_rate") = 0.3);

  m.def("methods", [] {
    std::vector<std::string> keys;
    for (auto meth : all_methods()) keys.emplace_back(method_key(meth));
    return keys;
  });
  m.def("run_experiment", [](const Dataset& known, const Dataset& target,
                             std::optional<std::vector<std::string>> methods, std::vector<int> ks,
                             std::vector<std::uint64_t> seeds, double threshold) {
    std::vector<Method> ms;
    if (methods) {
      for (const auto& key : *methods) ms.push_back(parse_method(key));
    } else {
      ms = all_methods();
    }
    ExperimentOptions eo;
    eo.threshold = threshold;
    const auto results = run_experiment(known, target, ms, ks, seeds, eo);
    py::list rows;
    for (const auto& r : results) {
      py::dict row;
      row["method"] = std::string(method_key(r.method));
      row["k"] = r.k;
      row["seed"] = r.seed;
      row["mape_percent"] = r.mape_percent;
      row["pearson_r"] = r.pearson_r;
      row["labeled_configs"] = r.labeled_configs;
      rows.append(row);
    }
    return rows;
  }, py::arg("known"), py::arg("target"), py::arg("methods") = py::none(),
     py::arg("ks") = std::vector<int>{2, 3, 4}, py::arg("seeds") = std::vector<std::uint64_t>{1},
     py::arg("threshold") = kDefaultStrategyThreshold);

  m.def("mape", [](const std::vector<double>& p, const std::vector<double>& l) { return mape(p, l); });
  m.def("pearson_r", [](const std::vector<double>& p, const std::vector<double>& l) {
    return pearson_r(p, l);
  });
  m.def("ideal_scaling_factor", [](const std::vector<double>& p, const std::vector<double>& l) {
    return ideal_scaling_factor(p, l);
  });

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "(exit_code, stdout, stderr); args exclude the program name");
}
