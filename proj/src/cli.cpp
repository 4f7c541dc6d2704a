// SPDX-License-Identifier: Apache-2.0
#include "firepower/cli.hpp"

#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "firepower/generalization.hpp"
#include "firepower/harness.hpp"
#include "firepower/metrics.hpp"
#include "firepower/synthgen.hpp"
#include "json_io.hpp"

namespace firepower {

namespace fs = std::filesystem;

namespace {

// Raised by a subcommand to request a specific exit code.
struct ExitRequest {
  int code;
  std::string message;
};

void add_gbt_flags(CLI::App* cmd, GbtHyperparams& hp) {
  cmd->add_option("--n-estimators", hp.n_estimators, "boosting rounds")->capture_default_str();
  cmd->add_option("--max-depth", hp.max_depth, "tree depth")->capture_default_str();
  cmd->add_option("--learning-rate", hp.learning_rate, "shrinkage")->capture_default_str();
  cmd->add_option("--min-samples-leaf", hp.min_samples_leaf, "minimum rows per leaf")
      ->capture_default_str();
  cmd->add_option("--l2-leaf-reg", hp.l2_leaf_reg, "L2 penalty on leaf values")
      ->capture_default_str();
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  fs::path out = p;
  out.replace_extension();
  out += suffix;
  return out;
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

std::string full(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

void print_strategy_table(const KnowledgeBase& kb, std::ostream& out) {
  out << std::left << std::setw(18) << "component" << std::setw(20) << "important_param"
      << std::setw(12) << "max_imp" << "strategy\n";
  for (const auto& comp : kb.component_table) {
    const auto& ck = kb.at(comp.name);
    double best = 0.0;
    for (const auto& [p, v] : ck.importance) best = std::max(best, v);
    out << std::left << std::setw(18) << comp.name
        << std::setw(20) << (ck.strategy.is_retrain() ? ck.strategy.important_param : "--")
        << std::setw(12) << fmt(best) << ck.strategy.describe() << '\n';
  }
  out << kb.retrain_count() << " of " << kb.component_table.size()
      << " components use Retraining\n";
}

void print_report(const GeneralizationReport& r, std::ostream& out) {
  out << std::left << std::setw(18) << "component" << std::setw(14) << "scale"
      << std::setw(12) << "mape%" << "verdict\n";
  for (const auto& name : r.order) {
    const auto& g = r.per_component.at(name);
    out << std::left << std::setw(18) << name << std::setw(14) << fmt(g.scaling_factor)
        << std::setw(12) << fmt(g.observed_mape, 2) << to_string(g.verdict) << '\n';
  }
}

int cmd_extract(const std::string& known, const std::string& out_path, const ExtractOptions& eo,
                std::ostream& out) {
  const auto ds = load_dataset(known);
  const auto kb = extract_knowledge(ds, eo);
  write_knowledge(kb, out_path);
  print_strategy_table(kb, out);
  out << "wrote " << out_path << '\n';
  return kExitOk;
}

int cmd_evaluate(const std::string& kb_path, const std::string& train_path, double gate,
                 const std::string& out_path, std::ostream& out) {
  const auto kb = load_knowledge(kb_path);
  const auto train = load_dataset(train_path);
  const auto report = evaluate_generalization(kb, train, gate);
  print_report(report, out);
  if (!out_path.empty()) {
    detail::write_text_atomic(out_path, report_to_csv(report));
    detail::write_text_atomic(with_suffix(out_path, ".points.csv"), report_points_csv(report));
    out << "wrote " << out_path << '\n';
  }
  return kExitOk;
}

int cmd_build(const std::string& kb_path, const std::string& train_path,
              const std::string& out_path, std::string report_path, double gate, bool fail_on_low,
              const BuildOptions& bo, std::ostream& out) {
  const auto kb = load_knowledge(kb_path);
  const auto train = load_dataset(train_path);
  const auto report = evaluate_generalization(kb, train, gate);
  const auto model = build_target_model(kb, train, bo);
  write_model(model, out_path);
  if (report_path.empty()) report_path = with_suffix(out_path, ".generalization.json").string();
  detail::write_text_atomic(report_path, report_to_string(report));
  detail::write_text_atomic(with_suffix(report_path, ".csv"), report_to_csv(report));
  print_report(report, out);
  out << model.retrained_count() << " retrained hardware models; wrote " << out_path << '\n';
  const auto low = report.low_components();
  if (fail_on_low && !low.empty()) {
    std::string names;
    for (const auto& n : low) names += (names.empty() ? "" : ", ") + n;
    throw ExitRequest{kExitGate, "low generalization quality: " + names};
  }
  return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& input,
                const std::string& out_path, std::ostream& out) {
  const auto model = load_model(model_path);
  LoadOptions lo;
  lo.require_labels = false;
  const auto ds = load_dataset(input, lo);
  std::ostringstream csv;
  csv.precision(17);
  csv << "config_id,workload,component,predicted_mw,label_mw\n";
  std::vector<double> preds;
  std::vector<double> labels;
  const bool labeled = ds.fully_labeled();
  for (const auto& s : ds.samples()) {
    const auto& config = ds.config(s.config_id);
    double total = 0.0;
    for (const auto& comp : model.component_table) {
      const double p = predict_component_power(model, comp.name, config, s.event_stats);
      total += p;
      csv << s.config_id << ',' << s.workload << ',' << comp.name << ',' << p << ',';
      auto it = s.component_power.find(comp.name);
      if (it != s.component_power.end()) csv << it->second;
      csv << '\n';
    }
    csv << s.config_id << ',' << s.workload << ",total," << total << ',';
    if (s.labeled()) csv << s.total_power;
    csv << '\n';
    preds.push_back(total);
    labels.push_back(s.total_power);
  }
  detail::write_text_atomic(out_path, csv.str());
  out << "wrote " << ds.samples().size() << " samples to " << out_path << '\n';
  if (labeled) {
    const double m = mape(preds, labels);
    std::string r = "nan";
    if (preds.size() >= 2) {
      try {
        r = full(pearson_r(preds, labels));
      } catch (const Error&) {
      }
    }
    std::ostringstream summary;
    summary << "metric,value\nmape_percent," << full(m) << "\npearson_r," << r << '\n';
    const auto summary_path = with_suffix(out_path, ".summary.csv");
    detail::write_text_atomic(summary_path, summary.str());
    out << "total power MAPE " << fmt(m, 3) << "%  R " << r << '\n';
  }
  return kExitOk;
}

int cmd_experiment(const std::string& known, const std::string& target, const std::vector<int>& ks,
                   int n_seeds, const std::vector<std::string>& method_keys,
                   const std::string& out_dir, const std::string& analytical,
                   const ExperimentOptions& base, std::ostream& out) {
  if (n_seeds < 1) throw ExitRequest{kExitUsage, "--seeds must be >= 1"};
  for (int k : ks) {
    if (k < 1) throw ExitRequest{kExitUsage, "--ks entries must be >= 1"};
  }
  std::vector<Method> methods;
  for (const auto& key : method_keys) {
    try {
      methods.push_back(parse_method(key));
    } catch (const Error& e) {
      throw ExitRequest{kExitUsage, e.what()};
    }
  }
  if (methods.empty()) methods = all_methods();
  ExperimentOptions eo = base;
  if (analytical == "on") eo.use_analytical = true;
  if (analytical == "off") eo.use_analytical = false;
  std::vector<std::uint64_t> seeds;
  for (int s = 1; s <= n_seeds; ++s) seeds.push_back(static_cast<std::uint64_t>(s));

  const auto ds_known = load_dataset(known);
  const auto ds_target = load_dataset(target);
  const auto results = run_experiment(ds_known, ds_target, methods, ks, seeds, eo);
  const auto summary = summarize(results);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  detail::write_text_atomic(dir / "results.csv", results_csv(results));
  detail::write_text_atomic(dir / "per_sample.csv", per_sample_csv(results));
  const auto table = summary_table(summary);
  detail::write_text_atomic(dir / "summary.txt", table);
  out << table;
  out << results.size() << " runs; wrote " << (dir / "results.csv").string() << '\n';
  return kExitOk;
}

int cmd_synth(const std::string& spec_path, std::optional<std::uint64_t> seed,
              const std::string& out_dir, std::ostream& out) {
  SynthSpec spec = spec_path.empty() ? default_synth_spec() : load_spec(spec_path);
  if (seed) spec.seed = *seed;
  const auto pair = generate_pair(spec);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_dataset(pair.known, dir / "known.json");
  write_dataset(pair.target, dir / "target.json");
  detail::write_text_atomic(dir / "truth.json", truth_to_string(pair.truth));
  detail::write_text_atomic(dir / "spec.json", spec_to_string(spec));
  out << "known: " << pair.known.configurations().size() << " configs, "
      << pair.known.samples().size() << " samples\n"
      << "target: " << pair.target.configurations().size() << " configs, "
      << pair.target.samples().size() << " samples\n"
      << "wrote " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Few-shot cross-architecture component power modeling", "firepower"};
  app.set_config("--config", "", "TOML/INI file with option defaults");
  app.allow_config_extras(false);
  app.require_subcommand(1);

  GbtHyperparams hp;

  // extract
  auto* extract = app.add_subcommand("extract", "learn hardware models and strategies");
  std::string known_path;
  std::string kb_out;
  ExtractOptions eo;
  extract->add_option("--known", known_path, "known-architecture dataset")->required();
  extract->add_option("--out", kb_out, "knowledge base output")->required();
  extract->add_option("--threshold", eo.threshold, "importance threshold")->capture_default_str();
  extract->add_option("--min-variation", eo.min_power_variation,
                      "minimum power variation for Retraining")
      ->capture_default_str();
  add_gbt_flags(extract, hp);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "generalization report only");
  std::string ev_kb;
  std::string ev_train;
  std::string ev_out;
  double ev_gate = kDefaultGeneralizationThreshold;
  evaluate->add_option("--kb", ev_kb, "knowledge base")->required();
  evaluate->add_option("--target-train", ev_train, "labeled target dataset")->required();
  evaluate->add_option("--out", ev_out, "CSV report");
  evaluate->add_option("--gate-threshold", ev_gate, "MAPE percent")->capture_default_str();

  // build
  auto* build = app.add_subcommand("build", "build the target-architecture model");
  std::string b_kb;
  std::string b_train;
  std::string b_out;
  std::string b_report;
  double b_gate = kDefaultGeneralizationThreshold;
  bool fail_on_low = false;
  BuildOptions bo;
  build->add_option("--kb", b_kb, "knowledge base")->required();
  build->add_option("--target-train", b_train, "labeled target dataset")->required();
  build->add_option("--out", b_out, "model output")->required();
  build->add_option("--report", b_report, "generalization report (JSON)");
  build->add_option("--gate-threshold", b_gate, "MAPE percent")->capture_default_str();
  build->add_flag("--fail-on-low-generalization", fail_on_low, "exit 3 on any Low verdict");
  build->add_flag("--no-retrain", bo.force_no_retrain, "inherit every hardware model");
  add_gbt_flags(build, hp);

  // predict
  auto* predict = app.add_subcommand("predict", "predict component and total power");
  std::string p_model;
  std::string p_input;
  std::string p_out;
  predict->add_option("--model", p_model, "target model")->required();
  predict->add_option("--input", p_input, "dataset (labels optional)")->required();
  predict->add_option("--out", p_out, "CSV output")->required();

  // experiment
  auto* experiment = app.add_subcommand("experiment", "few-shot comparison of all methods");
  std::string x_known;
  std::string x_target;
  std::vector<int> ks = {2, 3, 4};
  int n_seeds = 10;
  std::vector<std::string> method_keys;
  std::string x_out;
  std::string analytical = "auto";
  ExperimentOptions xo;
  experiment->add_option("--known", x_known, "known-architecture dataset")->required();
  experiment->add_option("--target", x_target, "target-architecture dataset")->required();
  experiment->add_option("--ks", ks, "labeled configuration counts")
      ->delimiter(',')
      ->capture_default_str();
  experiment->add_option("--seeds", n_seeds, "number of seeds (1..N)")->capture_default_str();
  experiment->add_option("--methods", method_keys, "method keys (default: all)")->delimiter(',');
  experiment->add_option("--out", x_out, "output directory")->required();
  experiment->add_option("--threshold", xo.threshold, "importance threshold")
      ->capture_default_str();
  experiment->add_option("--analytical", analytical, "use analytical estimate feature")
      ->check(CLI::IsMember({"auto", "on", "off"}))
      ->capture_default_str();
  add_gbt_flags(experiment, hp);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic known/target pair");
  std::string s_spec;
  std::optional<std::uint64_t> s_seed;
  std::string s_out;
  synth->add_option("--spec", s_spec, "synth spec JSON (default spec when omitted)");
  synth->add_option("--seed", s_seed, "override the generator seed");
  synth->add_option("--out-dir", s_out, "output directory")->required();

  std::vector<std::string> argv_store;
  argv_store.push_back("firepower");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    hp.validate();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*extract) {
      eo.hyperparams = hp;
      return cmd_extract(known_path, kb_out, eo, out);
    }
    if (*evaluate) return cmd_evaluate(ev_kb, ev_train, ev_gate, ev_out, out);
    if (*build) {
      bo.hyperparams = hp;
      return cmd_build(b_kb, b_train, b_out, b_report, b_gate, fail_on_low, bo, out);
    }
    if (*predict) return cmd_predict(p_model, p_input, p_out, out);
    if (*experiment) {
      xo.hyperparams = hp;
      return cmd_experiment(x_known, x_target, ks, n_seeds, method_keys, x_out, analytical, xo,
                            out);
    }
    if (*synth) return cmd_synth(s_spec, s_seed, s_out, out);
  } catch (const ExitRequest& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace firepower
