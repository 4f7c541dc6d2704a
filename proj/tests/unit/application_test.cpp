#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <random>

#include "firepower/application.hpp"
#include "firepower/harness.hpp"
#include "firepower/metrics.hpp"
#include "firepower/synthgen.hpp"
#include "test_support.hpp"

using namespace firepower;

namespace {

// Alu powers per (config, workload); Other Logic fixed at 1 mW.
Dataset hand_dataset(const std::vector<std::pair<std::int64_t, std::vector<double>>>& rows) {
  std::vector<Configuration> configs;
  std::vector<PowerSample> samples;
  int i = 0;
  for (const auto& [dw, powers] : rows) {
    auto c = fptest::make_config("C" + std::to_string(++i), {{"DecodeWidth", dw}});
    for (std::size_t w = 0; w < powers.size(); ++w) {
      PowerSample s;
      s.config_id = c.id;
      s.workload = "w" + std::to_string(w);
      s.event_stats["alu.rate"] = 0.5 + 0.1 * static_cast<double>(w);
      s.component_power["Alu"] = powers[w];
      s.component_power[std::string(kOtherLogic)] = 1.0;
      s.total_power = powers[w] + 1.0;
      samples.push_back(s);
    }
    configs.push_back(c);
  }
  return Dataset("hand", ParameterRegistry::builtin(), fptest::tiny_table(), configs, samples);
}

ComponentSpec& component(SynthSpec& spec, const std::string& name) {
  for (auto& c : spec.components) {
    if (c.name == name) return c;
  }
  throw std::runtime_error("no component " + name);
}

double component_mape(const FirePowerModel& m, const Dataset& test, const std::string& comp) {
  std::vector<double> p;
  std::vector<double> l;
  for (const auto& s : test.samples()) {
    p.push_back(predict_component_power(m, comp, test.config(s.config_id), s.event_stats));
    l.push_back(s.component_power.at(comp));
  }
  return mape(p, l);
}

}  // namespace

TEST(Retrain, TwoPointExactFit) {
  const auto ds = hand_dataset({{2, {3.0, 5.0}}, {4, {7.0, 9.0}}});
  const auto m = retrain_hardware_model(ds, ds.component("Alu"), "DecodeWidth");
  EXPECT_NEAR(m.slope, 2.0, 1e-12);
  EXPECT_NEAR(m.intercept, 0.0, 1e-12);
  EXPECT_EQ(m.feature_index, 0);
}

TEST(Retrain, EqualParameterGivesConstant) {
  const auto ds = hand_dataset({{3, {4.0, 6.0}}, {3, {8.0, 10.0}}});
  const auto m = retrain_hardware_model(ds, ds.component("Alu"), "DecodeWidth");
  EXPECT_TRUE(m.is_constant);
  EXPECT_DOUBLE_EQ(predict_linear(m, 1.0), 7.0);
}

TEST(Retrain, ParameterOutsideComponentThrows) {
  const auto ds = hand_dataset({{2, {3.0}}, {4, {7.0}}});
  EXPECT_THROW(retrain_hardware_model(ds, ds.component("Alu"), "MSHREntry"), Error);
}

TEST(Retrain, SynthLinearTruthWithin5Percent) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto pair = generate_pair(default_synth_spec(seed));
    const auto labeled = choose_labeled_configs(pair.target, 4, seed);
    const auto [train, test] = few_shot_split(pair.target, labeled);
    const auto& comp = train.component("RNU");
    const auto lin = retrain_hardware_model(train, comp, "DecodeWidth");
    if (lin.is_constant) continue;
    for (const auto& c : test.configurations()) {
      double truth = 0.0;
      for (const auto& w : pair.truth.workloads) {
        truth += truth_component_power(pair.truth, true, "RNU", c, w);
      }
      truth /= static_cast<double>(pair.truth.workloads.size());
      const double pred = predict_linear(lin, static_cast<double>(c.params.at("DecodeWidth")));
      EXPECT_NEAR(pred, truth, 0.05 * truth) << "seed " << seed << " " << c.id;
    }
  }
}

TEST(EffectiveHw, InheritedMatchesKnownModel) {
  const auto pair = generate_pair(default_synth_spec(1));
  const auto kb = extract_knowledge(pair.known);
  const auto& comp = pair.known.component("ROB");
  EffectiveHardwareModel hw{"ROB", kb.at("ROB").hardware_model, ""};
  for (const auto& c : pair.target.configurations()) {
    EXPECT_EQ(effective_hw_predict(hw, comp, c),
              std::max(kDefaultHardwareEpsilon,
                       predict_gbt(kb.at("ROB").hardware_model, hardware_features(comp, c))));
  }
}

TEST(EffectiveHw, RetrainedAndClamped) {
  const auto table = fptest::tiny_table();
  EffectiveHardwareModel hw{"Alu", LinearModel{0, 2.0, 0.0, false}, "DecodeWidth"};
  EXPECT_DOUBLE_EQ(effective_hw_predict(hw, table[0], fptest::make_config("c", {{"DecodeWidth", 5}})),
                   10.0);
  EffectiveHardwareModel neg{"Alu", LinearModel{0, 1.0, -6.5, false}, "DecodeWidth"};
  EXPECT_EQ(effective_hw_predict(neg, table[0], fptest::make_config("c", {{"DecodeWidth", 6}})),
            kDefaultHardwareEpsilon);
}

TEST(EventModel, ExactHardwareGivesUnitRatio) {
  // Power independent of workload, so a retrained line reproduces every sample.
  const auto ds = hand_dataset({{2, {4.0, 4.0, 4.0}}, {4, {8.0, 8.0, 8.0}}, {6, {12.0, 12.0, 12.0}}});
  const auto& comp = ds.component("Alu");
  EffectiveHardwareModel hw{"Alu", retrain_hardware_model(ds, comp, "DecodeWidth"), "DecodeWidth"};
  const auto ev = train_event_model(ds, comp, hw, {});
  EXPECT_EQ(ev.model.feature_count, comp.hw_params.size() + comp.event_stats.size());
  for (const auto& s : ds.samples()) {
    const auto x = feature_vector(ds, comp, s, true);
    const double r = predict_gbt(ev.model, x);
    EXPECT_GE(r, 0.99);
    EXPECT_LE(r, 1.01);
  }
}

TEST(EventModel, MissingEventThrows) {
  auto ds = hand_dataset({{2, {4.0}}, {4, {8.0}}});
  auto table = ds.component_table();
  table[0].event_stats.push_back("absent");
  const auto broken = ds.with_component_table(table);
  EffectiveHardwareModel hw{"Alu", LinearModel{0, 2.0, 0.0, false}, "DecodeWidth"};
  EXPECT_THROW(train_event_model(broken, broken.component("Alu"), hw, {}), Error);
}

TEST(Prediction, ProductOfHardwareAndEvent) {
  FirePowerModel m;
  m.component_table = fptest::tiny_table();
  for (const auto& c : m.component_table) {
    ComponentPowerModel cpm;
    cpm.hw = {c.name, LinearModel{0, 0.0, 10.0, true}, ""};
    GbtModel ev;
    ev.base_prediction = 1.2;
    ev.feature_count = c.hw_params.size() + c.event_stats.size();
    ev.cumulative_gain.assign(ev.feature_count, 0.0);
    cpm.ev = {c.name, ev};
    m.per_component[c.name] = cpm;
  }
  const auto cfg = fptest::make_config("c", {});
  const std::map<std::string, double> e = {{"alu.rate", 0.3}};
  EXPECT_DOUBLE_EQ(predict_component_power(m, "Alu", cfg, e), 12.0);
  EXPECT_DOUBLE_EQ(predict_total_power(m, cfg, e), 24.0);
  EXPECT_THROW(predict_component_power(m, "Nope", cfg, e), Error);
  EXPECT_THROW(predict_component_power(m, "Alu", cfg, {}), Error);
}

TEST(Build, CoversTableAndFollowsStrategies) {
  const auto pair = generate_pair(default_synth_spec(2));
  const auto kb = extract_knowledge(pair.known);
  const auto labeled = choose_labeled_configs(pair.target, 2, 1);
  const auto [train, test] = few_shot_split(pair.target, labeled);
  const auto m = build_target_model(kb, train);
  EXPECT_EQ(m.per_component.size(), 22u);
  // ROB inherits the known model untouched.
  const auto& rob = m.at("ROB").hw;
  ASSERT_FALSE(rob.retrained());
  EXPECT_EQ(std::get<GbtModel>(rob.model), kb.at("ROB").hardware_model);
  for (const auto& [name, cpm] : m.per_component) {
    const auto& comp = find_component(m.component_table, name);
    EXPECT_EQ(cpm.ev.model.feature_count, comp.hw_params.size() + comp.event_stats.size());
    if (cpm.hw.retrained()) {
      EXPECT_EQ(cpm.hw.retrained_param, kb.at(name).strategy.important_param);
      const auto& lin = std::get<LinearModel>(cpm.hw.model);
      const auto it = std::find(comp.hw_params.begin(), comp.hw_params.end(), cpm.hw.retrained_param);
      EXPECT_EQ(lin.feature_index, it - comp.hw_params.begin());
    } else if (kb.at(name).strategy.is_retrain()) {
      // Only the unidentifiable fallback may skip a Retrain.
      std::set<std::int64_t> values;
      for (const auto& c : train.configurations()) {
        values.insert(c.params.at(kb.at(name).strategy.important_param));
      }
      EXPECT_EQ(values.size(), 1u) << name;
    }
  }
  EXPECT_EQ(m, build_target_model(kb, train));
}

TEST(Build, RnuRetrainsOnDecodeWidth) {
  const auto pair = generate_pair(default_synth_spec(3));
  const auto kb = extract_knowledge(pair.known);
  ASSERT_EQ(kb.at("RNU").strategy, Strategy::retrain("DecodeWidth"));
  // Pick two target configs with distinct DecodeWidth.
  std::vector<std::string> labeled;
  std::set<std::int64_t> seen;
  for (const auto& c : pair.target.configurations()) {
    if (seen.insert(c.params.at("DecodeWidth")).second) labeled.push_back(c.id);
    if (labeled.size() == 2) break;
  }
  const auto [train, test] = few_shot_split(pair.target, labeled);
  const auto m = build_target_model(kb, train);
  ASSERT_TRUE(m.at("RNU").hw.retrained());
  EXPECT_EQ(m.at("RNU").hw.retrained_param, "DecodeWidth");
  BuildOptions strict;
  strict.inherit_when_unidentifiable = false;
  EXPECT_TRUE(build_target_model(kb, train, strict).at("RNU").hw.retrained());
  BuildOptions none;
  none.force_no_retrain = true;
  EXPECT_EQ(build_target_model(kb, train, none).retrained_count(), 0u);
}

TEST(Build, TableMismatchThrows) {
  const auto pair = generate_pair(default_synth_spec(1));
  const auto kb = extract_knowledge(pair.known);
  EXPECT_THROW(build_target_model(kb, fptest::tiny_dataset()), Error);
}

TEST(Build, AdditivityAndNonNegativity) {
  const auto pair = generate_pair(default_synth_spec(4));
  const auto kb = extract_knowledge(pair.known);
  const auto [train, test] = few_shot_split(pair.target, choose_labeled_configs(pair.target, 3, 2));
  const auto m = build_target_model(kb, train);
  for (const auto& s : test.samples()) {
    const auto& c = test.config(s.config_id);
    double sum = 0.0;
    for (const auto& comp : m.component_table) {
      const double p = predict_component_power(m, comp.name, c, s.event_stats);
      EXPECT_GE(p, 0.0);
      sum += p;
    }
    EXPECT_EQ(predict_total_power(m, c, s.event_stats), sum);
  }
}

// The event model absorbs a constant ratio between architectures.
TEST(Build, EventModelAbsorbsArchitectureScale) {
  auto mape_for = [](double c) {
    auto spec = default_synth_spec(5);
    spec.event_shift = 0.0;
    for (auto& comp : spec.components) comp.arch_scale_target = comp.arch_scale_known = 1.0;
    auto base = generate_pair(spec);
    for (auto& comp : spec.components) {
      const auto& truth = *std::find_if(base.truth.components.begin(), base.truth.components.end(),
                                        [&](const ComponentTruth& t) { return t.name == comp.name; });
      comp.hw_target = truth.hw_known;
      comp.event_target = truth.event_known;
      comp.arch_scale_target = c;
    }
    const auto pair = generate_pair(spec);
    const auto kb = extract_knowledge(pair.known);
    const auto [train, test] =
        few_shot_split(pair.target, choose_labeled_configs(pair.target, 4, 1));
    BuildOptions bo;
    bo.force_no_retrain = true;
    const auto m = build_target_model(kb, train, bo);
    return component_mape(m, test, "ROB");
  };
  const double unit = mape_for(1.0);
  EXPECT_NEAR(mape_for(2.5), unit, 2.0);
  EXPECT_NEAR(mape_for(0.4), unit, 2.0);
}

TEST(Build, ModelRoundTrip) {
  const auto pair = generate_pair(default_synth_spec(6));
  const auto kb = extract_knowledge(pair.known);
  const auto [train, test] = few_shot_split(pair.target, choose_labeled_configs(pair.target, 2, 3));
  const auto m = build_target_model(kb, train);
  EXPECT_EQ(model_from_string(model_to_string(m)), m);
  const auto dir = fptest::fresh_dir("model");
  write_model(m, dir / "m.json");
  EXPECT_EQ(load_model(dir / "m.json"), m);
  std::filesystem::remove_all(dir);
}
