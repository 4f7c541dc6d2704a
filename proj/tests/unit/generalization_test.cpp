#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "firepower/generalization.hpp"
#include "firepower/harness.hpp"
#include "firepower/synthgen.hpp"
#include "test_support.hpp"

using namespace firepower;

namespace {

double sq_err(double s, const std::vector<double>& p, const std::vector<double>& l) {
  double e = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) e += (s * p[i] - l[i]) * (s * p[i] - l[i]);
  return e;
}

double golden_section(const std::vector<double>& p, const std::vector<double>& l, double lo,
                      double hi) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  for (int it = 0; it < 200; ++it) {
    const double c = b - g * (b - a);
    const double d = a + g * (b - a);
    if (sq_err(c, p, l) < sq_err(d, p, l)) {
      b = d;
    } else {
      a = c;
    }
  }
  return 0.5 * (a + b);
}

// Every component power (and total) multiplied by c.
Dataset scaled(const Dataset& ds, double c) {
  auto samples = ds.samples();
  for (auto& s : samples) {
    for (auto& [name, v] : s.component_power) v *= c;
    s.total_power *= c;
  }
  return Dataset(ds.architecture(), ds.registry(), ds.component_table(), ds.configurations(),
                 samples);
}

}  // namespace

TEST(ScalingFactor, HandCases) {
  EXPECT_DOUBLE_EQ(ideal_scaling_factor(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}),
                   1.0);
  EXPECT_DOUBLE_EQ(ideal_scaling_factor(std::vector<double>{1, 2}, std::vector<double>{2, 4}), 2.0);
  EXPECT_THROW(ideal_scaling_factor(std::vector<double>{0, 0}, std::vector<double>{1, 2}), Error);
  EXPECT_THROW(ideal_scaling_factor(std::vector<double>{}, std::vector<double>{}), Error);
}

TEST(ScalingFactor, MatchesGoldenSectionScan) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> p(7);
    std::vector<double> l(7);
    for (auto& v : p) v = u(rng);
    for (auto& v : l) v = u(rng);
    const double s = ideal_scaling_factor(p, l);
    EXPECT_NEAR(s, golden_section(p, l, 0.0, 20.0), 1e-6);
    const double e = sq_err(s, p, l);
    EXPECT_LE(e, sq_err(s * 1.01, p, l));
    EXPECT_LE(e, sq_err(s * 0.99, p, l));
  }
}

TEST(Generalization, SelfComparisonIsHigh) {
  const auto pair = generate_pair(default_synth_spec(1));
  const auto kb = extract_knowledge(pair.known);
  const auto rep = evaluate_generalization(kb, pair.known);
  EXPECT_EQ(rep.order.size(), 22u);
  for (const auto& [name, g] : rep.per_component) {
    EXPECT_LT(g.observed_mape, 2.0) << name;
    EXPECT_EQ(g.verdict, Verdict::kHigh) << name;
  }
  EXPECT_TRUE(rep.low_components().empty());
}

TEST(Generalization, ProportionalTargetMatchesSelf) {
  const auto pair = generate_pair(default_synth_spec(2));
  const auto kb = extract_knowledge(pair.known);
  const auto a = evaluate_generalization(kb, pair.known);
  const auto b = evaluate_generalization(kb, scaled(pair.known, 3.0));
  for (const auto& [name, g] : a.per_component) {
    EXPECT_NEAR(b.per_component.at(name).observed_mape, g.observed_mape, 1e-9);
    EXPECT_NEAR(b.per_component.at(name).scaling_factor, 3.0 * g.scaling_factor,
                1e-9 * g.scaling_factor);
  }
}

TEST(Generalization, ScalingInvarianceOnTarget) {
  const auto pair = generate_pair(default_synth_spec(3));
  const auto kb = extract_knowledge(pair.known);
  const auto [train, test] = few_shot_split(pair.target, choose_labeled_configs(pair.target, 4, 3));
  const auto base = evaluate_generalization(kb, train);
  for (double c : {0.01, 0.5, 7.0, 1234.5}) {
    const auto r = evaluate_generalization(kb, scaled(train, c));
    for (const auto& [name, g] : base.per_component) {
      EXPECT_NEAR(r.per_component.at(name).observed_mape, g.observed_mape, 1e-9) << name;
    }
  }
}

TEST(Generalization, DissimilarComponentIsLow) {
  auto spec = default_synth_spec(4);
  for (auto& c : spec.components) c.dissimilar = c.name == "ROB";
  const auto pair = generate_pair(spec);
  const auto kb = extract_knowledge(pair.known);
  const auto [train, test] = few_shot_split(pair.target, choose_labeled_configs(pair.target, 4, 4));
  const auto rep = evaluate_generalization(kb, train);
  EXPECT_EQ(rep.per_component.at("ROB").verdict, Verdict::kLow);
  EXPECT_EQ(rep.low_components(), std::vector<std::string>{"ROB"});
}

TEST(Generalization, VerdictFollowsThreshold) {
  const auto pair = generate_pair(default_synth_spec(5));
  const auto kb = extract_knowledge(pair.known);
  const auto [train, test] = few_shot_split(pair.target, choose_labeled_configs(pair.target, 3, 5));
  for (double t : {0.5, 2.0, 10.0, 50.0}) {
    const auto rep = evaluate_generalization(kb, train, t);
    for (const auto& [name, g] : rep.per_component) {
      EXPECT_EQ(g.verdict == Verdict::kHigh, g.observed_mape < t);
      EXPECT_EQ(g.config_ids.size(), 3u);
      EXPECT_EQ(g.adjusted_prediction.size(), 3u);
    }
  }
}

TEST(Generalization, SampleOrderInvariance) {
  const auto pair = generate_pair(default_synth_spec(6));
  const auto kb = extract_knowledge(pair.known);
  const auto [train, test] = few_shot_split(pair.target, choose_labeled_configs(pair.target, 3, 6));
  auto samples = train.samples();
  std::reverse(samples.begin(), samples.end());
  const Dataset rev(train.architecture(), train.registry(), train.component_table(),
                    train.configurations(), samples);
  const auto a = evaluate_generalization(kb, train);
  const auto b = evaluate_generalization(kb, rev);
  for (const auto& [name, g] : a.per_component) {
    EXPECT_NEAR(b.per_component.at(name).observed_mape, g.observed_mape, 1e-12);
  }
}

TEST(Generalization, CsvHeader) {
  const auto pair = generate_pair(default_synth_spec(7));
  const auto kb = extract_knowledge(pair.known);
  const auto [train, test] = few_shot_split(pair.target, choose_labeled_configs(pair.target, 2, 7));
  const auto rep = evaluate_generalization(kb, train);
  const auto csv = report_to_csv(rep);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "component,scaling_factor,mape_percent,verdict");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 23);
  const auto pts = report_points_csv(rep);
  EXPECT_EQ(pts.substr(0, pts.find('\n')), "component,config_id,golden_avg_mw,adjusted_prediction_mw");
}
