#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "firepower/application.hpp"
#include "firepower/cli.hpp"
#include "firepower/harness.hpp"
#include "firepower/metrics.hpp"
#include "firepower/synthgen.hpp"
#include "test_support.hpp"

using namespace firepower;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream f(p);
  std::string line;
  while (std::getline(f, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

int retrain_count(const std::string& out) {
  std::smatch m;
  std::regex re("(\\d+) of 22 components use Retraining");
  if (!std::regex_search(out, m, re)) return -1;
  return std::stoi(m[1]);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fptest::fresh_dir("cli");
    ASSERT_EQ(cli({"synth", "--seed", "3", "--out-dir", (dir / "syn").string()}).code, 0);
  }
  void TearDown() override { fs::remove_all(dir); }

  // Writes a k-config labeled target subset.
  fs::path target_train(int k, std::uint64_t seed) {
    const auto target = load_dataset(dir / "syn" / "target.json");
    const auto [train, test] = few_shot_split(target, choose_labeled_configs(target, k, seed));
    const auto p = dir / ("train_" + std::to_string(k) + ".json");
    write_dataset(train, p);
    write_dataset(test, dir / ("test_" + std::to_string(k) + ".json"));
    return p;
  }

  fs::path dir;
};

}  // namespace

TEST_F(CliTest, SynthDefaultsAndDeterminism) {
  const auto known = load_dataset(dir / "syn" / "known.json");
  const auto target = load_dataset(dir / "syn" / "target.json");
  EXPECT_EQ(known.configurations().size(), 15u);
  EXPECT_EQ(target.configurations().size(), 10u);
  EXPECT_TRUE(fs::exists(dir / "syn" / "truth.json"));
  ASSERT_EQ(cli({"synth", "--spec", (dir / "syn" / "spec.json").string(), "--out-dir",
                 (dir / "again").string()})
                .code,
            0);
  for (const auto* f : {"known.json", "target.json", "truth.json", "spec.json"}) {
    EXPECT_EQ(slurp(dir / "syn" / f), slurp(dir / "again" / f)) << f;
  }
}

TEST_F(CliTest, SynthRejectsBadSpec) {
  {
    std::ofstream f(dir / "bad.json");
    f << R"({"seed": 1, "n_known_configs": 0})";
  }
  EXPECT_EQ(cli({"synth", "--spec", (dir / "bad.json").string(), "--out-dir", (dir / "x").string()}).code,
            kExitData);
}

TEST_F(CliTest, ExtractWritesKbAndThresholdIsMonotone) {
  const auto kb = dir / "kb.json";
  const auto r = cli({"extract", "--known", (dir / "syn" / "known.json").string(), "--out", kb.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(kb));
  EXPECT_EQ(retrain_count(r.out), 10);
  EXPECT_NE(r.out.find("Retrain(DecodeWidth)"), std::string::npos);
  const auto loose = cli({"extract", "--known", (dir / "syn" / "known.json").string(), "--out",
                          (dir / "kb2.json").string(), "--threshold", "0.5"});
  ASSERT_EQ(loose.code, 0);
  EXPECT_GT(retrain_count(loose.out), 10);
}

TEST_F(CliTest, BuildWritesModelAndReport) {
  const auto kb = dir / "kb.json";
  ASSERT_EQ(cli({"extract", "--known", (dir / "syn" / "known.json").string(), "--out", kb.string()}).code, 0);
  const auto train = target_train(2, 1);
  const auto model = dir / "model.json";
  const auto r = cli({"build", "--kb", kb.string(), "--target-train", train.string(), "--out", model.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_model(model).per_component.size(), 22u);
  const auto csv = read_csv(dir / "model.generalization.csv");
  EXPECT_EQ(csv.size(), 23u);
  EXPECT_EQ(csv[0], (std::vector<std::string>{"component", "scaling_factor", "mape_percent", "verdict"}));
}

TEST_F(CliTest, BuildSelfGeneralizationPassesGate) {
  const auto kb = dir / "kb.json";
  ASSERT_EQ(cli({"extract", "--known", (dir / "syn" / "known.json").string(), "--out", kb.string()}).code, 0);
  const auto r = cli({"build", "--kb", kb.string(), "--target-train", (dir / "syn" / "known.json").string(),
                      "--out", (dir / "self.json").string(), "--fail-on-low-generalization"});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(CliTest, BuildGateFailsOnDissimilar) {
  auto spec = default_synth_spec(3);
  for (auto& c : spec.components) c.dissimilar = c.name == "ROB";
  {
    std::ofstream f(dir / "dis.json");
    f << spec_to_string(spec);
  }
  ASSERT_EQ(cli({"synth", "--spec", (dir / "dis.json").string(), "--out-dir", (dir / "dis").string()}).code, 0);
  const auto kb = dir / "kb.json";
  ASSERT_EQ(cli({"extract", "--known", (dir / "dis" / "known.json").string(), "--out", kb.string()}).code, 0);
  const auto target = load_dataset(dir / "dis" / "target.json");
  const auto [train, test] = few_shot_split(target, choose_labeled_configs(target, 4, 3));
  write_dataset(train, dir / "dis_train.json");
  const auto r = cli({"build", "--kb", kb.string(), "--target-train", (dir / "dis_train.json").string(),
                      "--out", (dir / "m.json").string(), "--fail-on-low-generalization"});
  EXPECT_EQ(r.code, kExitGate);
  EXPECT_NE(r.err.find("ROB"), std::string::npos);
  // Without the flag the report is advisory.
  EXPECT_EQ(cli({"build", "--kb", kb.string(), "--target-train", (dir / "dis_train.json").string(),
                 "--out", (dir / "m.json").string()})
                .code,
            0);
}

TEST_F(CliTest, PredictWritesRowsAndSummary) {
  const auto kb = dir / "kb.json";
  ASSERT_EQ(cli({"extract", "--known", (dir / "syn" / "known.json").string(), "--out", kb.string()}).code, 0);
  const auto train = target_train(3, 2);
  ASSERT_EQ(cli({"build", "--kb", kb.string(), "--target-train", train.string(), "--out",
                 (dir / "m.json").string()})
                .code,
            0);
  const auto out = dir / "pred.csv";
  const auto r = cli({"predict", "--model", (dir / "m.json").string(), "--input",
                      (dir / "test_3.json").string(), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(out);
  ASSERT_EQ(rows[0], (std::vector<std::string>{"config_id", "workload", "component", "predicted_mw", "label_mw"}));
  EXPECT_EQ(rows.size(), 1u + 7u * 8u * 23u);
  std::vector<double> preds;
  std::vector<double> labels;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][2] == "total") {
      preds.push_back(std::stod(rows[i][3]));
      labels.push_back(std::stod(rows[i][4]));
    }
  }
  const auto summary = read_csv(dir / "pred.summary.csv");
  ASSERT_EQ(summary.size(), 3u);
  EXPECT_EQ(summary[1][0], "mape_percent");
  EXPECT_NEAR(std::stod(summary[1][1]), mape(preds, labels), 1e-9);
  EXPECT_NEAR(std::stod(summary[2][1]), pearson_r(preds, labels), 1e-9);
  EXPECT_NE(r.out.find("MAPE"), std::string::npos);
}

TEST_F(CliTest, PredictUnlabeledHasNoSummary) {
  const auto kb = dir / "kb.json";
  ASSERT_EQ(cli({"extract", "--known", (dir / "syn" / "known.json").string(), "--out", kb.string()}).code, 0);
  const auto train = target_train(2, 4);
  ASSERT_EQ(cli({"build", "--kb", kb.string(), "--target-train", train.string(), "--out",
                 (dir / "m.json").string()})
                .code,
            0);
  const auto target = load_dataset(dir / "syn" / "target.json");
  auto samples = target.samples();
  for (auto& s : samples) {
    s.total_power = 0.0;
    s.component_power.clear();
  }
  LoadOptions lo;
  lo.require_labels = false;
  write_dataset(Dataset(target.architecture(), target.registry(), target.component_table(),
                        target.configurations(), samples, lo),
                dir / "unl.json");
  const auto r = cli({"predict", "--model", (dir / "m.json").string(), "--input",
                      (dir / "unl.json").string(), "--out", (dir / "p.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(fs::exists(dir / "p.summary.csv"));
  EXPECT_EQ(r.out.find("MAPE"), std::string::npos);
}

TEST_F(CliTest, ExperimentRowsAndDeterminism) {
  const std::vector<std::string> args = {"experiment", "--known", (dir / "syn" / "known.json").string(),
                                         "--target", (dir / "syn" / "target.json").string(),
                                         "--ks", "2,3,4", "--seeds", "2",
                                         "--methods", "firepower,mcpat_calib"};
  auto a = args;
  a.insert(a.end(), {"--out", (dir / "x1").string()});
  auto b = args;
  b.insert(b.end(), {"--out", (dir / "x2").string()});
  const auto r = cli(a);
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(cli(b).code, 0);
  const auto rows = read_csv(dir / "x1" / "results.csv");
  EXPECT_EQ(rows[0], (std::vector<std::string>{"method", "k", "seed", "mape_percent", "pearson_r"}));
  EXPECT_EQ(rows.size(), 1u + 2u * 3u * 2u);
  EXPECT_EQ(slurp(dir / "x1" / "results.csv"), slurp(dir / "x2" / "results.csv"));
  EXPECT_EQ(slurp(dir / "x1" / "per_sample.csv"), slurp(dir / "x2" / "per_sample.csv"));
  EXPECT_TRUE(fs::exists(dir / "x1" / "summary.txt"));
}

TEST_F(CliTest, UsageAndDataErrors) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"extract", "--known", "x.json"}).code, kExitUsage);
  EXPECT_EQ(cli({"extract", "--known", (dir / "nope.json").string(), "--out", (dir / "k.json").string()}).code,
            kExitData);
  EXPECT_EQ(cli({"extract", "--known", (dir / "syn" / "known.json").string(), "--out",
                 (dir / "k.json").string(), "--max-depth", "0"})
                .code,
            kExitUsage);
  EXPECT_EQ(cli({"experiment", "--known", (dir / "syn" / "known.json").string(), "--target",
                 (dir / "syn" / "target.json").string(), "--methods", "bogus", "--out",
                 (dir / "e").string()})
                .code,
            kExitUsage);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST_F(CliTest, ConfigFileWithFlagPrecedence) {
  {
    std::ofstream f(dir / "run.toml");
    f << "[extract]\nthreshold = 0.5\n";
  }
  const auto known = (dir / "syn" / "known.json").string();
  const auto from_file = cli({"--config", (dir / "run.toml").string(), "extract", "--known", known,
                              "--out", (dir / "a.json").string()});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_GT(retrain_count(from_file.out), 10);
  const auto flag_wins = cli({"--config", (dir / "run.toml").string(), "extract", "--known", known,
                              "--out", (dir / "b.json").string(), "--threshold", "0.95"});
  ASSERT_EQ(flag_wins.code, 0);
  EXPECT_EQ(retrain_count(flag_wins.out), 10);
  {
    std::ofstream f(dir / "bad.toml");
    f << "[extract]\ncolour = 3\n";
  }
  EXPECT_EQ(cli({"--config", (dir / "bad.toml").string(), "extract", "--known", known, "--out",
                 (dir / "c.json").string()})
                .code,
            kExitUsage);
}
