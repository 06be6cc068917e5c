// Copyright 2026 The wsnrf Authors
// SPDX-License-Identifier: Apache-2.0

#include "wsnrf/serialization.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <functional>
#include <sstream>

#include "wsnrf/csv.hpp"

namespace wsnrf {
namespace {

TEST(FrameCsv, RoundTripPreservesObservedValues) {
  SimulationConfig c;
  c.runs = 3;
  c.seed = 10;
  c.sensor_breakdown_prob = 0.02;
  c.experiment_set = ExperimentSet::Correlated;
  const auto runs = simulate_runs(c);
  std::stringstream s;
  write_frames_csv(s, runs);
  const auto back = read_frames_csv(s);
  ASSERT_EQ(back.size(), runs.size());
  for (std::size_t r = 0; r < runs.size(); ++r) {
    ASSERT_EQ(back[r].size(), runs[r].size());
    for (std::size_t f = 0; f < runs[r].size(); ++f) {
      auto expected = runs[r][f];
      for (auto& rd : expected.readings) rd.true_value = rd.value;  // not stored
      EXPECT_EQ(back[r][f], expected);
    }
  }
}

TEST(FrameCsv, HeaderAndRowCount) {
  SimulationConfig c;
  c.runs = 2;
  c.steps = 5;
  std::stringstream s;
  write_frames_csv(s, simulate_runs(c));
  std::string line;
  std::getline(s, line);
  EXPECT_EQ(line, "run,t,sensor_id,category,value,sensor_broken,device_failed_here,ground_truth_failure_time");
  int rows = 0;
  while (std::getline(s, line)) ++rows;
  EXPECT_EQ(rows, 2 * 5 * 110);
}

std::string first_frame_csv() {
  SimulationConfig c;
  c.steps = 2;
  std::stringstream s;
  write_frames_csv(s, simulate_runs(c));
  return s.str();
}

void expect_data_error_at(const std::string& text, const std::string& needle) {
  std::istringstream in(text);
  try {
    read_frames_csv(in);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(FrameCsv, MalformedInputReportsLine) {
  auto text = first_frame_csv();
  // Corrupt the value on line 5 (header is line 1).
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (n == 5) line = "0,1,3,temperature,abc,0,0,";
    out << line << '\n';
  }
  expect_data_error_at(out.str(), "line 5");
  expect_data_error_at("bogus header\n", "line 1");
  expect_data_error_at(std::string(kFrameCsvHeader) + "\n0,1,0,temperature,20\n", "line 2");
  expect_data_error_at(std::string(kFrameCsvHeader) + "\n0,1,0,pressure,20,0,0,\n", "line 2");
  // truncated frame
  expect_data_error_at(std::string(kFrameCsvHeader) + "\n0,1,0,temperature,20,0,0,\n", "incomplete");
}

Forest small_forest() {
  PipelineConfig cfg;
  cfg.simulation.seed = 31;
  cfg.forest.num_trees = 7;
  const auto training = build_training_set(cfg);
  return fit_forest(training, cfg.forest, 31, cfg.thresholds).forest;
}

TEST(ForestJson, RoundTrip) {
  const auto f = small_forest();
  const auto j = forest_to_json(f);
  EXPECT_EQ(j.at("version"), kForestVersion);
  EXPECT_EQ(j.at("trees").size(), f.trees.size());
  const auto back = forest_from_json(Json::parse(j.dump()));
  EXPECT_EQ(back.trees.size(), f.trees.size());
  EXPECT_EQ(back.thresholds, f.thresholds);
  EXPECT_EQ(back.seed, f.seed);
  for (std::size_t i = 0; i < f.trees.size(); ++i) {
    EXPECT_EQ(back.trees[i].sample, f.trees[i].sample);
    EXPECT_EQ(back.trees[i].error, f.trees[i].error);
    EXPECT_EQ(back.trees[i].depth(), f.trees[i].depth());
    for (int a = 1; a <= 5; ++a)
      for (int b = 1; b <= 5; ++b)
        for (int c = 1; c <= 5; ++c) {
          const FeatureVector fv{Level(a), Level(b), Level(c)};
          EXPECT_EQ(tree_diagnose(back.trees[i], fv), tree_diagnose(f.trees[i], fv));
        }
  }
  EXPECT_EQ(forest_to_json(back).dump(), j.dump());
}

TEST(ForestJson, EveryNodeCarriesCounts) {
  const auto j = forest_to_json(small_forest());
  std::function<void(const Json&)> walk = [&](const Json& n) {
    ASSERT_TRUE(n.contains("counts"));
    EXPECT_EQ(n.at("counts").size(), 5u);
    EXPECT_NE(n.contains("split_category"), n.contains("predicted_level"));
    if (n.contains("children"))
      for (const auto& [k, ch] : n.at("children").items()) walk(ch);
  };
  for (const auto& t : j.at("trees")) walk(t.at("root"));
}

TEST(ForestJson, VersionAndConsistencyChecks) {
  auto j = forest_to_json(small_forest());
  auto bad = j;
  bad.erase("version");
  EXPECT_THROW(forest_from_json(bad), ArtifactError);
  bad = j;
  bad["version"] = 99;
  EXPECT_THROW(forest_from_json(bad), ArtifactError);
  bad = j;
  auto& root = bad["trees"][0]["root"];
  if (root.contains("split_category")) {
    root["counts"][0] = root["counts"][0].get<int>() + 1;
    EXPECT_THROW(forest_from_json(bad), ArtifactError);
  }
  EXPECT_THROW(forest_from_json(Json::parse("{\"format\":\"wsnrf-forest\",\"version\":1}")), ArtifactError);
}

TEST(ConfigJson, RoundTripAndOverlay) {
  PipelineConfig c;
  c.simulation.seed = 77;
  c.simulation.experiment_set = ExperimentSet::Correlated;
  c.forest.impurity = Impurity::Gini;
  c.alarm_level = 3;
  c.thresholds[SensorCategory::Pressure] = {21.45, 22.25, 23, 24};
  EXPECT_EQ(config_from_json(config_to_json(c)), c);

  const auto partial = Json::parse(R"({"pipeline": {"alarm_level": 5}})");
  const auto d = config_from_json(partial, c);
  EXPECT_EQ(d.alarm_level, 5);
  EXPECT_EQ(d.forest.impurity, Impurity::Gini);
}

TEST(ConfigJson, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(config_from_json(Json::parse(R"({"simulatoin": {}})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"forest": {"trees": 3}})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"forest": {"impurity": "chi2"}})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"simulation": {"steps": "many"}})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"simulation": {"experiment_set": 3}})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"thresholds": {"pressure": [3, 2, 4, 5]}})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"pipeline": {"alarm_level": 1}})")), ConfigError);
}

TEST(ConfigJson, ShippedConfigsLoad) {
  for (const char* name : {"default.json", "set2_recalibrated.json"}) {
    std::ifstream in(std::string(WSNRF_SOURCE_DIR) + "/configs/" + name);
    ASSERT_TRUE(in) << name;
    EXPECT_NO_THROW(config_from_json(Json::parse(in))) << name;
  }
  std::ifstream in(std::string(WSNRF_SOURCE_DIR) + "/configs/default.json");
  EXPECT_EQ(config_from_json(Json::parse(in)), PipelineConfig{});
}

}  // namespace
}  // namespace wsnrf
