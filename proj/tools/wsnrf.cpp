// Copyright 2026 The wsnrf Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: simulate, train, diagnose, experiment.
//
// Exit codes: 0 success, 1 internal error, 2 configuration, 3 input data,
// 4 artifact mismatch, 5 I/O.

#include <openssl/evp.h>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "wsnrf/csv.hpp"
#include "wsnrf/experiments.hpp"
#include "wsnrf/serialization.hpp"

namespace fs = std::filesystem;
using namespace wsnrf;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Data: return 3;
    case ErrorKind::Artifact: return 4;
    case ErrorKind::Io: return 5;
    case ErrorKind::Contract: return 1;
  }
  return 1;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("sha256 failed");
  std::ostringstream s;
  for (unsigned int i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return s.str();
}

std::string read_file(const fs::path& p, ErrorKind missing_kind) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(missing_kind, "cannot open " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out << bytes;
  if (!out.flush()) throw IoError("write failed: " + p.string());
}

Json parse_json(const std::string& text, ErrorKind kind, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const std::exception& e) {
    throw Error(kind, what + ": " + e.what());
  }
}

/// Shared --config / --seed handling. The seed must come from the flag or
/// from the config file; there is no default.
struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;

  PipelineConfig resolve(PipelineConfig base, bool seed_required) const {
    bool file_seed = false;
    if (!config_path.empty()) {
      file_seed = apply_config_json(parse_json(read_file(config_path, ErrorKind::Config), ErrorKind::Config,
                                               "config " + config_path),
                                    base);
    }
    if (seed) base.simulation.seed = *seed;
    else if (seed_required && !file_seed) throw ConfigError("--seed is required (or a 'seed' key in --config)");
    return base;
  }
};

void echo_config(const PipelineConfig& c) { std::cerr << "resolved config: " << config_to_json(c).dump() << '\n'; }

// ---------------------------------------------------------------------------

struct SimulateArgs {
  CommonOptions common;
  std::optional<int> set, steps, runs;
  std::optional<double> breakdown, denominator;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  auto cfg = a.common.resolve(PipelineConfig{}, true);
  if (a.set) {
    if (*a.set != 1 && *a.set != 2) throw ConfigError("--set must be 1 or 2");
    cfg.simulation.experiment_set = static_cast<ExperimentSet>(*a.set);
  }
  if (a.steps) cfg.simulation.steps = *a.steps;
  if (a.runs) cfg.simulation.runs = *a.runs;
  if (a.breakdown) cfg.simulation.sensor_breakdown_prob = *a.breakdown;
  if (a.denominator) cfg.simulation.failure_rate_denominator = *a.denominator;
  cfg.validate();
  echo_config(cfg);

  const auto runs = simulate_runs(cfg.simulation, StreamDomain::TrainingRun);
  std::ostringstream s;
  write_frames_csv(s, runs);
  write_file(a.out, s.str());
  return 0;
}

struct TrainArgs {
  CommonOptions common;
  std::string in, out;
  std::optional<int> trees;
  std::optional<std::string> impurity;
  std::optional<double> fraction;
  bool filter_weak = false;
  bool with_replacement = false;
};

int cmd_train(const TrainArgs& a) {
  auto base = PipelineConfig{};
  base.forest.filter_weak = false;
  auto cfg = a.common.resolve(base, true);
  if (a.trees) cfg.forest.num_trees = *a.trees;
  if (a.impurity) {
    const auto imp = parse_impurity(*a.impurity);
    if (!imp) throw ConfigError("--impurity must be entropy or gini");
    cfg.forest.impurity = *imp;
  }
  if (a.fraction) cfg.forest.sample_fraction = *a.fraction;
  if (a.filter_weak) cfg.forest.filter_weak = true;
  if (a.with_replacement) cfg.forest.with_replacement = true;
  cfg.validate();
  echo_config(cfg);

  std::istringstream in(read_file(a.in, ErrorKind::Io));
  const auto runs = read_frames_csv(in);
  const auto training = label_runs(runs, cfg.thresholds);
  if (training.empty()) throw DataError("no frames in " + a.in);
  const auto fit = fit_forest(training, cfg.forest, cfg.simulation.seed, cfg.thresholds);
  if (fit.all_weak) std::cerr << "warning: every tree had error >= 0.5; kept the single best tree\n";
  std::cerr << "trained " << cfg.forest.num_trees << " trees on " << training.size() << " instances, kept "
            << fit.forest.trees.size() << '\n';
  write_file(a.out, forest_to_json(fit.forest).dump(1) + "\n");
  return 0;
}

struct DiagnoseArgs {
  std::string forest, frames, config_path;
};

int cmd_diagnose(const DiagnoseArgs& a) {
  const auto forest = forest_from_json(parse_json(read_file(a.forest, ErrorKind::Artifact), ErrorKind::Artifact,
                                                  "forest " + a.forest));
  if (!a.config_path.empty()) {
    CommonOptions c{a.config_path, std::nullopt};
    auto cfg = c.resolve(PipelineConfig{}, false);
    echo_config(cfg);
    if (cfg.thresholds != forest.thresholds)
      throw ArtifactError("threshold table in " + a.config_path + " differs from the one the forest was trained with");
  }
  std::istringstream in(read_file(a.frames, ErrorKind::Io));
  const auto runs = read_frames_csv(in);
  std::cout << "t,predicted_level,votes_1,votes_2,votes_3,votes_4,votes_5\n";
  for (const auto& run : runs) {
    for (const auto& f : run) {
      const auto v = forest_diagnose(forest, frame_features(f, forest.thresholds));
      std::cout << f.time << ',' << v.predicted.value();
      for (int n : v.votes) std::cout << ',' << n;
      std::cout << '\n';
    }
  }
  return 0;
}

struct ExperimentArgs {
  CommonOptions common;
  std::string figure, out_dir;
};

int cmd_experiment(const ExperimentArgs& a) {
  const auto id = parse_experiment(a.figure);
  if (!id) throw ConfigError("--figure must be delay, error or trees");
  auto cfg = a.common.resolve(default_experiment_config(*id, 0), true);
  cfg.validate();
  echo_config(cfg);

  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec || !fs::is_directory(a.out_dir)) throw IoError("cannot create output directory " + a.out_dir);

  const auto rep = run_experiment(*id, cfg);
  const std::string name(to_string(*id));
  std::ostringstream csv;
  write_report_csv(csv, rep);
  const std::string svg = render_report(rep);

  const std::vector<std::pair<std::string, std::string>> files = {{name + ".csv", csv.str()}, {name + ".svg", svg}};
  Json manifest;
  manifest["experiment"] = name;
  manifest["seed"] = cfg.simulation.seed;
  manifest["config"] = config_to_json(cfg);
  Json listed = Json::array();
  for (const auto& [file, bytes] : files) {
    write_file(fs::path(a.out_dir) / file, bytes);
    listed.push_back({{"path", file}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}});
  }
  manifest["files"] = std::move(listed);
  manifest["metadata"] = rep.metadata;
  write_file(fs::path(a.out_dir) / "manifest.json", manifest.dump(2) + "\n");

  for (const auto& [key, value] : rep.metadata.items()) {
    if (key == "delays") continue;
    std::cout << key << ": " << value.dump() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wireless sensor network random forest diagnostics"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Simulate sensor runs and write frames CSV");
  s->add_option("--config", sim.common.config_path, "JSON config file");
  s->add_option("--seed", sim.common.seed, "64-bit seed");
  s->add_option("--set", sim.set, "Experiment set (1 or 2)");
  s->add_option("--steps", sim.steps, "Time steps per run");
  s->add_option("--runs", sim.runs, "Number of runs");
  s->add_option("--breakdown-prob", sim.breakdown, "Per-step sensor breakdown probability");
  s->add_option("--failure-denominator", sim.denominator, "Failure probability is t / denominator");
  s->add_option("--out", sim.out, "Output CSV path")->required();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train a forest from a frames CSV");
  t->add_option("--config", tr.common.config_path, "JSON config file");
  t->add_option("--seed", tr.common.seed, "64-bit seed");
  t->add_option("--in", tr.in, "Frames CSV")->required();
  t->add_option("--trees", tr.trees, "Number of trees");
  t->add_option("--impurity", tr.impurity, "entropy or gini");
  t->add_option("--fraction", tr.fraction, "Per-tree sample fraction");
  t->add_flag("--filter-weak", tr.filter_weak, "Drop trees with out-of-sample error >= 0.5");
  t->add_flag("--with-replacement", tr.with_replacement, "Sample dates with replacement");
  t->add_option("--out", tr.out, "Output forest JSON")->required();

  DiagnoseArgs dg;
  auto* d = app.add_subcommand("diagnose", "Diagnose every frame of a frames CSV");
  d->add_option("--forest", dg.forest, "Forest JSON")->required();
  d->add_option("--frames", dg.frames, "Frames CSV")->required();
  d->add_option("--config", dg.config_path, "Config whose thresholds must match the forest");

  ExperimentArgs ex;
  auto* e = app.add_subcommand("experiment", "Run a batch experiment");
  e->add_option("--config", ex.common.config_path, "JSON config file");
  e->add_option("--seed", ex.common.seed, "64-bit seed");
  e->add_option("--figure", ex.figure, "delay, error or trees")->required();
  e->add_option("--out-dir", ex.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (s->parsed()) return cmd_simulate(sim);
    if (t->parsed()) return cmd_train(tr);
    if (d->parsed()) return cmd_diagnose(dg);
    if (e->parsed()) return cmd_experiment(ex);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return exit_code(err.kind());
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 1;
}
