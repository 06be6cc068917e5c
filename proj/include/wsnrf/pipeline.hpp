// Copyright 2026 The wsnrf Authors
// SPDX-License-Identifier: Apache-2.0

/// @file pipeline.hpp
/// @brief simulate -> label -> train -> filter -> diagnose, plus the
/// detection-delay and error metrics scored against simulator ground truth.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wsnrf/forest.hpp"
#include "wsnrf/levels.hpp"
#include "wsnrf/sensor_sim.hpp"

namespace wsnrf {

struct PipelineConfig {
  SimulationConfig simulation;
  ThresholdTable thresholds;
  ForestParams forest;
  /// A frame raises an alarm when the forest predicts at least this level.
  int alarm_level = 4;
  int training_runs = 10;
  int evaluation_runs = 100;

  void validate() const {
    simulation.validate();
    thresholds.validate();
    forest.validate();
    if (alarm_level < 2 || alarm_level > 5) throw ConfigError("alarm_level must lie in [2, 5]");
    if (training_runs < 1) throw ConfigError("training_runs must be >= 1");
    if (evaluation_runs < 1) throw ConfigError("evaluation_runs must be >= 1");
  }

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

inline std::vector<LabeledInstance> label_runs(std::span<const Run> runs, const ThresholdTable& thresholds) {
  std::vector<LabeledInstance> out;
  for (const auto& run : runs) {
    auto part = label_frames(run, thresholds);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

/// `training_runs` independent simulations, labeled and concatenated.
inline std::vector<LabeledInstance> build_training_set(const PipelineConfig& config) {
  config.validate();
  auto sim = config.simulation;
  sim.runs = config.training_runs;
  const auto runs = simulate_runs(sim, StreamDomain::TrainingRun);
  return label_runs(runs, config.thresholds);
}

/// Evaluation runs use a stream domain disjoint from training.
inline std::vector<Run> simulate_evaluation_runs(const PipelineConfig& config) {
  auto sim = config.simulation;
  sim.runs = config.evaluation_runs;
  return simulate_runs(sim, StreamDomain::EvaluationRun);
}

/// Trains on `training` and applies the out-of-sample weak-tree filter when
/// the parameters ask for it.
inline FilterResult fit_forest(std::span<const LabeledInstance> training, const ForestParams& params,
                               std::uint64_t seed, const ThresholdTable& thresholds) {
  auto forest = train_forest(training, params, seed, thresholds);
  if (!params.filter_weak) return FilterResult{std::move(forest), 0, false};
  return filter_weak_trees_out_of_sample(std::move(forest), training);
}

struct DetectionRecord {
  int run_id = 0;
  std::optional<int> actual_failure_time;
  std::optional<int> detected_time;
  std::optional<int> delay;

  bool is_early() const noexcept { return delay && *delay < 0; }
  bool is_in_time() const noexcept { return delay && *delay == 0; }
  bool is_late() const noexcept { return delay && *delay > 0; }
};

/// First time whose predicted level reaches `alarm_level`.
inline std::optional<int> first_alarm(std::span<const int> times, std::span<const Level> predictions, int alarm_level) {
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].value() >= alarm_level) return times[i];
  }
  return std::nullopt;
}

inline std::vector<Level> diagnose_run(const Forest& forest, const Run& frames) {
  std::vector<Level> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(forest_diagnose(forest, frame_features(f, forest.thresholds)).predicted);
  return out;
}

inline DetectionRecord make_detection_record(const Run& frames, std::span<const Level> predictions,
                                             int alarm_level) {
  DetectionRecord rec;
  if (frames.empty()) return rec;
  rec.run_id = frames.front().run;
  std::vector<int> times;
  times.reserve(frames.size());
  for (const auto& f : frames) times.push_back(f.time);
  rec.actual_failure_time = failure_time_of(frames);
  rec.detected_time = first_alarm(times, predictions, alarm_level);
  if (rec.actual_failure_time && rec.detected_time) rec.delay = *rec.detected_time - *rec.actual_failure_time;
  return rec;
}

/// Delay between the first location failure of the run and the first frame
/// the forest diagnoses at `alarm_level` or above.
inline DetectionRecord detect_failure(const Forest& forest, const Run& frames, const ThresholdTable& thresholds,
                                      int alarm_level) {
  if (thresholds != forest.thresholds) throw ArtifactError("detect_failure: thresholds differ from the forest's");
  const auto predictions = diagnose_run(forest, frames);
  return make_detection_record(frames, predictions, alarm_level);
}

struct ErrorRates {
  /// Mean over trees of each tree's misclassification rate.
  double per_tree = 0.0;
  /// Misclassification rate of the majority vote.
  double forest = 0.0;
};

inline ErrorRates misclassification_rate(const Forest& forest, std::span<const LabeledInstance> instances,
                                         Target target = Target::Observed) {
  if (instances.empty()) throw ContractError("misclassification_rate: empty instance set");
  if (forest.trees.empty()) throw ContractError("misclassification_rate: empty forest");
  ErrorRates r;
  for (const auto& t : forest.trees) r.per_tree += tree_error(t, instances, target);
  r.per_tree /= static_cast<double>(forest.trees.size());
  std::size_t wrong = 0;
  for (const auto& inst : instances) wrong += forest_diagnose(forest, inst.features).predicted != label_of(inst, target);
  r.forest = static_cast<double>(wrong) / static_cast<double>(instances.size());
  return r;
}

/// Fraction of instances whose forest diagnosis equals the uncorrupted F^t.
inline double success_rate(const Forest& forest, std::span<const LabeledInstance> eval) {
  return 1.0 - misclassification_rate(forest, eval, Target::GroundTruth).forest;
}

}  // namespace wsnrf
