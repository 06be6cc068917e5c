// Copyright 2026 The wsnrf Authors
// SPDX-License-Identifier: Apache-2.0

// Smallest end-to-end use of the library: simulate ten training runs, grow a
// forest, then diagnose one fresh run frame by frame.

#include <cstdio>

#include "wsnrf/pipeline.hpp"

int main() {
  wsnrf::PipelineConfig config;
  config.simulation.seed = 2026;

  const auto training = wsnrf::build_training_set(config);
  const auto fit = wsnrf::fit_forest(training, config.forest, config.simulation.seed, config.thresholds);
  std::printf("%zu instances, %zu trees kept\n", training.size(), fit.forest.trees.size());

  auto sim = config.simulation;
  sim.runs = 1;
  const auto run = wsnrf::simulate_runs(sim, wsnrf::StreamDomain::EvaluationRun).front();
  const auto record = wsnrf::detect_failure(fit.forest, run, config.thresholds, config.alarm_level);
  for (const auto& frame : run) {
    const auto vote = wsnrf::forest_diagnose(fit.forest, wsnrf::frame_features(frame, config.thresholds));
    std::printf("t=%3d diagnosed=%d truth=%d\n", frame.time, vote.predicted.value(),
                wsnrf::true_global_level(frame, config.thresholds).value());
  }
  if (record.delay) std::printf("failure at t=%d, detected at t=%d\n", *record.actual_failure_time, *record.detected_time);
  return 0;
}
