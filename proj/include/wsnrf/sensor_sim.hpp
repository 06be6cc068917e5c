// Copyright 2026 The wsnrf Authors
// SPDX-License-Identifier: Apache-2.0

/// @file sensor_sim.hpp
/// @brief Simulated wireless sensor network watching a degrading device.
///
/// A network of 110 sensors (50 temperature, 50 pressure, 10 humidity) is
/// sampled once per time unit. Each sensor location can independently latch
/// into a device-failure state (Bernoulli with parameter t / denominator) and
/// each sensor can independently break down, after which it reports a
/// constant sentinel. Two experiment sets exist: set 1 draws every category
/// from its own Gaussian, set 2 derives healthy pressure and humidity from a
/// reference temperature reading.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wsnrf/core.hpp"

namespace wsnrf {

inline constexpr int kTemperatureSensors = 50;
inline constexpr int kPressureSensors = 50;
inline constexpr int kHumiditySensors = 10;
inline constexpr int kSensorsPerFrame = kTemperatureSensors + kPressureSensors + kHumiditySensors;

/// Sensor ids are laid out by category: [0, 50) temperature, [50, 100)
/// pressure, [100, 110) humidity.
constexpr SensorCategory category_of_sensor(int sensor_id) {
  if (sensor_id < 0 || sensor_id >= kSensorsPerFrame) throw ContractError("sensor id out of range");
  if (sensor_id < kTemperatureSensors) return SensorCategory::Temperature;
  if (sensor_id < kTemperatureSensors + kPressureSensors) return SensorCategory::Pressure;
  return SensorCategory::Humidity;
}

constexpr int sensors_in(SensorCategory c) noexcept {
  switch (c) {
    case SensorCategory::Temperature: return kTemperatureSensors;
    case SensorCategory::Pressure: return kPressureSensors;
    case SensorCategory::Humidity: return kHumiditySensors;
  }
  return 0;
}

/// Gaussian reading model of one category. Parameters are (mean, std dev).
struct SensorModel {
  SensorCategory category = SensorCategory::Temperature;
  double base_mean = 0.0;
  double drift_rate = 0.0;
  double healthy_std = 1.0;
  double failure_mean = 0.0;
  double failure_std = 1.0;
  double breakdown_sentinel = 0.0;

  /// base_mean * (1 + drift_rate * t)
  constexpr double healthy_mean(int t) const noexcept { return base_mean * (1.0 + drift_rate * t); }

  void validate() const {
    if (!(healthy_std > 0.0) || !(failure_std > 0.0))
      throw ConfigError(std::string(to_string(category)) + ": standard deviations must be positive");
  }

  friend bool operator==(const SensorModel&, const SensorModel&) = default;
};

inline constexpr SensorModel kTemperatureModel{SensorCategory::Temperature, 20.0, 0.005, 1.0, 35.0, 1.0, 0.0};
inline constexpr SensorModel kPressureModel{SensorCategory::Pressure, 5.0, 0.01, 0.3, 15.0, 1.0, 1.0};
inline constexpr SensorModel kHumidityModel{SensorCategory::Humidity, 52.5, 0.001, 12.5, 70.0, 10.0, 0.0};

inline constexpr std::array<SensorModel, kNumCategories> kDefaultModels = {kTemperatureModel, kPressureModel,
                                                                           kHumidityModel};

/// Healthy set-2 correlations with the frame's reference temperature x.
constexpr double correlated_pressure(double x) noexcept { return x / 2.0 + 10.0; }
constexpr double correlated_humidity(double x) noexcept { return x * 525.0 + 12.0; }

enum class ExperimentSet : int { Uncorrelated = 1, Correlated = 2 };

struct SimulationConfig {
  ExperimentSet experiment_set = ExperimentSet::Uncorrelated;
  int steps = 100;
  int runs = 1;
  std::uint64_t seed = 0;
  double failure_rate_denominator = 35000.0;
  double sensor_breakdown_prob = 0.005;
  std::array<SensorModel, kNumCategories> models = kDefaultModels;

  const SensorModel& model(SensorCategory c) const noexcept { return models[index_of(c)]; }

  void validate() const {
    if (experiment_set != ExperimentSet::Uncorrelated && experiment_set != ExperimentSet::Correlated)
      throw ConfigError("experiment_set must be 1 or 2");
    if (steps < 1) throw ConfigError("steps must be >= 1");
    if (runs < 1) throw ConfigError("runs must be >= 1");
    if (!(failure_rate_denominator > 0.0)) throw ConfigError("failure_rate_denominator must be positive");
    if (static_cast<double>(steps) / failure_rate_denominator > 1.0)
      throw ConfigError("steps / failure_rate_denominator exceeds 1; failure probability would not be a probability");
    if (!(sensor_breakdown_prob >= 0.0 && sensor_breakdown_prob < 1.0))
      throw ConfigError("sensor_breakdown_prob must lie in [0, 1)");
    for (std::size_t i = 0; i < kNumCategories; ++i) {
      if (models[i].category != kAllCategories[i]) throw ConfigError("sensor models out of category order");
      models[i].validate();
    }
  }

  friend bool operator==(const SimulationConfig&, const SimulationConfig&) = default;
};

/// Per-sensor latched flags. Both only ever go false -> true within a run.
struct SensorState {
  int sensor_id = 0;
  SensorCategory category = SensorCategory::Temperature;
  bool device_failed_here = false;
  bool sensor_broken = false;
};

/// One sensor draw. `true_value` is what an intact sensor would have reported;
/// it differs from `value` only when the sensor is broken.
struct SensorDraw {
  double value = 0.0;
  double true_value = 0.0;
};

struct Reading {
  int sensor_id = 0;
  SensorCategory category = SensorCategory::Temperature;
  double value = 0.0;
  double true_value = 0.0;
  bool sensor_broken = false;
  bool device_failed_here = false;

  friend bool operator==(const Reading&, const Reading&) = default;
};

struct ObservationFrame {
  int run = 0;
  int time = 1;
  std::vector<Reading> readings;
  bool ground_truth_device_failed = false;
  std::optional<int> ground_truth_failure_time;

  friend bool operator==(const ObservationFrame&, const ObservationFrame&) = default;
};

using Run = std::vector<ObservationFrame>;
using Rng = std::mt19937_64;

/// Draws one reading for a sensor in its current (pre-step) state.
///
/// `reference_temperature` is this frame's reference temperature reading and
/// is required for healthy pressure/humidity sensors in set 2. The Gaussian
/// draw is made even for broken sensors so that `true_value` is populated and
/// the value stream stays aligned whether or not breakdowns are enabled.
inline SensorDraw step_sensor(const SensorState& state, int t, const SensorModel& model, ExperimentSet set,
                              Rng& rng, std::optional<double> reference_temperature = std::nullopt) {
  if (t < 0) throw ContractError("step_sensor: negative time");
  if (model.category != state.category) throw ContractError("step_sensor: model/category mismatch");

  double v = 0.0;
  if (state.device_failed_here) {
    v = std::normal_distribution<double>(model.failure_mean, model.failure_std)(rng);
  } else if (set == ExperimentSet::Correlated && state.category != SensorCategory::Temperature) {
    if (!reference_temperature)
      throw ContractError("step_sensor: correlated draw requires the frame's reference temperature");
    v = state.category == SensorCategory::Pressure ? correlated_pressure(*reference_temperature)
                                                   : correlated_humidity(*reference_temperature);
  } else {
    v = std::normal_distribution<double>(model.healthy_mean(t), model.healthy_std)(rng);
  }
  return SensorDraw{state.sensor_broken ? model.breakdown_sentinel : v, v};
}

/// Bernoulli(t / denominator) draw deciding whether a location fails at t.
inline bool draw_device_failure(int t, double failure_rate_denominator, Rng& rng) {
  const double p = static_cast<double>(t) / failure_rate_denominator;
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("device failure probability outside [0, 1]: " + std::to_string(p));
  return std::bernoulli_distribution(p)(rng);
}

/// Simulates one monitoring run of `config.steps` frames.
///
/// Values, location failures and sensor breakdowns use three independent
/// streams derived from `stream_seed`, so toggling breakdowns does not perturb
/// the readings or the failure times. Within a step every sensor reports from
/// its pre-step state; failure and breakdown latches drawn at t take effect
/// from t + 1.
inline Run simulate_run(const SimulationConfig& config, std::uint64_t stream_seed, int run_id = 0) {
  config.validate();
  Rng values(derive_seed(stream_seed, StreamDomain::SensorValues, 0));
  Rng failures(derive_seed(stream_seed, StreamDomain::LocationFailures, 0));
  Rng breakdowns(derive_seed(stream_seed, StreamDomain::SensorBreakdowns, 0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<SensorState> states(kSensorsPerFrame);
  for (int id = 0; id < kSensorsPerFrame; ++id) states[id] = SensorState{id, category_of_sensor(id), false, false};

  std::optional<int> failure_time;
  Run frames;
  frames.reserve(static_cast<std::size_t>(config.steps));

  for (int t = 1; t <= config.steps; ++t) {
    ObservationFrame frame;
    frame.run = run_id;
    frame.time = t;
    frame.readings.reserve(kSensorsPerFrame);

    std::optional<double> reference;
    for (auto& s : states) {
      if (s.category != SensorCategory::Temperature && !reference) {
        // No operational temperature sensor this frame.
        reference = config.model(SensorCategory::Temperature).healthy_mean(t);
      }
      const auto draw = step_sensor(s, t, config.model(s.category), config.experiment_set, values, reference);
      if (s.category == SensorCategory::Temperature && !s.sensor_broken && !reference) reference = draw.value;
      frame.readings.push_back(
          Reading{s.sensor_id, s.category, draw.value, draw.true_value, s.sensor_broken, s.device_failed_here});
    }

    for (auto& s : states) {
      if (!s.device_failed_here && draw_device_failure(t, config.failure_rate_denominator, failures)) {
        s.device_failed_here = true;
        if (!failure_time) failure_time = t;
      }
      if (!s.sensor_broken && unit(breakdowns) < config.sensor_breakdown_prob) s.sensor_broken = true;
    }

    frame.ground_truth_device_failed = failure_time.has_value();
    frame.ground_truth_failure_time = failure_time;
    frames.push_back(std::move(frame));
  }
  return frames;
}

/// Simulates `config.runs` independent runs. Run r uses the stream seed
/// derive_seed(config.seed, domain, r + first_index).
inline std::vector<Run> simulate_runs(const SimulationConfig& config,
                                      StreamDomain domain = StreamDomain::TrainingRun, std::uint64_t first_index = 0) {
  config.validate();
  std::vector<Run> runs(static_cast<std::size_t>(config.runs));
  parallel_for(runs.size(), [&](std::size_t r) {
    runs[r] = simulate_run(config, derive_seed(config.seed, domain, first_index + r), static_cast<int>(r));
  });
  return runs;
}

/// Failure time of a run, taken from its last frame.
inline std::optional<int> failure_time_of(const Run& run) {
  return run.empty() ? std::nullopt : run.back().ground_truth_failure_time;
}

}  // namespace wsnrf
