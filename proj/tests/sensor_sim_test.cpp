// Copyright 2026 The wsnrf Authors
// SPDX-License-Identifier: Apache-2.0

#include "wsnrf/sensor_sim.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace wsnrf {
namespace {

SimulationConfig quiet_config(ExperimentSet set = ExperimentSet::Uncorrelated) {
  SimulationConfig c;
  c.experiment_set = set;
  c.failure_rate_denominator = 1e12;
  c.sensor_breakdown_prob = 0.0;
  c.seed = 11;
  return c;
}

TEST(SensorModel, HealthyMeanDrift) {
  EXPECT_DOUBLE_EQ(kTemperatureModel.healthy_mean(0), 20.0);
  EXPECT_DOUBLE_EQ(kTemperatureModel.healthy_mean(100), 30.0);
  EXPECT_DOUBLE_EQ(kPressureModel.healthy_mean(100), 10.0);
  EXPECT_DOUBLE_EQ(kHumidityModel.healthy_mean(0), 52.5);
}

TEST(StepSensor, BrokenSensorsReturnSentinel) {
  Rng rng(1);
  SensorState p{60, SensorCategory::Pressure, false, true};
  SensorState t{3, SensorCategory::Temperature, true, true};
  SensorState h{105, SensorCategory::Humidity, false, true};
  for (int step : {1, 50, 100}) {
    EXPECT_EQ(step_sensor(p, step, kPressureModel, ExperimentSet::Uncorrelated, rng).value, 1.0);
    EXPECT_EQ(step_sensor(t, step, kTemperatureModel, ExperimentSet::Uncorrelated, rng).value, 0.0);
    EXPECT_EQ(step_sensor(h, step, kHumidityModel, ExperimentSet::Correlated, rng, 24.0).value, 0.0);
  }
}

TEST(StepSensor, BrokenSensorKeepsWouldBeValue) {
  Rng rng(1);
  SensorState p{60, SensorCategory::Pressure, false, true};
  const auto d = step_sensor(p, 5, kPressureModel, ExperimentSet::Correlated, rng, 24.0);
  EXPECT_EQ(d.value, 1.0);
  EXPECT_EQ(d.true_value, 22.0);
}

TEST(StepSensor, CorrelatedHealthyReadings) {
  Rng rng(1);
  SensorState p{50, SensorCategory::Pressure, false, false};
  SensorState h{100, SensorCategory::Humidity, false, false};
  EXPECT_EQ(step_sensor(p, 7, kPressureModel, ExperimentSet::Correlated, rng, 24.0).value, 22.0);
  EXPECT_EQ(step_sensor(h, 7, kHumidityModel, ExperimentSet::Correlated, rng, 24.0).value, 24.0 * 525.0 + 12.0);
}

TEST(StepSensor, CorrelatedDrawWithoutReferenceIsContractViolation) {
  Rng rng(1);
  SensorState p{50, SensorCategory::Pressure, false, false};
  EXPECT_THROW(step_sensor(p, 7, kPressureModel, ExperimentSet::Correlated, rng), ContractError);
  // A failed location draws from the Gaussian and needs no reference.
  p.device_failed_here = true;
  EXPECT_NO_THROW(step_sensor(p, 7, kPressureModel, ExperimentSet::Correlated, rng));
}

TEST(StepSensor, FailureDistributionMean) {
  Rng rng(5);
  SensorState t{0, SensorCategory::Temperature, true, false};
  double sum = 0.0;
  constexpr int n = 20000;
  for (int i = 0; i < n; ++i) sum += step_sensor(t, 10, kTemperatureModel, ExperimentSet::Uncorrelated, rng).value;
  // std error 1/sqrt(n)
  EXPECT_NEAR(sum / n, 35.0, 4.0 / std::sqrt(double{n}));
}

TEST(DrawDeviceFailure, ZeroTimeNeverFails) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) EXPECT_FALSE(draw_device_failure(0, 35000.0, rng));
}

TEST(DrawDeviceFailure, ProbabilityOutsideUnitIntervalIsConfigError) {
  Rng rng(3);
  EXPECT_THROW(draw_device_failure(200, 100.0, rng), ConfigError);
  EXPECT_THROW(draw_device_failure(-1, 100.0, rng), ConfigError);
  EXPECT_NO_THROW(draw_device_failure(100, 100.0, rng));
}

TEST(DrawDeviceFailure, EmpiricalFrequencyWithinBinomialBound) {
  Rng rng(2024);
  constexpr int n = 1'000'000;
  const double p = 100.0 / 35000.0;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += draw_device_failure(100, 35000.0, rng);
  const double sigma = std::sqrt(n * p * (1 - p));
  EXPECT_NEAR(hits, n * p, 3.0 * sigma);
}

TEST(SimulationConfig, Validation) {
  SimulationConfig c;
  EXPECT_NO_THROW(c.validate());
  c.steps = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.failure_rate_denominator = 50.0;  // 100 / 50 > 1
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.sensor_breakdown_prob = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.models[0].healthy_std = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(SimulateRun, FrameComposition) {
  SimulationConfig c;
  c.seed = 7;
  const auto run = simulate_run(c, 99);
  ASSERT_EQ(run.size(), 100u);
  for (std::size_t i = 0; i < run.size(); ++i) {
    const auto& f = run[i];
    EXPECT_EQ(f.time, static_cast<int>(i) + 1);
    ASSERT_EQ(f.readings.size(), 110u);
    std::array<int, 3> per{};
    for (const auto& r : f.readings) ++per[index_of(r.category)];
    EXPECT_EQ(per, (std::array<int, 3>{50, 50, 10}));
  }
}

TEST(SimulateRun, DeterministicGivenSeed) {
  SimulationConfig c;
  EXPECT_EQ(simulate_run(c, 1234), simulate_run(c, 1234));
  EXPECT_NE(simulate_run(c, 1234), simulate_run(c, 1235));
  c.runs = 4;
  c.seed = 9;
  EXPECT_EQ(simulate_runs(c), simulate_runs(c));
}

TEST(SimulateRun, DegenerateNoFailureRun) {
  const auto run = simulate_run(quiet_config(), 42);
  for (const auto& f : run) {
    EXPECT_FALSE(f.ground_truth_device_failed);
    EXPECT_FALSE(f.ground_truth_failure_time.has_value());
    for (const auto& r : f.readings) {
      EXPECT_FALSE(r.sensor_broken);
      EXPECT_FALSE(r.device_failed_here);
      EXPECT_EQ(r.value, r.true_value);
    }
  }
}

TEST(SimulateRun, LatchedFlagsAreSuffixes) {
  SimulationConfig c;
  c.sensor_breakdown_prob = 0.02;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto run = simulate_run(c, s);
    for (int id = 0; id < kSensorsPerFrame; ++id) {
      bool failed = false, broken = false;
      for (const auto& f : run) {
        const auto& r = f.readings[static_cast<std::size_t>(id)];
        EXPECT_EQ(r.sensor_id, id);
        if (failed) { EXPECT_TRUE(r.device_failed_here); }
        if (broken) { EXPECT_TRUE(r.sensor_broken); }
        failed = r.device_failed_here;
        broken = r.sensor_broken;
      }
    }
  }
}

TEST(SimulateRun, GroundTruthFailureTimeIsFirstLocationFailure) {
  SimulationConfig c;
  int failing_runs = 0;
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto run = simulate_run(c, s);
    const auto ft = failure_time_of(run);
    for (const auto& f : run) {
      EXPECT_EQ(f.ground_truth_device_failed, f.ground_truth_failure_time.has_value());
      if (f.ground_truth_failure_time) { EXPECT_EQ(f.ground_truth_failure_time, ft); }
      EXPECT_EQ(f.ground_truth_device_failed, ft && f.time >= *ft);
    }
    if (!ft) continue;
    ++failing_runs;
    // The draw at ft latches; failure readings start at ft + 1.
    for (const auto& f : run) {
      bool any = false;
      for (const auto& r : f.readings) any = any || r.device_failed_here;
      EXPECT_EQ(any, f.time > *ft) << "t=" << f.time << " ft=" << *ft;
    }
  }
  EXPECT_GT(failing_runs, 20);
}

TEST(SimulateRun, BreakdownToggleDoesNotPerturbValuesOrFailures) {
  SimulationConfig a;
  SimulationConfig b = a;
  b.sensor_breakdown_prob = 0.0;
  const auto ra = simulate_run(a, 77);
  const auto rb = simulate_run(b, 77);
  for (std::size_t i = 0; i < ra.size(); ++i) {
    EXPECT_EQ(ra[i].ground_truth_failure_time, rb[i].ground_truth_failure_time);
    for (std::size_t k = 0; k < ra[i].readings.size(); ++k) {
      EXPECT_EQ(ra[i].readings[k].device_failed_here, rb[i].readings[k].device_failed_here);
      if (a.experiment_set == ExperimentSet::Uncorrelated) {
        EXPECT_EQ(ra[i].readings[k].true_value, rb[i].readings[k].true_value);
      }
    }
  }
}

TEST(SimulateRun, HealthyTemperatureMeanDrift) {
  auto c = quiet_config();
  constexpr int runs = 10000;
  std::array<double, 3> sum{};
  const std::array<int, 3> times = {1, 50, 100};
  for (int r = 0; r < runs; ++r) {
    const auto run = simulate_run(c, derive_seed(c.seed, StreamDomain::EvaluationRun, static_cast<std::uint64_t>(r)));
    for (std::size_t k = 0; k < times.size(); ++k) {
      const auto& f = run[static_cast<std::size_t>(times[k] - 1)];
      for (int id = 0; id < kTemperatureSensors; ++id) sum[k] += f.readings[static_cast<std::size_t>(id)].value;
    }
  }
  const double n = double{runs} * kTemperatureSensors;
  for (std::size_t k = 0; k < times.size(); ++k) {
    EXPECT_NEAR(sum[k] / n, 20.0 * (1.0 + 0.005 * times[k]), 4.0 / std::sqrt(n)) << "t=" << times[k];
  }
}

TEST(SimulateRun, CorrelatedReadingsFollowReferenceTemperature) {
  const auto run = simulate_run(quiet_config(ExperimentSet::Correlated), 5);
  for (const auto& f : run) {
    const double x = f.readings[0].value;  // lowest operational temperature sensor
    for (const auto& r : f.readings) {
      if (r.category == SensorCategory::Pressure) { EXPECT_EQ(r.value, x / 2.0 + 10.0); }
      if (r.category == SensorCategory::Humidity) { EXPECT_EQ(r.value, x * 525.0 + 12.0); }
    }
  }
}

TEST(SimulateRun, CorrelatedReferenceSkipsBrokenSensors) {
  auto c = quiet_config(ExperimentSet::Correlated);
  c.sensor_breakdown_prob = 0.5;
  const auto run = simulate_run(c, 8);
  int checked_fallback = 0;
  for (const auto& f : run) {
    std::optional<double> x;
    for (int id = 0; id < kTemperatureSensors && !x; ++id) {
      const auto& r = f.readings[static_cast<std::size_t>(id)];
      if (!r.sensor_broken) x = r.value;
    }
    if (!x) {
      x = kTemperatureModel.healthy_mean(f.time);
      ++checked_fallback;
    }
    for (const auto& r : f.readings) {
      if (r.category == SensorCategory::Pressure) { EXPECT_EQ(r.true_value, correlated_pressure(*x)); }
    }
  }
  EXPECT_GT(checked_fallback, 0);
}

}  // namespace
}  // namespace wsnrf
