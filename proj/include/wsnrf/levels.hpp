// Copyright 2026 The wsnrf Authors
// SPDX-License-Identifier: Apache-2.0

/// @file levels.hpp
/// @brief Quantization of raw readings into functioning levels and
/// aggregation of frames into labeled feature vectors.

#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "wsnrf/core.hpp"
#include "wsnrf/sensor_sim.hpp"

namespace wsnrf {

/// Four ascending thresholds per category. A value equal to a threshold
/// belongs to the upper bin.
struct ThresholdTable {
  using Cuts = std::array<double, 4>;
  std::array<Cuts, kNumCategories> cuts = {
      Cuts{22.9, 24.5, 26.0, 28.0},  // degrees C
      Cuts{5.99, 6.4, 7.9, 9.0},     // bars
      Cuts{68.0, 80.0, 92.0, 95.0},  // percent
  };

  const Cuts& operator[](SensorCategory c) const noexcept { return cuts[index_of(c)]; }
  Cuts& operator[](SensorCategory c) noexcept { return cuts[index_of(c)]; }

  void validate() const {
    for (auto c : kAllCategories) {
      const auto& t = (*this)[c];
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i])) throw ConfigError(std::string(to_string(c)) + " thresholds must be finite");
        if (i > 0 && !(t[i - 1] < t[i]))
          throw ConfigError(std::string(to_string(c)) + " thresholds must be strictly ascending");
      }
    }
  }

  friend bool operator==(const ThresholdTable&, const ThresholdTable&) = default;
};

inline Level quantize(double value, SensorCategory category, const ThresholdTable& thresholds) {
  if (!std::isfinite(value)) throw DataError("cannot quantize a non-finite reading");
  const auto& t = thresholds[category];
  int level = 1;
  for (double cut : t) {
    if (value >= cut) ++level;
  }
  return Level(level);
}

struct FeatureVector {
  std::array<Level, kNumCategories> levels{};

  FeatureVector() = default;
  FeatureVector(Level temperature, Level pressure, Level humidity) : levels{temperature, pressure, humidity} {}

  Level operator[](SensorCategory c) const noexcept { return levels[index_of(c)]; }
  Level& operator[](SensorCategory c) noexcept { return levels[index_of(c)]; }

  Level max_level() const noexcept { return max(max(levels[0], levels[1]), levels[2]); }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// One labeled frame. `global_level` is F^t of the readings the network
/// delivered (always the max of `features`); `true_level` is F^t of the
/// uncorrupted values, i.e. with breakdown sentinels replaced by the draw an
/// intact sensor would have made.
struct LabeledInstance {
  int run = 0;
  int time = 1;
  FeatureVector features;
  Level global_level;
  Level true_level;

  friend bool operator==(const LabeledInstance&, const LabeledInstance&) = default;
};

/// Which label an evaluation compares predictions against.
enum class Target { Observed, GroundTruth };

inline Level label_of(const LabeledInstance& inst, Target target) noexcept {
  return target == Target::Observed ? inst.global_level : inst.true_level;
}

namespace detail {

template <bool UseTrueValue>
Level category_level(const ObservationFrame& frame, SensorCategory category, const ThresholdTable& thresholds) {
  Level level{};
  for (const auto& r : frame.readings) {
    if (r.category != category) continue;
    level = max(level, quantize(UseTrueValue ? r.true_value : r.value, category, thresholds));
  }
  return level;
}

}  // namespace detail

/// Max over the quantized levels of the category's readings.
inline Level frame_category_level(const ObservationFrame& frame, SensorCategory category,
                                  const ThresholdTable& thresholds) {
  return detail::category_level<false>(frame, category, thresholds);
}

inline FeatureVector frame_features(const ObservationFrame& frame, const ThresholdTable& thresholds) {
  return FeatureVector(frame_category_level(frame, SensorCategory::Temperature, thresholds),
                       frame_category_level(frame, SensorCategory::Pressure, thresholds),
                       frame_category_level(frame, SensorCategory::Humidity, thresholds));
}

/// F^t: max functioning level over every reading of the frame.
inline Level global_level(const ObservationFrame& frame, const ThresholdTable& thresholds) {
  Level level{};
  for (const auto& r : frame.readings) level = max(level, quantize(r.value, r.category, thresholds));
  return level;
}

/// F^t computed on the uncorrupted values.
inline Level true_global_level(const ObservationFrame& frame, const ThresholdTable& thresholds) {
  Level level{};
  for (auto c : kAllCategories) level = max(level, detail::category_level<true>(frame, c, thresholds));
  return level;
}

inline LabeledInstance label_frame(const ObservationFrame& frame, const ThresholdTable& thresholds) {
  LabeledInstance inst;
  inst.run = frame.run;
  inst.time = frame.time;
  inst.features = frame_features(frame, thresholds);
  inst.global_level = inst.features.max_level();
  inst.true_level = true_global_level(frame, thresholds);
  return inst;
}

inline std::vector<LabeledInstance> label_frames(std::span<const ObservationFrame> frames,
                                                 const ThresholdTable& thresholds) {
  std::vector<LabeledInstance> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(label_frame(f, thresholds));
  return out;
}

}  // namespace wsnrf
