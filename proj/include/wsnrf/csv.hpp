// Copyright 2026 The wsnrf Authors
// SPDX-License-Identifier: Apache-2.0

/// @file csv.hpp
/// @brief Frame and labeled-instance CSV files.
///
/// Frames: run,t,sensor_id,category,value,sensor_broken,device_failed_here,
/// ground_truth_failure_time -- one row per reading, empty failure time when
/// the device has not failed yet. Reals are written in shortest round-trip
/// form so a file read back reproduces the frames exactly.

#pragma once

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "wsnrf/levels.hpp"
#include "wsnrf/sensor_sim.hpp"

namespace wsnrf {

inline constexpr std::string_view kFrameCsvHeader =
    "run,t,sensor_id,category,value,sensor_broken,device_failed_here,ground_truth_failure_time";
inline constexpr std::string_view kInstanceCsvHeader = "run,t,temp_level,pressure_level,humidity_level,global_level";

/// Shortest decimal form that parses back to the same double.
inline std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw ContractError("format_real: conversion failed");
  return std::string(buf, end);
}

inline void write_frames_csv(std::ostream& os, std::span<const Run> runs) {
  os << kFrameCsvHeader << '\n';
  for (const auto& run : runs) {
    for (const auto& f : run) {
      const std::string fail = f.ground_truth_failure_time ? std::to_string(*f.ground_truth_failure_time) : "";
      for (const auto& r : f.readings) {
        os << f.run << ',' << f.time << ',' << r.sensor_id << ',' << to_string(r.category) << ','
           << format_real(r.value) << ',' << int{r.sensor_broken} << ',' << int{r.device_failed_here} << ',' << fail
           << '\n';
      }
    }
  }
}

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view field, std::size_t line_no, std::string_view what) {
  T v{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw DataError("line " + std::to_string(line_no) + ": invalid " + std::string(what) + " '" + std::string(field) +
                    "'");
  return v;
}

inline bool parse_flag(std::string_view field, std::size_t line_no, std::string_view what) {
  if (field == "0") return false;
  if (field == "1") return true;
  throw DataError("line " + std::to_string(line_no) + ": invalid " + std::string(what) + " '" + std::string(field) + "'");
}

}  // namespace detail

/// Reads frames grouped by run (in order of first appearance) and time.
/// `true_value` is not stored in the file and is set equal to `value`.
/// Throws DataError naming the offending line.
inline std::vector<Run> read_frames_csv(std::istream& is) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line)) throw DataError("line 1: empty frame file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kFrameCsvHeader) throw DataError("line 1: unexpected frame CSV header");

  std::vector<Run> runs;
  std::map<int, std::size_t> run_slot;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::split_commas(line);
    if (f.size() != 8)
      throw DataError("line " + std::to_string(line_no) + ": expected 8 fields, got " + std::to_string(f.size()));

    const int run = detail::parse_number<int>(f[0], line_no, "run");
    const int t = detail::parse_number<int>(f[1], line_no, "t");
    Reading r;
    r.sensor_id = detail::parse_number<int>(f[2], line_no, "sensor_id");
    const auto cat = parse_category(f[3]);
    if (!cat) throw DataError("line " + std::to_string(line_no) + ": unknown category '" + std::string(f[3]) + "'");
    if (r.sensor_id < 0 || r.sensor_id >= kSensorsPerFrame || category_of_sensor(r.sensor_id) != *cat)
      throw DataError("line " + std::to_string(line_no) + ": sensor_id does not match category");
    r.category = *cat;
    r.value = detail::parse_number<double>(f[4], line_no, "value");
    if (!std::isfinite(r.value)) throw DataError("line " + std::to_string(line_no) + ": non-finite value");
    r.true_value = r.value;
    r.sensor_broken = detail::parse_flag(f[5], line_no, "sensor_broken");
    r.device_failed_here = detail::parse_flag(f[6], line_no, "device_failed_here");
    std::optional<int> fail;
    if (!f[7].empty()) fail = detail::parse_number<int>(f[7], line_no, "ground_truth_failure_time");
    if (t < 1) throw DataError("line " + std::to_string(line_no) + ": t must be >= 1");

    auto [it, inserted] = run_slot.try_emplace(run, runs.size());
    if (inserted) runs.emplace_back();
    auto& frames = runs[it->second];
    if (frames.empty() || frames.back().time != t) {
      if (!frames.empty() && frames.back().time > t)
        throw DataError("line " + std::to_string(line_no) + ": frames of a run must be time-ordered");
      if (!frames.empty() && frames.back().readings.size() != kSensorsPerFrame)
        throw DataError("line " + std::to_string(line_no) + ": previous frame has " +
                        std::to_string(frames.back().readings.size()) + " readings, expected 110");
      ObservationFrame fr;
      fr.run = run;
      fr.time = t;
      fr.ground_truth_failure_time = fail;
      fr.ground_truth_device_failed = fail.has_value();
      frames.push_back(std::move(fr));
    }
    auto& frame = frames.back();
    if (frame.ground_truth_failure_time != fail)
      throw DataError("line " + std::to_string(line_no) + ": inconsistent failure time within a frame");
    if (static_cast<int>(frame.readings.size()) != r.sensor_id)
      throw DataError("line " + std::to_string(line_no) + ": readings must be ordered by sensor_id");
    frame.readings.push_back(r);
  }
  for (const auto& run : runs) {
    if (!run.empty() && run.back().readings.size() != kSensorsPerFrame)
      throw DataError("line " + std::to_string(line_no) + ": last frame of run " + std::to_string(run.back().run) +
                      " is incomplete");
  }
  return runs;
}

inline void write_instances_csv(std::ostream& os, std::span<const LabeledInstance> instances) {
  os << kInstanceCsvHeader << '\n';
  for (const auto& i : instances) {
    os << i.run << ',' << i.time << ',' << i.features[SensorCategory::Temperature].value() << ','
       << i.features[SensorCategory::Pressure].value() << ',' << i.features[SensorCategory::Humidity].value() << ','
       << i.global_level.value() << '\n';
  }
}

}  // namespace wsnrf
