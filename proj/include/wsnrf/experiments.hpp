// Copyright 2026 The wsnrf Authors
// SPDX-License-Identifier: Apache-2.0

/// @file experiments.hpp
/// @brief Seeded batch experiments: detection delay, per-simulation error rate
/// and success rate against forest size, with CSV and SVG output.

#pragma once

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "wsnrf/csv.hpp"
#include "wsnrf/pipeline.hpp"
#include "wsnrf/serialization.hpp"

namespace wsnrf {

enum class ExperimentId { Delay, Error, Trees };

inline std::string_view to_string(ExperimentId id) noexcept {
  switch (id) {
    case ExperimentId::Delay: return "delay";
    case ExperimentId::Error: return "error";
    case ExperimentId::Trees: return "trees";
  }
  return "unknown";
}

inline std::optional<ExperimentId> parse_experiment(std::string_view s) noexcept {
  for (auto id : {ExperimentId::Delay, ExperimentId::Error, ExperimentId::Trees}) {
    if (to_string(id) == s) return id;
  }
  return std::nullopt;
}

/// Tree counts swept by the trees experiment.
inline constexpr std::array<int, 5> kTreeSweep = {5, 10, 20, 50, 100};

/// Error-rate level above which a simulation is flagged.
inline constexpr double kErrorFlagLevel = 0.15;

struct ExperimentReport {
  ExperimentId id = ExperimentId::Delay;
  PipelineConfig config;
  /// Column 0 is the x axis; every further column is one plotted series.
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  Json metadata = Json::object();

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(c));
    return out;
  }
};

/// Built-in configuration for each experiment. Delay and error use the
/// uncorrelated set, trees the correlated set; all keep sensor dropout on.
inline PipelineConfig default_experiment_config(ExperimentId id, std::uint64_t seed) {
  PipelineConfig c;
  c.simulation.seed = seed;
  c.simulation.experiment_set = id == ExperimentId::Trees ? ExperimentSet::Correlated : ExperimentSet::Uncorrelated;
  return c;
}

namespace detail {

struct Prepared {
  std::vector<LabeledInstance> training;
  std::vector<Run> evaluation;
};

inline Prepared prepare(const PipelineConfig& config) {
  config.validate();
  return Prepared{build_training_set(config), simulate_evaluation_runs(config)};
}

inline double fraction_in_time_or_early(std::span<const DetectionRecord> records) {
  std::size_t n = 0;
  std::size_t ok = 0;
  for (const auto& r : records) {
    if (!r.delay) continue;
    ++n;
    ok += *r.delay <= 0;
  }
  return n == 0 ? 0.0 : static_cast<double>(ok) / static_cast<double>(n);
}

}  // namespace detail

/// Running mean of detection delays over the first k evaluation runs,
/// k = 1..evaluation_runs. Runs without both a failure and an alarm are left
/// out of the mean; a k with no usable run yet produces no point.
inline ExperimentReport run_delay_experiment(const PipelineConfig& config) {
  const auto data = detail::prepare(config);
  const auto fit = fit_forest(data.training, config.forest, config.simulation.seed, config.thresholds);

  std::vector<std::vector<Level>> predictions(data.evaluation.size());
  parallel_for(data.evaluation.size(),
               [&](std::size_t r) { predictions[r] = diagnose_run(fit.forest, data.evaluation[r]); });

  ExperimentReport rep;
  rep.id = ExperimentId::Delay;
  rep.config = config;
  rep.columns = {"k", "mean_delay"};

  std::vector<DetectionRecord> records;
  double sum = 0.0;
  std::size_t used = 0;
  int early = 0, in_time = 0, late = 0, undetected = 0, no_failure = 0;
  for (std::size_t r = 0; r < data.evaluation.size(); ++r) {
    auto rec = make_detection_record(data.evaluation[r], predictions[r], config.alarm_level);
    if (!rec.actual_failure_time) ++no_failure;
    else if (!rec.detected_time) ++undetected;
    if (rec.delay) {
      sum += *rec.delay;
      ++used;
      early += rec.is_early();
      in_time += rec.is_in_time();
      late += rec.is_late();
    }
    records.push_back(rec);
    if (used > 0) rep.rows.push_back({static_cast<double>(r + 1), sum / static_cast<double>(used)});
  }

  Json sensitivity = Json::object();
  for (int level = 2; level <= 5; ++level) {
    std::vector<DetectionRecord> alt;
    for (std::size_t r = 0; r < data.evaluation.size(); ++r)
      alt.push_back(make_detection_record(data.evaluation[r], predictions[r], level));
    sensitivity[std::to_string(level)] = detail::fraction_in_time_or_early(alt);
  }

  Json delays = Json::array();
  for (const auto& r : records) delays.push_back(r.delay ? Json(*r.delay) : Json(nullptr));

  rep.metadata["fraction_in_time_or_early"] = detail::fraction_in_time_or_early(records);
  rep.metadata["early"] = early;
  rep.metadata["in_time"] = in_time;
  rep.metadata["late"] = late;
  rep.metadata["undetected"] = undetected;
  rep.metadata["no_failure"] = no_failure;
  rep.metadata["alarm_level_sensitivity"] = std::move(sensitivity);
  rep.metadata["delays"] = std::move(delays);
  rep.metadata["retained_trees"] = fit.forest.trees.size();
  rep.metadata["dropped_trees"] = fit.dropped;
  return rep;
}

/// Per-simulation error of the trees (averaged over trees) and of the vote,
/// scored against the uncorrupted global level.
inline ExperimentReport run_error_experiment(const PipelineConfig& config) {
  const auto data = detail::prepare(config);
  const auto fit = fit_forest(data.training, config.forest, config.simulation.seed, config.thresholds);

  std::vector<ErrorRates> rates(data.evaluation.size());
  parallel_for(data.evaluation.size(), [&](std::size_t r) {
    const auto inst = label_frames(data.evaluation[r], config.thresholds);
    rates[r] = misclassification_rate(fit.forest, inst, Target::GroundTruth);
  });

  ExperimentReport rep;
  rep.id = ExperimentId::Error;
  rep.config = config;
  rep.columns = {"sim_index", "per_tree_error", "forest_error"};
  Json flagged = Json::array();
  for (std::size_t r = 0; r < rates.size(); ++r) {
    rep.rows.push_back({static_cast<double>(r + 1), rates[r].per_tree, rates[r].forest});
    if (rates[r].per_tree >= kErrorFlagLevel) flagged.push_back(r + 1);
  }

  const auto per_tree = rep.column(1);
  const auto forest = rep.column(2);
  auto mean = [](const std::vector<double>& v, std::size_t from, std::size_t to) {
    to = std::min(to, v.size());
    if (from >= to) return 0.0;
    return std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(to),
                           0.0) /
           static_cast<double>(to - from);
  };
  const std::size_t window = std::min<std::size_t>(20, per_tree.size());
  rep.metadata["flagged_sims"] = std::move(flagged);
  rep.metadata["mean_per_tree_error"] = mean(per_tree, 0, per_tree.size());
  rep.metadata["mean_forest_error"] = mean(forest, 0, forest.size());
  rep.metadata["max_per_tree_error"] = *std::max_element(per_tree.begin(), per_tree.end());
  rep.metadata["first_window_mean"] = mean(per_tree, 0, window);
  rep.metadata["last_window_mean"] = mean(per_tree, per_tree.size() - window, per_tree.size());
  rep.metadata["retained_trees"] = fit.forest.trees.size();
  rep.metadata["dropped_trees"] = fit.dropped;
  return rep;
}

/// Success rate on the evaluation runs for each forest size in kTreeSweep.
/// Tree i depends only on (seed, i), so smaller forests are prefixes of the
/// larger ones before filtering.
inline ExperimentReport run_trees_experiment(const PipelineConfig& config) {
  const auto data = detail::prepare(config);
  const auto eval = label_runs(data.evaluation, config.thresholds);

  ExperimentReport rep;
  rep.id = ExperimentId::Trees;
  rep.config = config;
  rep.columns = {"num_trees", "success_rate"};
  Json retained = Json::object();
  for (int trees : kTreeSweep) {
    auto params = config.forest;
    params.num_trees = trees;
    const auto fit = fit_forest(data.training, params, config.simulation.seed, config.thresholds);
    rep.rows.push_back({static_cast<double>(trees), success_rate(fit.forest, eval)});
    retained[std::to_string(trees)] = fit.forest.trees.size();
  }
  rep.metadata["retained_trees"] = std::move(retained);
  return rep;
}

inline ExperimentReport run_experiment(ExperimentId id, const PipelineConfig& config) {
  switch (id) {
    case ExperimentId::Delay: return run_delay_experiment(config);
    case ExperimentId::Error: return run_error_experiment(config);
    case ExperimentId::Trees: return run_trees_experiment(config);
  }
  throw ContractError("unknown experiment");
}

inline void write_report_csv(std::ostream& os, const ExperimentReport& rep) {
  for (std::size_t c = 0; c < rep.columns.size(); ++c) os << (c ? "," : "") << rep.columns[c];
  os << '\n';
  for (const auto& row : rep.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_real(row[c]);
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// SVG

namespace detail {

inline std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct AxisLabels {
  std::string title;
  std::string x;
  std::string y;
};

inline AxisLabels labels_for(ExperimentId id) {
  switch (id) {
    case ExperimentId::Delay:
      return {"Delay in failure detection", "number of simulations", "mean detection delay (time units)"};
    case ExperimentId::Error:
      return {"Error rate in diagnostics", "simulation index", "error rate"};
    case ExperimentId::Trees:
      return {"Successful diagnostics vs forest size", "number of trees", "success rate"};
  }
  return {};
}

}  // namespace detail

/// Static SVG 1.1 line chart of every series in the report. Output bytes are
/// a pure function of the report.
inline std::string render_report(const ExperimentReport& rep) {
  if (rep.rows.empty()) throw ContractError("render_report: empty series");
  constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 55;
  const auto labels = detail::labels_for(rep.id);

  double xmin = rep.rows.front()[0], xmax = xmin, ymin = 0.0, ymax = 0.0;
  for (const auto& row : rep.rows) {
    xmin = std::min(xmin, row[0]);
    xmax = std::max(xmax, row[0]);
    for (std::size_t c = 1; c < row.size(); ++c) {
      ymin = std::min(ymin, row[c]);
      ymax = std::max(ymax, row[c]);
    }
  }
  if (rep.id != ExperimentId::Delay) ymax = std::max(ymax, 1.0);
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  const double ypad = 0.05 * (ymax - ymin);
  ymax += ypad;
  if (ymin < 0.0) ymin -= ypad;

  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
  using detail::fixed;

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << labels.title << "</text>\n";

  // axes and ticks
  s << "<g stroke=\"black\" stroke-width=\"1\">\n"
    << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\"/>\n"
    << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\"/>\n"
    << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double yv = ymin + (ymax - ymin) * i / 5.0;
    s << "<line x1=\"" << fixed(px(xv)) << "\" y1=\"" << H - B << "\" x2=\"" << fixed(px(xv)) << "\" y2=\""
      << H - B + 5 << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << fixed(px(xv)) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << fixed(xv, 1)
      << "</text>\n"
      << "<line x1=\"" << L - 5 << "\" y1=\"" << fixed(py(yv)) << "\" x2=\"" << L << "\" y2=\"" << fixed(py(yv))
      << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << L - 8 << "\" y=\"" << fixed(py(yv) + 4) << "\" text-anchor=\"end\">" << fixed(yv, 2)
      << "</text>\n";
  }
  s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << labels.x
    << "</text>\n"
    << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << (T + H - B) / 2 << ")\">" << labels.y << "</text>\n</g>\n";

  if (rep.id == ExperimentId::Delay) {
    s << "<line class=\"zero\" x1=\"" << L << "\" y1=\"" << fixed(py(0.0)) << "\" x2=\"" << W - R << "\" y2=\""
      << fixed(py(0.0)) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  if (rep.id == ExperimentId::Error) {
    s << "<line class=\"flag\" x1=\"" << L << "\" y1=\"" << fixed(py(kErrorFlagLevel)) << "\" x2=\"" << W - R
      << "\" y2=\"" << fixed(py(kErrorFlagLevel)) << "\" stroke=\"red\" stroke-dasharray=\"4 3\"/>\n";
  }

  static constexpr std::array<const char*, 3> kColors = {"#1f77b4", "#ff7f0e", "#2ca02c"};
  for (std::size_t c = 1; c < rep.columns.size(); ++c) {
    const char* color = kColors[(c - 1) % kColors.size()];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < rep.rows.size(); ++i)
      s << (i ? " " : "") << fixed(px(rep.rows[i][0])) << ',' << fixed(py(rep.rows[i][c]));
    s << "\"/>\n";
    for (const auto& row : rep.rows)
      s << "<circle cx=\"" << fixed(px(row[0])) << "\" cy=\"" << fixed(py(row[c])) << "\" r=\"2\" fill=\"" << color
        << "\"/>\n";
    s << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * static_cast<double>(c) << "\" text-anchor=\"end\" "
      << "font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color << "\">" << rep.columns[c] << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace wsnrf
