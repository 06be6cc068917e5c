// Copyright 2026 The wsnrf Authors
// SPDX-License-Identifier: Apache-2.0

/// @file serialization.hpp
/// @brief JSON forms of forests and pipeline configurations.
///
/// Forest documents carry every node's CountTuple so gains can be recomputed
/// offline. Configuration documents are strict: unknown keys are rejected.

#pragma once

#include <nlohmann/json.hpp>

#include <set>
#include <string>

#include "wsnrf/forest.hpp"
#include "wsnrf/pipeline.hpp"

namespace wsnrf {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kForestFormat = "wsnrf-forest";
inline constexpr int kForestVersion = 1;

inline Json thresholds_to_json(const ThresholdTable& t) {
  Json j = Json::object();
  for (auto c : kAllCategories) j[std::string(to_string(c))] = t[c];
  return j;
}

// ---------------------------------------------------------------------------
// Forest

namespace detail {

inline Json node_to_json(const Tree& tree, std::int32_t index) {
  const auto& n = tree.nodes[static_cast<std::size_t>(index)];
  Json j;
  j["counts"] = n.counts.counts;
  if (n.is_leaf()) {
    j["predicted_level"] = n.predicted_level().value();
    return j;
  }
  j["split_category"] = std::string(to_string(*n.split_category));
  Json children = Json::object();
  for (std::size_t l = 0; l < n.children.size(); ++l) {
    if (n.children[l] != kNoChild) children[std::to_string(l + 1)] = node_to_json(tree, n.children[l]);
  }
  j["children"] = std::move(children);
  return j;
}

inline std::int32_t node_from_json(Tree& tree, const Json& j, int depth) {
  if (!j.is_object() || !j.contains("counts")) throw ArtifactError("forest: node without counts");
  if (depth > static_cast<int>(kNumCategories)) throw ArtifactError("forest: tree deeper than the category count");
  const auto raw = j.at("counts").get<std::vector<std::int64_t>>();
  if (raw.size() != Level::kCount) throw ArtifactError("forest: counts must have 5 components");
  TreeNode node;
  node.counts = CountTuple(raw[0], raw[1], raw[2], raw[3], raw[4]);
  const auto self = static_cast<std::int32_t>(tree.nodes.size());
  tree.nodes.push_back(node);

  if (!j.contains("split_category")) {
    if (j.contains("predicted_level") && j.at("predicted_level").get<int>() != node.predicted_level().value())
      throw ArtifactError("forest: leaf predicted_level disagrees with its counts");
    return self;
  }
  const auto cat = parse_category(j.at("split_category").get<std::string>());
  if (!cat) throw ArtifactError("forest: unknown split_category");
  tree.nodes[static_cast<std::size_t>(self)].split_category = cat;
  CountTuple sum;
  for (const auto& [key, child] : j.at("children").items()) {
    int level = 0;
    try {
      level = std::stoi(key);
    } catch (const std::exception&) {
      throw ArtifactError("forest: child key '" + key + "' is not a level");
    }
    if (level < Level::kMin || level > Level::kMax) throw ArtifactError("forest: child level out of range");
    const auto c = node_from_json(tree, child, depth + 1);
    tree.nodes[static_cast<std::size_t>(self)].children[static_cast<std::size_t>(level - 1)] = c;
    sum += tree.nodes[static_cast<std::size_t>(c)].counts;
  }
  if (sum != tree.nodes[static_cast<std::size_t>(self)].counts)
    throw ArtifactError("forest: children counts do not sum to their parent");
  return self;
}

}  // namespace detail

inline Json forest_to_json(const Forest& forest) {
  Json j;
  j["format"] = kForestFormat;
  j["version"] = kForestVersion;
  j["impurity"] = std::string(to_string(forest.impurity));
  j["seed"] = forest.seed;
  j["thresholds"] = thresholds_to_json(forest.thresholds);
  Json trees = Json::array();
  for (const auto& t : forest.trees) {
    Json jt;
    Json sample = Json::array();
    for (const auto& s : t.sample) sample.push_back({s.run, s.time});
    jt["sample_times"] = std::move(sample);
    jt["error"] = t.error ? Json(*t.error) : Json(nullptr);
    jt["root"] = detail::node_to_json(t, 0);
    trees.push_back(std::move(jt));
  }
  j["trees"] = std::move(trees);
  return j;
}

inline ThresholdTable thresholds_from_json(const Json& j);

/// Throws ArtifactError on a missing or unsupported version and on any
/// structural inconsistency.
inline Forest forest_from_json(const Json& j) {
  try {
    if (!j.is_object() || !j.contains("version")) throw ArtifactError("forest: missing version field");
    if (j.value("format", std::string()) != kForestFormat) throw ArtifactError("forest: not a wsnrf forest document");
    if (j.at("version").get<int>() != kForestVersion)
      throw ArtifactError("forest: unsupported version " + j.at("version").dump());
    Forest f;
    const auto imp = parse_impurity(j.at("impurity").get<std::string>());
    if (!imp) throw ArtifactError("forest: unknown impurity");
    f.impurity = *imp;
    f.seed = j.at("seed").get<std::uint64_t>();
    f.thresholds = thresholds_from_json(j.at("thresholds"));
    for (const auto& jt : j.at("trees")) {
      Tree t;
      for (const auto& s : jt.at("sample_times")) t.sample.push_back(SampleKey{s.at(0).get<int>(), s.at(1).get<int>()});
      if (!jt.at("error").is_null()) t.error = jt.at("error").get<double>();
      detail::node_from_json(t, jt.at("root"), 0);
      f.trees.push_back(std::move(t));
    }
    if (f.trees.empty()) throw ArtifactError("forest: no trees");
    return f;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ArtifactError(std::string("forest: malformed document: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Configuration

namespace detail {

inline void reject_unknown(const Json& j, std::string_view section, std::initializer_list<std::string_view> known) {
  if (!j.is_object()) throw ConfigError(std::string(section) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + std::string(section));
  }
}

template <class T>
void read_if(const Json& j, std::string_view key, T& out, std::string_view section) {
  const std::string k(key);
  if (!j.contains(k)) return;
  try {
    out = j.at(k).get<T>();
  } catch (const std::exception&) {
    throw ConfigError("bad value for " + std::string(section) + "." + k);
  }
}

}  // namespace detail

inline ThresholdTable thresholds_from_json(const Json& j) {
  ThresholdTable t;
  detail::reject_unknown(j, "thresholds", {"temperature", "pressure", "humidity"});
  for (auto c : kAllCategories) detail::read_if(j, to_string(c), t[c], "thresholds");
  t.validate();
  return t;
}

inline Json config_to_json(const PipelineConfig& c) {
  Json j;
  j["seed"] = c.simulation.seed;
  j["simulation"] = {
      {"experiment_set", static_cast<int>(c.simulation.experiment_set)},
      {"steps", c.simulation.steps},
      {"runs", c.simulation.runs},
      {"failure_rate_denominator", c.simulation.failure_rate_denominator},
      {"sensor_breakdown_prob", c.simulation.sensor_breakdown_prob},
  };
  j["thresholds"] = thresholds_to_json(c.thresholds);
  j["forest"] = {
      {"num_trees", c.forest.num_trees},
      {"impurity", std::string(to_string(c.forest.impurity))},
      {"sample_fraction", c.forest.sample_fraction},
      {"with_replacement", c.forest.with_replacement},
      {"filter_weak", c.forest.filter_weak},
  };
  j["pipeline"] = {
      {"alarm_level", c.alarm_level},
      {"training_runs", c.training_runs},
      {"evaluation_runs", c.evaluation_runs},
  };
  return j;
}

/// Overlays `j` onto `base`. Keys absent from `j` keep their base value.
/// Returns whether the document carried a seed.
inline bool apply_config_json(const Json& j, PipelineConfig& c) {
  using detail::read_if;
  detail::reject_unknown(j, "config", {"seed", "simulation", "thresholds", "forest", "pipeline"});
  bool has_seed = false;
  if (j.contains("seed")) {
    read_if(j, "seed", c.simulation.seed, "config");
    has_seed = true;
  }
  if (j.contains("simulation")) {
    const auto& s = j.at("simulation");
    detail::reject_unknown(s, "simulation",
                           {"experiment_set", "steps", "runs", "failure_rate_denominator", "sensor_breakdown_prob"});
    int set = static_cast<int>(c.simulation.experiment_set);
    read_if(s, "experiment_set", set, "simulation");
    if (set != 1 && set != 2) throw ConfigError("simulation.experiment_set must be 1 or 2");
    c.simulation.experiment_set = static_cast<ExperimentSet>(set);
    read_if(s, "steps", c.simulation.steps, "simulation");
    read_if(s, "runs", c.simulation.runs, "simulation");
    read_if(s, "failure_rate_denominator", c.simulation.failure_rate_denominator, "simulation");
    read_if(s, "sensor_breakdown_prob", c.simulation.sensor_breakdown_prob, "simulation");
  }
  if (j.contains("thresholds")) {
    // Partial tables overlay the current one.
    const auto& t = j.at("thresholds");
    detail::reject_unknown(t, "thresholds", {"temperature", "pressure", "humidity"});
    for (auto cat : kAllCategories) read_if(t, to_string(cat), c.thresholds[cat], "thresholds");
  }
  if (j.contains("forest")) {
    const auto& f = j.at("forest");
    detail::reject_unknown(f, "forest", {"num_trees", "impurity", "sample_fraction", "with_replacement", "filter_weak"});
    read_if(f, "num_trees", c.forest.num_trees, "forest");
    if (f.contains("impurity")) {
      std::string name;
      read_if(f, "impurity", name, "forest");
      const auto imp = parse_impurity(name);
      if (!imp) throw ConfigError("forest.impurity must be 'entropy' or 'gini'");
      c.forest.impurity = *imp;
    }
    read_if(f, "sample_fraction", c.forest.sample_fraction, "forest");
    read_if(f, "with_replacement", c.forest.with_replacement, "forest");
    read_if(f, "filter_weak", c.forest.filter_weak, "forest");
  }
  if (j.contains("pipeline")) {
    const auto& p = j.at("pipeline");
    detail::reject_unknown(p, "pipeline", {"alarm_level", "training_runs", "evaluation_runs"});
    read_if(p, "alarm_level", c.alarm_level, "pipeline");
    read_if(p, "training_runs", c.training_runs, "pipeline");
    read_if(p, "evaluation_runs", c.evaluation_runs, "pipeline");
  }
  c.validate();
  return has_seed;
}

inline PipelineConfig config_from_json(const Json& j, PipelineConfig base = {}) {
  apply_config_json(j, base);
  return base;
}

}  // namespace wsnrf
