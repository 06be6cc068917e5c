// Copyright 2026 The wsnrf Authors
// SPDX-License-Identifier: Apache-2.0

/// @file forest.hpp
/// @brief Random forest of 5-way categorical decision trees.
///
/// Every node holds a CountTuple: the number of training instances per global
/// failure level that reached it. A node splits on the unused sensor category
/// with the largest information gain, creating one child per functioning
/// level of that category that is actually populated. Growth stops once every
/// category has been used on the path, once the node's tuple has at least four
/// zero components, or once no remaining category has positive gain. There is
/// no pruning.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <unordered_set>
#include <vector>

#include "wsnrf/core.hpp"
#include "wsnrf/levels.hpp"

namespace wsnrf {

// ---------------------------------------------------------------------------
// CountTuple

struct CountTuple {
  std::array<std::int64_t, Level::kCount> counts{};

  CountTuple() = default;
  CountTuple(std::int64_t n1, std::int64_t n2, std::int64_t n3, std::int64_t n4, std::int64_t n5)
      : counts{n1, n2, n3, n4, n5} {
    for (auto n : counts) {
      if (n < 0) throw ContractError("CountTuple components must be non-negative");
    }
  }

  std::int64_t operator[](Level l) const noexcept { return counts[l.slot()]; }
  void add(Level l, std::int64_t n = 1) noexcept { counts[l.slot()] += n; }

  std::int64_t total() const noexcept { return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}); }
  int zero_components() const noexcept {
    return static_cast<int>(std::count(counts.begin(), counts.end(), std::int64_t{0}));
  }

  /// P(k/p). Only meaningful when total() > 0.
  double proportion(std::size_t slot) const noexcept {
    return static_cast<double>(counts[slot]) / static_cast<double>(total());
  }

  /// Most populated level; ties go to the lowest level.
  Level argmax() const noexcept {
    std::size_t best = 0;
    for (std::size_t k = 1; k < counts.size(); ++k) {
      if (counts[k] > counts[best]) best = k;
    }
    return Level(static_cast<int>(best) + 1);
  }

  CountTuple& operator+=(const CountTuple& o) noexcept {
    for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += o.counts[k];
    return *this;
  }

  friend bool operator==(const CountTuple&, const CountTuple&) = default;
};

// ---------------------------------------------------------------------------
// Impurity and gain

enum class Impurity { Entropy, Gini };

inline std::string_view to_string(Impurity i) noexcept { return i == Impurity::Entropy ? "entropy" : "gini"; }

inline std::optional<Impurity> parse_impurity(std::string_view s) noexcept {
  if (s == "entropy") return Impurity::Entropy;
  if (s == "gini") return Impurity::Gini;
  return std::nullopt;
}

/// Shannon entropy in bits, with 0 log 0 = 0.
inline double entropy(const CountTuple& c) {
  if (c.total() <= 0) throw ContractError("entropy of an empty CountTuple is undefined");
  double h = 0.0;
  for (std::size_t k = 0; k < c.counts.size(); ++k) {
    if (c.counts[k] == 0) continue;
    const double p = c.proportion(k);
    h -= p * std::log2(p);
  }
  return h;
}

inline double gini(const CountTuple& c) {
  if (c.total() <= 0) throw ContractError("gini of an empty CountTuple is undefined");
  double s = 0.0;
  for (std::size_t k = 0; k < c.counts.size(); ++k) {
    const double p = c.proportion(k);
    s += p * p;
  }
  return 1.0 - s;
}

inline double impurity(const CountTuple& c, Impurity kind) {
  return kind == Impurity::Entropy ? entropy(c) : gini(c);
}

/// f(parent) - sum_j P_j f(child_j), where P_j is the share of the parent's
/// instances sent to child j. Empty children contribute nothing.
inline double gain(const CountTuple& parent, std::span<const CountTuple> children, Impurity kind) {
  if (parent.total() <= 0) throw ContractError("gain: parent CountTuple is empty");
  CountTuple sum;
  for (const auto& ch : children) sum += ch;
  if (sum != parent) throw ContractError("gain: children do not sum to the parent CountTuple");

  const double n = static_cast<double>(parent.total());
  double weighted = 0.0;
  for (const auto& ch : children) {
    const auto m = ch.total();
    if (m == 0) continue;
    weighted += static_cast<double>(m) / n * impurity(ch, kind);
  }
  return impurity(parent, kind) - weighted;
}

/// Gains at or below this are treated as "no useful split", and two gains
/// closer than this are treated as equal. Mathematically equal gains computed
/// from differently ordered partitions differ only by rounding residue.
inline constexpr double kGainEpsilon = 1e-12;

// ---------------------------------------------------------------------------
// Trees

inline constexpr std::int32_t kNoChild = -1;

struct TreeNode {
  CountTuple counts;
  std::optional<SensorCategory> split_category;
  /// Child node index per functioning level of split_category, or kNoChild.
  std::array<std::int32_t, Level::kCount> children{kNoChild, kNoChild, kNoChild, kNoChild, kNoChild};

  bool is_leaf() const noexcept { return !split_category.has_value(); }
  Level predicted_level() const noexcept { return counts.argmax(); }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Identifies a training instance (run, time) so samples can be audited and
/// out-of-sample dates recovered.
struct SampleKey {
  int run = 0;
  int time = 0;
  friend bool operator==(const SampleKey&, const SampleKey&) = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::vector<SampleKey> sample;
  std::optional<double> error;

  const TreeNode& root() const { return nodes.at(0); }

  /// Depth of the deepest leaf; the root alone is depth 0.
  int depth() const {
    int deepest = 0;
    std::vector<std::pair<std::int32_t, int>> stack{{0, 0}};
    while (!stack.empty()) {
      auto [i, d] = stack.back();
      stack.pop_back();
      deepest = std::max(deepest, d);
      for (auto c : nodes[static_cast<std::size_t>(i)].children) {
        if (c != kNoChild) stack.emplace_back(c, d + 1);
      }
    }
    return deepest;
  }

  friend bool operator==(const Tree&, const Tree&) = default;
};

namespace detail {

inline CountTuple count_labels(std::span<const LabeledInstance> all, std::span<const std::size_t> idx) {
  CountTuple c;
  for (auto i : idx) c.add(all[i].global_level);
  return c;
}

inline std::int32_t grow_node(Tree& tree, std::span<const LabeledInstance> all, std::vector<std::size_t> idx,
                              std::array<bool, kNumCategories> used, Impurity kind) {
  const auto self = static_cast<std::int32_t>(tree.nodes.size());
  TreeNode node;
  node.counts = count_labels(all, idx);
  tree.nodes.push_back(node);
  const CountTuple counts = tree.nodes.back().counts;

  const bool exhausted = std::all_of(used.begin(), used.end(), [](bool u) { return u; });
  if (exhausted || counts.zero_components() >= 4) return self;

  std::optional<SensorCategory> best;
  double best_gain = 0.0;
  for (auto c : kAllCategories) {
    if (used[index_of(c)]) continue;
    std::array<CountTuple, Level::kCount> parts{};
    for (auto i : idx) parts[all[i].features[c].slot()].add(all[i].global_level);
    const double g = gain(counts, parts, kind);
    if (!best || g > best_gain + kGainEpsilon) {
      best_gain = g;
      best = c;
    }
  }
  if (!best || best_gain <= kGainEpsilon) return self;

  std::array<std::vector<std::size_t>, Level::kCount> buckets;
  for (auto i : idx) buckets[all[i].features[*best].slot()].push_back(i);
  used[index_of(*best)] = true;

  tree.nodes[static_cast<std::size_t>(self)].split_category = best;
  for (std::size_t l = 0; l < buckets.size(); ++l) {
    if (buckets[l].empty()) continue;
    const auto child = grow_node(tree, all, std::move(buckets[l]), used, kind);
    tree.nodes[static_cast<std::size_t>(self)].children[l] = child;
  }
  return self;
}

}  // namespace detail

/// Grows one tree on `sample`. Growth is deterministic given the sample;
/// equal gains (within kGainEpsilon) resolve to the first category in
/// temperature, pressure, humidity order.
inline Tree grow_tree(std::span<const LabeledInstance> sample, Impurity kind) {
  if (sample.empty()) throw ContractError("grow_tree: empty sample");
  Tree tree;
  tree.sample.reserve(sample.size());
  for (const auto& s : sample) tree.sample.push_back(SampleKey{s.run, s.time});
  std::vector<std::size_t> idx(sample.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  detail::grow_node(tree, sample, std::move(idx), {false, false, false}, kind);
  return tree;
}

/// Walks the tree along the observation's levels. When the edge for the
/// observed level was never populated in training, the current node's
/// majority level is returned.
inline Level tree_diagnose(const Tree& tree, const FeatureVector& features) {
  const TreeNode* node = &tree.root();
  while (!node->is_leaf()) {
    const auto next = node->children[features[*node->split_category].slot()];
    if (next == kNoChild) break;
    node = &tree.nodes[static_cast<std::size_t>(next)];
  }
  return node->predicted_level();
}

// ---------------------------------------------------------------------------
// Sampling

/// Indices of a sample of round(fraction * N) instances, drawn without
/// replacement unless `with_replacement` is set.
inline std::vector<std::size_t> bootstrap_indices(std::size_t n, double fraction, bool with_replacement, Rng& rng) {
  if (n == 0) throw ContractError("bootstrap: empty instance set");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("sample fraction must lie in (0, 1]");
  const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))));
  std::vector<std::size_t> out;
  out.reserve(k);
  if (with_replacement) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < k; ++i) out.push_back(pick(rng));
  } else {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::sample(all.begin(), all.end(), std::back_inserter(out), k, rng);
  }
  return out;
}

inline std::vector<LabeledInstance> bootstrap_dates(std::span<const LabeledInstance> instances, double fraction,
                                                    bool with_replacement, Rng& rng) {
  std::vector<LabeledInstance> out;
  for (auto i : bootstrap_indices(instances.size(), fraction, with_replacement, rng)) out.push_back(instances[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Forest

struct ForestParams {
  int num_trees = 100;
  Impurity impurity = Impurity::Entropy;
  double sample_fraction = 0.67;
  bool with_replacement = false;
  bool filter_weak = true;

  void validate() const {
    if (num_trees < 1) throw ConfigError("num_trees must be >= 1");
    if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) throw ConfigError("sample_fraction must lie in (0, 1]");
  }

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct Forest {
  std::vector<Tree> trees;
  Impurity impurity = Impurity::Entropy;
  std::uint64_t seed = 0;
  /// Thresholds the training instances were quantized with. Diagnosis must
  /// use the same table.
  ThresholdTable thresholds;

  friend bool operator==(const Forest&, const Forest&) = default;
};

/// Trains params.num_trees trees, tree i on its own sample drawn from the
/// stream derive_seed(seed, Tree, i). Weak-tree filtering is not applied
/// here; see filter_weak_trees.
inline Forest train_forest(std::span<const LabeledInstance> instances, const ForestParams& params,
                           std::uint64_t seed, const ThresholdTable& thresholds = {}) {
  params.validate();
  if (instances.empty()) throw ContractError("train_forest: no training instances");
  Forest forest;
  forest.impurity = params.impurity;
  forest.seed = seed;
  forest.thresholds = thresholds;
  forest.trees.resize(static_cast<std::size_t>(params.num_trees));
  parallel_for(forest.trees.size(), [&](std::size_t i) {
    Rng rng(derive_seed(seed, StreamDomain::Tree, i));
    const auto sample = bootstrap_dates(instances, params.sample_fraction, params.with_replacement, rng);
    forest.trees[i] = grow_tree(sample, params.impurity);
  });
  return forest;
}

inline double tree_error(const Tree& tree, std::span<const LabeledInstance> eval, Target target = Target::Observed) {
  if (eval.empty()) throw ContractError("tree_error: empty evaluation set");
  std::size_t wrong = 0;
  for (const auto& inst : eval) wrong += tree_diagnose(tree, inst.features) != label_of(inst, target);
  return static_cast<double>(wrong) / static_cast<double>(eval.size());
}

struct FilterResult {
  Forest forest;
  std::size_t dropped = 0;
  /// Set when every tree failed the < 0.5 rule and the single best one was kept.
  bool all_weak = false;
};

namespace detail {

inline FilterResult filter_by(Forest forest, const std::vector<double>& errors) {
  FilterResult out;
  std::vector<Tree> kept;
  for (std::size_t i = 0; i < forest.trees.size(); ++i) {
    forest.trees[i].error = errors[i];
    if (errors[i] < 0.5) kept.push_back(std::move(forest.trees[i]));
  }
  out.dropped = forest.trees.size() - kept.size();
  if (kept.empty() && !forest.trees.empty()) {
    const auto best = std::min_element(errors.begin(), errors.end()) - errors.begin();
    kept.push_back(std::move(forest.trees[static_cast<std::size_t>(best)]));
    out.all_weak = true;
    out.dropped -= 1;
  }
  forest.trees = std::move(kept);
  out.forest = std::move(forest);
  return out;
}

}  // namespace detail

/// Drops every tree whose error on `eval` is >= 0.5 and records the error on
/// the survivors.
inline FilterResult filter_weak_trees(Forest forest, std::span<const LabeledInstance> eval) {
  std::vector<double> errors;
  errors.reserve(forest.trees.size());
  for (const auto& t : forest.trees) errors.push_back(tree_error(t, eval));
  return detail::filter_by(std::move(forest), errors);
}

/// Same rule, each tree judged on the training instances outside its own
/// sample. A tree whose sample covers the whole training set is judged on
/// the full set instead.
inline FilterResult filter_weak_trees_out_of_sample(Forest forest, std::span<const LabeledInstance> training) {
  auto key = [](int run, int time) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(run)) << 32) | static_cast<std::uint32_t>(time);
  };
  std::vector<double> errors;
  errors.reserve(forest.trees.size());
  for (const auto& t : forest.trees) {
    std::unordered_set<std::uint64_t> in_sample;
    for (const auto& s : t.sample) in_sample.insert(key(s.run, s.time));
    std::vector<LabeledInstance> oob;
    for (const auto& inst : training) {
      if (!in_sample.contains(key(inst.run, inst.time))) oob.push_back(inst);
    }
    errors.push_back(oob.empty() ? tree_error(t, training) : tree_error(t, oob));
  }
  return detail::filter_by(std::move(forest), errors);
}

struct Vote {
  Level predicted;
  std::array<int, Level::kCount> votes{};
};

/// Majority vote over the trees; ties go to the highest tied level.
inline Vote forest_diagnose(const Forest& forest, const FeatureVector& features) {
  if (forest.trees.empty()) throw ContractError("forest_diagnose: empty forest");
  Vote v;
  for (const auto& t : forest.trees) ++v.votes[tree_diagnose(t, features).slot()];
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.votes.size(); ++k) {
    if (v.votes[k] >= v.votes[best]) best = k;
  }
  v.predicted = Level(static_cast<int>(best) + 1);
  return v;
}

/// Sharkey's ensemble diversity grade over an evaluation set, 1 (best) to 4.
inline int diversity_level(const Forest& forest, std::span<const LabeledInstance> eval,
                           Target target = Target::Observed) {
  if (forest.trees.empty() || eval.empty()) throw ContractError("diversity_level: empty forest or evaluation set");
  bool at_most_one_wrong = true;
  bool majority_always_right = true;
  bool someone_always_right = true;
  for (const auto& inst : eval) {
    const Level truth = label_of(inst, target);
    std::size_t wrong = 0;
    for (const auto& t : forest.trees) wrong += tree_diagnose(t, inst.features) != truth;
    at_most_one_wrong = at_most_one_wrong && wrong <= 1;
    majority_always_right = majority_always_right && forest_diagnose(forest, inst.features).predicted == truth;
    someone_always_right = someone_always_right && wrong < forest.trees.size();
  }
  if (at_most_one_wrong) return 1;
  if (majority_always_right) return 2;
  if (someone_always_right) return 3;
  return 4;
}

}  // namespace wsnrf
