// Copyright 2026 The wsnrf Authors
// SPDX-License-Identifier: Apache-2.0

/// @file core.hpp
/// @brief Shared vocabulary: sensor categories, functioning levels, error
/// types and seed derivation.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace wsnrf {

enum class SensorCategory : std::uint8_t { Temperature = 0, Pressure = 1, Humidity = 2 };

inline constexpr std::size_t kNumCategories = 3;
inline constexpr std::array<SensorCategory, kNumCategories> kAllCategories = {
    SensorCategory::Temperature, SensorCategory::Pressure, SensorCategory::Humidity};

constexpr std::size_t index_of(SensorCategory c) noexcept { return static_cast<std::size_t>(c); }

inline std::string_view to_string(SensorCategory c) noexcept {
  switch (c) {
    case SensorCategory::Temperature: return "temperature";
    case SensorCategory::Pressure: return "pressure";
    case SensorCategory::Humidity: return "humidity";
  }
  return "unknown";
}

inline std::optional<SensorCategory> parse_category(std::string_view s) noexcept {
  for (auto c : kAllCategories) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Errors. Each kind maps onto one CLI exit code.

enum class ErrorKind { Contract, Config, Data, Artifact, Io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Precondition or internal-consistency violation by the caller.
struct ContractError : Error {
  explicit ContractError(const std::string& w) : Error(ErrorKind::Contract, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::Config, w) {}
};
struct DataError : Error {
  explicit DataError(const std::string& w) : Error(ErrorKind::Data, w) {}
};
struct ArtifactError : Error {
  explicit ArtifactError(const std::string& w) : Error(ErrorKind::Artifact, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorKind::Io, w) {}
};

// ---------------------------------------------------------------------------
// Functioning level: 1 = normal ... 5 = most abnormal.

class Level {
 public:
  static constexpr int kMin = 1;
  static constexpr int kMax = 5;
  static constexpr int kCount = 5;

  constexpr Level() = default;
  constexpr explicit Level(int v) : v_(v) {
    if (v < kMin || v > kMax) throw ContractError("functioning level out of range: " + std::to_string(v));
  }

  constexpr int value() const noexcept { return v_; }
  /// Zero-based slot, for indexing 5-element arrays.
  constexpr std::size_t slot() const noexcept { return static_cast<std::size_t>(v_ - 1); }

  friend constexpr auto operator<=>(Level, Level) = default;

 private:
  int v_ = kMin;
};

constexpr Level max(Level a, Level b) noexcept { return a < b ? b : a; }

// ---------------------------------------------------------------------------
// Seed derivation. Every random stream is a pure function of the user seed and
// a (domain, index) pair so parallel work is schedule-independent.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class StreamDomain : std::uint64_t {
  TrainingRun = 1,
  EvaluationRun = 2,
  Tree = 3,
  SensorValues = 4,
  LocationFailures = 5,
  SensorBreakdowns = 6,
};

constexpr std::uint64_t derive_seed(std::uint64_t seed, StreamDomain domain, std::uint64_t index) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(domain));
  return splitmix64(h ^ index);
}

/// Runs fn(i) for i in [0, n) across worker threads. Each index writes only its
/// own output slot, so results do not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned max_threads = 0) {
  unsigned hw = max_threads != 0 ? max_threads : std::thread::hardware_concurrency();
  if (hw <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(hw, n);
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += workers) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace wsnrf
