#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kms/anyon.hpp"
#include "kms/distlab.hpp"
#include "kms/luttinger.hpp"
#include "kms/testfn.hpp"

namespace kms::cli {

struct Grid {
  double min = 0.0;
  double max = 0.0;
  int count = 0;

  std::vector<double> points() const;
  bool operator==(const Grid&) const = default;
};

struct Tolerances {
  std::optional<double> abs;
  std::optional<double> rel;
  bool operator==(const Tolerances&) const = default;
};

struct PotentialConfig {
  std::string family = "gaussian";
  double strength = 1.0;
  double width = 1.0;
  bool operator==(const PotentialConfig&) const = default;
};

struct OutputConfig {
  std::optional<std::string> format;
  std::optional<std::string> path;
  bool operator==(const OutputConfig&) const = default;
};

struct InsertionConfig {
  double x = 0.0;
  int sign = 1;
  bool operator==(const InsertionConfig&) const = default;
};

struct BumpConfig {
  double amplitude = 1.0;
  double center = 0.0;
  double width = 1.0;
  bool operator==(const BumpConfig&) const = default;
};

// Every key is optional; commands fill in their own defaults.
struct RunConfig {
  std::optional<std::vector<double>> alpha;
  std::optional<double> beta;
  std::optional<std::vector<double>> eps_schedule;
  std::optional<std::vector<InsertionConfig>> insertions;
  std::optional<PotentialConfig> potential;
  std::optional<int> interaction_case;  // "case" in the file
  std::optional<double> lambda;
  std::optional<Grid> grid;
  std::optional<Tolerances> tolerances;
  std::optional<OutputConfig> output;
  std::optional<std::vector<BumpConfig>> test_function;

  bool operator==(const RunConfig&) const = default;

  // Resolved values with defaults applied.
  double beta_or_default() const;
  std::vector<double> alphas_or(std::vector<double> fallback) const;
  distlab::EpsSchedule schedule() const;
  luttinger::Dispersion dispersion() const;
  testfn::RealTestFunction function_or(const testfn::RealTestFunction& fallback) const;
};

// Throws Error(InvalidConfig) on unknown keys, wrong types or out-of-range values.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);

}  // namespace kms::cli
