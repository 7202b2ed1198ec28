#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sentiscope/classifiers.hpp"
#include "sentiscope/evaluation.hpp"
#include "sentiscope/features.hpp"
#include "sentiscope/ingest.hpp"

namespace sentiscope {

inline constexpr int kConfigVersion = 1;

// Everything a pipeline run depends on. Paths are kept out of the
// provenance hash so runs into different directories stay comparable.
struct PipelineConfig {
  std::string input;
  std::string output_dir = ".";
  std::string geo;
  std::string population_csv;
  FilterRules filters;
  FeatureConfig features;
  std::vector<AlgorithmSpec> algorithms;
  std::size_t folds = 10;
  ClassQuota quota{2000, 2000, 1000};
  std::vector<std::size_t> sizes{1000, 2000, 3000, 4000, 5000};
  std::uint64_t seed = 42;
  nlohmann::json generator = nlohmann::json::object();

  static PipelineConfig from_json(const nlohmann::json& j);  // InvalidArgument / VersionMismatch
  nlohmann::json to_json() const;
  // Everything except the paths.
  nlohmann::json hashed_json() const;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string config_hash(const PipelineConfig& config);  // 16 hex digits
nlohmann::json provenance_json(const PipelineConfig& config);

// Usage errors return 2, data errors 1; failures print one line on stderr.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args[0] is the program name

}  // namespace sentiscope
