#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "irt/designs.hpp"
#include "irt/imputation.hpp"
#include "irt/irt.hpp"
#include "irt/network.hpp"
#include "irt/simlab.hpp"
#include "irt/verify.hpp"

namespace irt {

std::string version();

/// A validated experiment read from a JSON config and its CSV files.
struct Experiment {
  ExposureMapping mapping;
  Design design;
  Assignment z_obs;
  std::vector<double> y_obs;  // NaN where the file says NA
  int a;
  int b;
  ImputerSpec imputer;
  std::size_t k;
  double alpha;
  std::optional<std::uint64_t> seed;
  std::size_t k_inner;  // 1 means paired mode
  std::string digest;   // SHA-256 over the config and every file it references

  std::size_t size() const noexcept { return design.size(); }
  ExposureVector exposures() const { return mapping(z_obs); }
  /// Units per exposure name at z_obs.
  std::map<std::string, std::size_t> exposure_counts() const;
  PartialTheta partial() const;
};

/// Throws ParseError (with file and line) or ValidationError.
Experiment load_experiment(const std::filesystem::path& config);

struct TestReport {
  IrtResult result;
  std::string mode;
  double t_obs;
  double missing_rate;
  bool reject;
  std::optional<std::string> warning;
};

/// Fits the imputer and runs the configured test.
TestReport run_experiment(const Experiment& experiment, std::uint64_t seed, unsigned threads = 1);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& bytes);

// Emission. Output is a pure function of the arguments. Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string result_json(const Experiment& experiment, const TestReport& report);
std::string rejection_csv(const RejectionTable& table);
std::string curve_csv(const std::vector<LrCurvePoint>& points);
/// Sidecar written next to an output file as <out>.meta.json.
std::string meta_json(const std::string& command, const std::string& digest, std::uint64_t seed);

}  // namespace irt
