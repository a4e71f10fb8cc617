#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "szego/kernel.hpp"
#include "szego/verify.hpp"

namespace szego::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

enum class ConfigFormat { Json, Toml };

/// `.json` selects JSON; anything else is read as TOML.
ConfigFormat format_for_path(const std::string& path);

/// TOML subset: tables, dotted keys, strings, numbers, booleans, arrays and
/// inline tables. Throws ParseError with the line and column of the problem.
nlohmann::json parse_toml(const std::string& text);
nlohmann::json parse_config_text(const std::string& text, ConfigFormat format);

struct PolyCheckOptions {
  double radius = 2.0;
  std::size_t samples = 4000;
};

struct RunConfig {
  std::optional<Polynomial> polynomial;
  std::vector<PointPair> pairs;
  std::optional<SamplerSpec> sampler;
  QuadratureConfig quadrature;
  PolyCheckOptions poly_check;
  VerifyConfig verify;
  std::vector<std::string> suites;  // empty runs every suite
  double coefficient_radius = 1.0;
  std::vector<std::pair<std::string, Polynomial>> corpus;  // empty uses the default corpus
  std::string csv_out;
  std::string refined_csv_out;
  std::string json_out;
  std::uint64_t seed = 20240611;
  int threads = 0;
  bool refine = false;

  /// The normalised form: every key present, parse(to_json()) reproduces it.
  nlohmann::json to_json() const;
};

/// Throws ConfigError naming the offending key for unknown keys or bad types.
/// Relative polynomial file paths resolve against base_dir.
RunConfig run_config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool refine = false;
  std::string out;
  std::vector<std::string> suites;
};

void apply_overrides(RunConfig& cfg, const Overrides& o);

const std::vector<std::string>& suite_names();

/// Each command writes its table or report to `data` and short summaries to
/// `info`, and returns the exit code. Config problems throw ConfigError.
int cmd_poly_check(const RunConfig& cfg, std::ostream& data, std::ostream& info);
int cmd_kernel_eval(const RunConfig& cfg, std::ostream& data, std::ostream& info);
int cmd_verify(const RunConfig& cfg, std::ostream& data, std::ostream& info);
int cmd_sweep(const RunConfig& cfg, std::ostream& data, std::ostream& info);

}  // namespace szego::cli
