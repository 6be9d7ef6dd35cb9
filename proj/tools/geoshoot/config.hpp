#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geoshoot/optimizer.hpp"
#include "geoshoot/phantom.hpp"
#include "geoshoot/problem.hpp"

namespace geoshoot::cli {

/// Bad flags, config keys or values. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Synthetic input pair "PAIR[:SIZES[:BLUR]]", e.g. "circle-c:64x64:1.0".
/// Pairs: circle-c (circle to C-shape), blobs (Gaussian blob to offset blob).
struct PhantomSpec {
  std::string pair = "circle-c";
  Shape grid{64, 64};
  double blur = 1.0;

  static PhantomSpec parse(const std::string& text);
  std::string str() const;
};

struct RunConfig {
  std::optional<std::filesystem::path> source;
  std::optional<std::filesystem::path> target;
  std::optional<PhantomSpec> phantom;
  Variant variant = Variant::State;
  AdjointScheme adjoint = AdjointScheme::Discrete;
  std::vector<int> bands{16};
  double alpha = 3.0;
  int s = 2;
  double sigma = 1.0;
  int nt = 10;
  OptimizerConfig optimizer;
  double init_noise = 0.0;  // voxel amplitude of a seeded random v0; 0 starts from v0 = 0
  std::filesystem::path out = "geoshoot_out";
  std::uint64_t seed = 0;
  bool complexity_report = false;
  bool record_time = false;

  /// Checks value ranges, input presence and band sizes against `grid`.
  void validate(const Shape& grid) const;
  /// key=value lines that parse back to the same configuration.
  std::string echo() const;
};

/// Keys accepted in config files, as GEOSHOOT_<KEY> environment variables
/// (upper case, '-' as '_') and as --<key> flags.
const std::vector<std::string>& valid_keys();

/// Applies one key=value setting; throws ConfigError on unknown keys or bad values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Reads key=value lines ('#' comments, blank lines ignored).
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

/// Builds the configuration from defaults, then the --config file, then
/// GEOSHOOT_* entries of `environment`, then the flags in `args` (without the
/// program name). Returns nullopt when help was requested (text in `help`).
std::optional<RunConfig> parse_config(const std::vector<std::string>& args,
                                      const std::map<std::string, std::string>& environment,
                                      std::string* help = nullptr);

/// GEOSHOOT_* variables of the current process.
std::map<std::string, std::string> process_environment();

}  // namespace geoshoot::cli
