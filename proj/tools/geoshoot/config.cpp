#include "config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

extern char** environ;

namespace geoshoot::cli {
namespace {

const std::vector<std::string> kBooleanKeys{"complexity-report", "record-time"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string normalize_key(std::string key) {
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
    return c == '_' ? '-' : static_cast<char>(std::tolower(c));
  });
  return key;
}

std::string joined_keys() {
  std::string out;
  for (const auto& k : valid_keys()) out += (out.empty() ? "" : ", ") + k;
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const std::string v = trim(value);
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) {
    throw ConfigError("invalid value '" + value + "' for " + key);
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "off" || v == "nan") return std::numeric_limits<double>::quiet_NaN();
  return parse_number<double>(key, v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = normalize_key(trim(value));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("invalid boolean '" + value + "' for " + key);
}

Shape parse_sizes(const std::string& text) {
  std::vector<int> sizes;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, 'x')) sizes.push_back(parse_number<int>("phantom sizes", part));
  if (sizes.size() == 1) sizes.push_back(sizes.front());
  if (sizes.size() < 2 || sizes.size() > 3) throw ConfigError("phantom sizes must have 2 or 3 axes: " + text);
  for (int n : sizes) {
    if (n < 2) throw ConfigError("phantom sizes must be at least 2: " + text);
  }
  return Shape(std::span<const int>(sizes));
}

std::string format_real(double x) {
  if (std::isnan(x)) return "off";
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

PhantomSpec PhantomSpec::parse(const std::string& text) {
  PhantomSpec spec;
  std::vector<std::string> parts;
  std::stringstream ss(trim(text));
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(trim(part));
  if (parts.empty() || parts.size() > 3) throw ConfigError("phantom must be PAIR[:SIZES[:BLUR]]: " + text);
  spec.pair = parts[0];
  if (spec.pair != "circle-c" && spec.pair != "blobs") {
    throw ConfigError("unknown phantom pair '" + spec.pair + "' (expected circle-c or blobs)");
  }
  if (parts.size() > 1) spec.grid = parse_sizes(parts[1]);
  if (parts.size() > 2) spec.blur = parse_number<double>("phantom blur", parts[2]);
  if (!(spec.blur >= 0.0)) throw ConfigError("phantom blur must be non-negative");
  return spec;
}

std::string PhantomSpec::str() const {
  std::string sizes;
  for (int a = 0; a < grid.dims(); ++a) sizes += (a ? "x" : "") + std::to_string(grid[a]);
  return pair + ":" + sizes + ":" + format_real(blur);
}

const std::vector<std::string>& valid_keys() {
  static const std::vector<std::string> keys{
      "source", "target", "phantom",   "variant",        "adjoint", "bands",
      "alpha",  "s",      "sigma",     "nt",             "iters",   "cg-max",
      "cg-tol", "jacobian-floor",      "init-noise",     "out",     "seed",
      "complexity-report", "record-time"};
  return keys;
}

void apply_setting(RunConfig& c, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = normalize_key(trim(raw_key));
  const std::string value = trim(raw_value);
  try {
    if (key == "source") {
      c.source = value;
    } else if (key == "target") {
      c.target = value;
    } else if (key == "phantom") {
      if (value.empty() || value == "none") {
        c.phantom.reset();
      } else {
        c.phantom = PhantomSpec::parse(value);
      }
    } else if (key == "variant") {
      c.variant = parse_variant(value);
    } else if (key == "adjoint") {
      c.adjoint = parse_adjoint_scheme(value);
    } else if (key == "bands") {
      std::vector<int> bands;
      std::stringstream ss(value);
      std::string part;
      while (std::getline(ss, part, ',')) bands.push_back(parse_number<int>(key, part));
      if (bands.empty()) throw ConfigError("bands must list at least one size");
      c.bands = std::move(bands);
    } else if (key == "alpha") {
      c.alpha = parse_number<double>(key, value);
    } else if (key == "s") {
      c.s = parse_number<int>(key, value);
    } else if (key == "sigma") {
      c.sigma = parse_number<double>(key, value);
    } else if (key == "nt") {
      c.nt = parse_number<int>(key, value);
    } else if (key == "iters") {
      c.optimizer.max_outer_iterations = parse_number<int>(key, value);
    } else if (key == "cg-max") {
      c.optimizer.cg_max_iterations = parse_number<int>(key, value);
    } else if (key == "cg-tol") {
      c.optimizer.cg_relative_tolerance = parse_number<double>(key, value);
    } else if (key == "jacobian-floor") {
      c.optimizer.jacobian_floor = parse_real(key, value);
    } else if (key == "init-noise") {
      c.init_noise = parse_number<double>(key, value);
    } else if (key == "out") {
      c.out = value;
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "complexity-report") {
      c.complexity_report = parse_bool(key, value);
    } else if (key == "record-time") {
      c.record_time = parse_bool(key, value);
    } else {
      throw ConfigError("unknown key '" + raw_key + "'; valid keys: " + joined_keys());
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void RunConfig::validate(const Shape& grid) const {
  const bool files = source.has_value() || target.has_value();
  if (files && phantom) throw ConfigError("give either --source/--target or --phantom, not both");
  if (!files && !phantom) throw ConfigError("no input: give --source and --target, or --phantom");
  if (files) {
    if (!source || !target) throw ConfigError("--source and --target must be given together");
    for (const auto& p : {*source, *target}) {
      if (!std::filesystem::exists(p)) throw ConfigError("input file not found: " + p.string());
    }
  }
  for (int b : bands) {
    if (b < 1) throw ConfigError("band size must be positive, got " + std::to_string(b));
    for (int a = 0; a < grid.dims(); ++a) {
      if (b > grid[a]) {
        throw ConfigError("band size " + std::to_string(b) + " exceeds grid size " + std::to_string(grid[a]) +
                          " on axis " + std::to_string(a));
      }
    }
  }
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be non-negative");
  if (s < 1) throw ConfigError("s must be at least 1");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (nt < 1) throw ConfigError("nt must be at least 1");
  if (!(init_noise >= 0.0)) throw ConfigError("init-noise must be non-negative");
  try {
    optimizer.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::string RunConfig::echo() const {
  std::ostringstream os;
  if (source) os << "source=" << source->string() << "\n";
  if (target) os << "target=" << target->string() << "\n";
  if (phantom) os << "phantom=" << phantom->str() << "\n";
  os << "variant=" << to_string(variant) << "\n";
  os << "adjoint=" << to_string(adjoint) << "\n";
  os << "bands=";
  for (std::size_t i = 0; i < bands.size(); ++i) os << (i ? "," : "") << bands[i];
  os << "\n";
  os << "alpha=" << format_real(alpha) << "\n";
  os << "s=" << s << "\n";
  os << "sigma=" << format_real(sigma) << "\n";
  os << "nt=" << nt << "\n";
  os << "iters=" << optimizer.max_outer_iterations << "\n";
  os << "cg-max=" << optimizer.cg_max_iterations << "\n";
  os << "cg-tol=" << format_real(optimizer.cg_relative_tolerance) << "\n";
  os << "jacobian-floor=" << format_real(optimizer.jacobian_floor) << "\n";
  os << "init-noise=" << format_real(init_noise) << "\n";
  os << "out=" << out.string() << "\n";
  os << "seed=" << seed << "\n";
  os << "complexity-report=" << (complexity_report ? "true" : "false") << "\n";
  os << "record-time=" << (record_time ? "true" : "false") << "\n";
  return os.str();
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": expected key=value");
    }
    entries.emplace_back(normalize_key(trim(line.substr(0, eq))), trim(line.substr(eq + 1)));
  }
  return entries;
}

std::optional<RunConfig> parse_config(const std::vector<std::string>& args,
                                      const std::map<std::string, std::string>& environment,
                                      std::string* help) {
  CLI::App app{"Band-limited geodesic-shooting registration with Gauss-Newton-Krylov optimization",
               "geoshoot"};
  std::string config_file;
  app.add_option("--config", config_file, "key=value configuration file");
  std::map<std::string, std::vector<std::string>> flag_values;
  static const std::map<std::string, std::string> descriptions{
      {"source", "source image file"},
      {"target", "target image file"},
      {"phantom", "synthetic pair PAIR[:NxN[:BLUR]], PAIR in circle-c, blobs"},
      {"variant", "state or deformation (default state)"},
      {"adjoint", "discrete or jacobi (default discrete)"},
      {"bands", "comma-separated band sizes to sweep (default 16)"},
      {"alpha", "regularization weight in voxel^2 (default 3)"},
      {"s", "regularization order (default 2)"},
      {"sigma", "image-noise scale (default 1)"},
      {"nt", "time steps (default 10)"},
      {"iters", "outer Gauss-Newton iterations (default 10)"},
      {"cg-max", "CG iterations per outer step (default 20)"},
      {"cg-tol", "relative CG residual tolerance (default 0.1)"},
      {"jacobian-floor", "reject steps with min det Dphi at or below this, or 'off' (default 0)"},
      {"init-noise", "random initial velocity, peak displacement in voxels (default 0)"},
      {"out", "output directory (default geoshoot_out)"},
      {"seed", "seed for --init-noise (default 0)"},
      {"complexity-report", "print stored-quantity counts per variant and band, then exit"},
      {"record-time", "write wall-clock seconds into convergence.csv"},
  };
  for (const auto& key : valid_keys()) {
    const auto text = descriptions.count(key) ? descriptions.at(key) : std::string();
    if (std::find(kBooleanKeys.begin(), kBooleanKeys.end(), key) != kBooleanKeys.end()) {
      app.add_flag("--" + key, text);
    } else {
      app.add_option("--" + key, flag_values[key], text)->take_all()->type_size(1)->allow_extra_args(false);
    }
  }

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    if (help) *help = app.help();
    return std::nullopt;
  } catch (const CLI::ExtrasError& e) {
    throw ConfigError(std::string(e.what()) + "; valid keys: " + joined_keys());
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  // The variant may be named several times within one source, but never with different values.
  auto check_variant = [](const std::vector<std::string>& values, const std::string& where) {
    for (const auto& v : values) {
      if (trim(v) != trim(values.front())) {
        throw ConfigError("conflicting variant values in " + where + ": '" + values.front() + "' and '" + v + "'");
      }
    }
  };

  RunConfig config;
  if (!config_file.empty()) {
    const auto entries = read_config_file(config_file);
    std::vector<std::string> variants;
    for (const auto& [k, v] : entries) {
      if (k == "variant") variants.push_back(v);
    }
    check_variant(variants, config_file);
    for (const auto& [k, v] : entries) apply_setting(config, k, v);
  }
  for (const auto& [name, value] : environment) {
    if (name.rfind("GEOSHOOT_", 0) != 0) continue;
    const std::string key = normalize_key(name.substr(9));
    if (std::find(valid_keys().begin(), valid_keys().end(), key) == valid_keys().end()) {
      throw ConfigError("unknown environment key '" + name + "'; valid keys: " + joined_keys());
    }
    apply_setting(config, key, value);
  }
  for (const auto& key : valid_keys()) {
    if (std::find(kBooleanKeys.begin(), kBooleanKeys.end(), key) != kBooleanKeys.end()) {
      if (app.count("--" + key) > 0) apply_setting(config, key, "true");
      continue;
    }
    const auto& values = flag_values[key];
    if (values.empty()) continue;
    if (key == "variant") check_variant(values, "flags");
    apply_setting(config, key, values.back());
  }
  // Files and phantoms are exclusive; a later source replaces the earlier kind of input.
  if (!flag_values["phantom"].empty() && flag_values["source"].empty() && flag_values["target"].empty()) {
    config.source.reset();
    config.target.reset();
  }
  if ((!flag_values["source"].empty() || !flag_values["target"].empty()) && flag_values["phantom"].empty()) {
    config.phantom.reset();
  }
  return config;
}

std::map<std::string, std::string> process_environment() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    const std::string entry(*e);
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    const std::string name = entry.substr(0, eq);
    if (name.rfind("GEOSHOOT_", 0) == 0) out.emplace(name, entry.substr(eq + 1));
  }
  return out;
}

}  // namespace geoshoot::cli
