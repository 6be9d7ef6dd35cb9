#pragma once

#include <filesystem>
#include <ostream>
#include <utility>
#include <vector>

#include "config.hpp"

namespace geoshoot::cli {

/// Source and target images named by the configuration.
std::pair<ScalarImage, ScalarImage> load_inputs(const RunConfig& config);

struct BandSummary {
  int band = 0;
  std::filesystem::path directory;
  RunResult result;
  double min_jacobian = 0.0;
  Footprint footprint;
};

/// Runs one registration per band size. Each out/B<b>/ directory receives
/// convergence.csv, warped.img, displacement.fld, initial_velocity.txt,
/// summary.txt and config.txt; config.txt is also written to out/.
/// Progress goes to `log`. Throws on any failure.
std::vector<BandSummary> run_registration(const RunConfig& config, std::ostream& log);

struct ComplexityRow {
  Variant variant = Variant::State;
  int band = 0;
  Footprint footprint;
  double seconds = 0.0;  // one gradient evaluation at v0 = 0
};

/// Stored-quantity counts of one gradient evaluation, per variant and band size.
std::vector<ComplexityRow> measure_complexity(const RunConfig& config);
/// Prints measure_complexity as a table.
void report_complexity(const RunConfig& config, std::ostream& out);

/// Header and row formatting of convergence.csv.
extern const char* const kConvergenceHeader;
std::string format_row(const ConvergenceRow& row, bool record_time);

/// Full command-line entry point; returns the process exit code
/// (0 success, 1 runtime failure, 2 configuration error).
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geoshoot::cli
