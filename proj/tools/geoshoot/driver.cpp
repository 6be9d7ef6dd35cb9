#include "driver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "geoshoot/errors.hpp"
#include "geoshoot/image.hpp"
#include "geoshoot/image_io.hpp"

namespace geoshoot::cli {

const char* const kConvergenceHeader = "iter,energy,mse_rel,grad_inf_rel,cg_iters,step,wall_time_s";

namespace {

FrequencyBand cube_band(int b, const Shape& grid) {
  std::vector<int> sizes(static_cast<std::size_t>(grid.dims()), b);
  return FrequencyBand(Shape(std::span<const int>(sizes)), grid);
}

// Seeded smooth Hermitian field whose largest displacement is `voxels` voxels.
BandLimitedField random_velocity(const FrequencyBand& band, std::uint64_t seed, double voxels) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  BandLimitedField f = BandLimitedField::zeros(band);
  for (int c = 0; c < f.components(); ++c) {
    for (std::size_t k = 0; k < band.count(); ++k) {
      const auto freq = band.frequencies(k);
      double r2 = 0.0;
      for (int a = 0; a < band.dims(); ++a) r2 += freq[static_cast<std::size_t>(a)] * freq[static_cast<std::size_t>(a)];
      const double amplitude = 1.0 / (1.0 + r2);
      const double re = normal(rng);
      const double im = normal(rng);
      f.at(c, k) = Complex(re, im) * amplitude;
    }
  }
  f.symmetrize();
  const auto samples = include(f, band.grid_sizes());
  double peak = 0.0;
  for (int a = 0; a < samples.components(); ++a) {
    for (double x : samples.component(a)) peak = std::max(peak, std::abs(x) * band.grid_sizes()[a]);
  }
  if (peak > 0.0) f *= voxels / peak;
  return f;
}

std::string number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_velocity(const std::filesystem::path& path, const BandLimitedField& v) {
  const FrequencyBand& band = v.band();
  std::ostringstream os;
  os << "# component";
  for (int a = 0; a < band.dims(); ++a) os << " k" << a;
  os << " re im\n";
  for (int c = 0; c < v.components(); ++c) {
    for (std::size_t k = 0; k < band.count(); ++k) {
      const auto freq = band.frequencies(k);
      os << c;
      for (int a = 0; a < band.dims(); ++a) os << " " << freq[static_cast<std::size_t>(a)];
      os << " " << number(v.at(c, k).real()) << " " << number(v.at(c, k).imag()) << "\n";
    }
  }
  write_text(path, os.str());
}

}  // namespace

std::string format_row(const ConvergenceRow& row, bool record_time) {
  std::ostringstream os;
  os << row.iteration << "," << number(row.energy) << "," << number(row.mse_rel) << ","
     << number(row.grad_inf_rel) << "," << row.cg_iterations << "," << number(row.step) << ","
     << number(record_time ? row.wall_time : 0.0);
  return os.str();
}

std::pair<ScalarImage, ScalarImage> load_inputs(const RunConfig& config) {
  if (config.phantom) {
    const PhantomSpec& p = *config.phantom;
    if (p.pair == "blobs") {
      return {make_phantom(PhantomKind::GaussianBlob, p.grid, p.blur),
              make_phantom(PhantomKind::OffsetBlob, p.grid, p.blur)};
    }
    return {make_phantom(PhantomKind::Circle, p.grid, p.blur), make_phantom(PhantomKind::CShape, p.grid, p.blur)};
  }
  if (!config.source || !config.target) throw ConfigError("no input: give --source and --target, or --phantom");
  for (const auto& p : {*config.source, *config.target}) {
    if (!std::filesystem::exists(p)) throw ConfigError("input file not found: " + p.string());
  }
  ScalarImage source = read_image(*config.source);
  ScalarImage target = read_image(*config.target);
  if (!(source.shape() == target.shape())) {
    throw ConfigError("source grid " + source.shape().str() + " differs from target grid " + target.shape().str());
  }
  return {std::move(source), std::move(target)};
}

std::vector<BandSummary> run_registration(const RunConfig& config, std::ostream& log) {
  auto [source, target] = load_inputs(config);
  config.validate(source.shape());
  std::filesystem::create_directories(config.out);
  write_text(config.out / "config.txt", config.echo());

  std::vector<BandSummary> summaries;
  for (int b : config.bands) {
    BandSummary s;
    s.band = b;
    s.directory = config.out / ("B" + std::to_string(b));
    std::filesystem::create_directories(s.directory);
    write_text(s.directory / "config.txt", config.echo());

    const RegistrationProblem problem(config.variant, source, target, cube_band(b, source.shape()), config.alpha,
                                      config.s, config.sigma, TimeGrid(config.nt), config.adjoint);
    const BandLimitedField v0 = config.init_noise > 0.0
                                    ? random_velocity(problem.band(), config.seed, config.init_noise)
                                    : BandLimitedField::zeros(problem.band());

    std::ofstream csv(s.directory / "convergence.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + (s.directory / "convergence.csv").string());
    csv << kConvergenceHeader << "\n" << std::flush;
    const auto start = std::chrono::steady_clock::now();
    s.result = run(problem, v0, config.optimizer, [&](const ConvergenceRow& row) {
      csv << format_row(row, config.record_time) << "\n" << std::flush;
      log << "B=" << b << " iter " << row.iteration << " energy " << number(row.energy) << " mse_rel "
          << std::setprecision(6) << row.mse_rel << "\n";
    });
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    csv.close();

    s.min_jacobian = problem.min_jacobian_determinant(s.result.report);
    s.footprint = problem.footprint(s.result.report);
    const auto& cache = *s.result.report.cache;
    write_image(s.directory / "warped.img", cache.final_image());
    write_field(s.directory / "displacement.fld", problem.recovered_displacement(s.result.report), source.spacing());
    write_velocity(s.directory / "initial_velocity.txt", s.result.v0);

    const ConvergenceRow& last = s.result.record.back();
    std::ostringstream summary;
    summary << "variant=" << to_string(config.variant) << "\n"
            << "adjoint=" << to_string(config.adjoint) << "\n"
            << "band=" << b << "\n"
            << "grid=" << source.shape().str() << "\n"
            << "iterations=" << last.iteration << "\n"
            << "stalled=" << (s.result.stalled ? "true" : "false") << "\n"
            << "energy=" << number(last.energy) << "\n"
            << "regularizer=" << number(s.result.report.regularizer) << "\n"
            << "image_term=" << number(s.result.report.image_term) << "\n"
            << "mse_rel=" << number(last.mse_rel) << "\n"
            << "grad_inf_rel=" << number(last.grad_inf_rel) << "\n"
            << "min_jacobian=" << number(s.min_jacobian) << "\n"
            << "band_coefficients=" << s.footprint.band_coefficients << "\n"
            << "grid_scalars=" << s.footprint.grid_scalars << "\n"
            << "velocity_fields=" << s.footprint.velocity_fields << "\n";
    if (config.record_time) summary << "wall_time_s=" << number(seconds) << "\n";
    write_text(s.directory / "summary.txt", summary.str());
    log << "B=" << b << " done: mse_rel " << number(last.mse_rel) << " min_jacobian " << number(s.min_jacobian)
        << (s.result.stalled ? " (line search stalled)" : "") << "\n";
    summaries.push_back(std::move(s));
  }
  return summaries;
}

std::vector<ComplexityRow> measure_complexity(const RunConfig& config) {
  auto [source, target] = load_inputs(config);
  config.validate(source.shape());
  std::vector<ComplexityRow> rows;
  for (Variant variant : {Variant::State, Variant::Deformation}) {
    for (int b : config.bands) {
      const RegistrationProblem problem(variant, source, target, cube_band(b, source.shape()), config.alpha,
                                        config.s, config.sigma, TimeGrid(config.nt), config.adjoint);
      const auto start = std::chrono::steady_clock::now();
      const GradientReport report = problem.gradient(BandLimitedField::zeros(problem.band()));
      ComplexityRow row;
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      row.variant = variant;
      row.band = b;
      row.footprint = problem.footprint(report);
      rows.push_back(row);
    }
  }
  return rows;
}

void report_complexity(const RunConfig& config, std::ostream& out) {
  out << std::left << std::setw(12) << "variant" << std::right << std::setw(6) << "band" << std::setw(20)
      << "band_coefficients" << std::setw(16) << "grid_scalars" << std::setw(16) << "velocity_fields"
      << std::setw(14) << "gradient_s" << "\n";
  for (const auto& r : measure_complexity(config)) {
    out << std::left << std::setw(12) << to_string(r.variant) << std::right << std::setw(6) << r.band
        << std::setw(20) << r.footprint.band_coefficients << std::setw(16) << r.footprint.grid_scalars
        << std::setw(16) << r.footprint.velocity_fields << std::setw(14) << std::fixed << std::setprecision(4)
        << r.seconds << "\n";
    out.unsetf(std::ios::fixed);
  }
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> config;
  try {
    std::string help;
    config = parse_config(args, process_environment(), &help);
    if (!config) {
      out << help;
      return 0;
    }
    if (config->complexity_report) {
      report_complexity(*config, out);
    } else {
      run_registration(*config, out);
    }
  } catch (const ConfigError& e) {
    err << "geoshoot: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalBlowup& e) {
    err << "geoshoot: numerical blow-up: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "geoshoot: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace geoshoot::cli
