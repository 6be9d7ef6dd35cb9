// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "driver.hpp"
#include "fixtures.hpp"
#include "geoshoot/image.hpp"
#include "geoshoot/lie.hpp"
#include "geoshoot/optimizer.hpp"
#include "geoshoot/phantom.hpp"
#include "geoshoot/problem.hpp"
#include "geoshoot/spectral.hpp"
#include "geoshoot/transport.hpp"

using namespace geoshoot;
using namespace geoshoot::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double energy_V(const BandLimitedField& v, const SpectralOperators& ops) { return inner_product_V(v, v, ops); }

BandLimitedField random_velocity(const FrequencyBand& band, std::mt19937_64& rng, double voxels) {
  return with_voxel_amplitude(random_field(band, rng, 1.0), voxels);
}

// |<ad_dagger(v, w), u>_V - <w, ad(v, u)>_V| relative to the larger side.
double duality_error(const FrequencyBand& band, std::mt19937_64& rng) {
  const SpectralOperators ops(band, 3.0, 2);
  const auto v = random_field(band, rng, 0.5);
  const auto w = random_field(band, rng, 0.5);
  const auto u = random_field(band, rng, 0.5);
  const double lhs = inner_product_V(ad_dagger(v, w, ops), u, ops);
  const double rhs = inner_product_V(w, ad(v, u, ops), ops);
  return rel_diff(lhs, rhs);
}

Outcome adjoint_duality() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  double worst2 = 0.0, worst3 = 0.0;
  for (int n = 0; n < 100; ++n) worst2 = std::max(worst2, duality_error(cube_band(2, 9, 16), rng));
  for (int n = 0; n < 100; ++n) worst3 = std::max(worst3, duality_error(cube_band(3, 7, 12), rng));
  const double t = seconds_since(start);
  return {worst2 <= 1e-8 && worst3 <= 1e-8 && t < 10.0,
          fmt("max rel err 2D %.2e, 3D %.2e over 100 triples each, %.1f s", worst2, worst3, t)};
}

// Largest relative deviation of <v_t, v_t>_V from its initial value.
double energy_drift(const BandLimitedField& v0, int nt, const SpectralOperators& ops) {
  const Trajectory traj = integrate_epdiff(v0, TimeGrid(nt), ops);
  const double e0 = energy_V(v0, ops);
  double drift = 0.0;
  for (const auto& v : traj.nodes) drift = std::max(drift, std::abs(energy_V(v, ops) - e0) / e0);
  return drift;
}

Outcome epdiff_conservation() {
  const auto start = std::chrono::steady_clock::now();
  const FrequencyBand band = cube_band(2, 16, 32);
  const SpectralOperators ops(band, 3.0, 2);
  std::mt19937_64 rng(202);
  double worst = 0.0, weakest_ratio = std::numeric_limits<double>::infinity();
  for (int n = 0; n < 20; ++n) {
    const auto v0 = random_velocity(band, rng, 4.0);
    const double coarse = energy_drift(v0, 20, ops);
    const double fine = energy_drift(v0, 40, ops);
    worst = std::max(worst, coarse);
    weakest_ratio = std::min(weakest_ratio, coarse / fine);
  }
  const double t = seconds_since(start);
  return {worst <= 1e-3 && weakest_ratio >= 8.0 && t < 30.0,
          fmt("max drift %.2e at nt=20, min shrink %.1fx at nt=40, %.1f s", worst, weakest_ratio, t)};
}

// Central differences along 0.5-voxel directions at v0 = 0. The Richardson
// combination 2 fd(eps/2) - fd(eps) is reported alongside: it cancels the
// first-order bias that the piecewise-bilinear objective leaves in fd(eps).
Outcome gradient_correctness() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(303);
  double worst3 = 0.0, worst4 = 0.0, extrapolated = 0.0;
  std::vector<std::pair<ScalarImage, ScalarImage>> pairs{circle_c_pair(32, 1.0), blob_pair(32)};
  for (Variant variant : {Variant::State, Variant::Deformation}) {
    for (const auto& [source, target] : pairs) {
      const RegistrationProblem p(variant, source, target, cube_band(2, 8, 32), 3.0, 2, 1.0, TimeGrid(10));
      const auto v0 = BandLimitedField::zeros(p.band());
      const auto report = p.gradient(v0);
      for (int d = 0; d < 5; ++d) {
        const auto dir = random_velocity(p.band(), rng, 0.5);
        const double analytic = inner_product_V(*report.gradient, dir, p.ops());
        const auto fd = [&](double eps) {
          return (p.evaluate(v0 + eps * dir).energy - p.evaluate(v0 - eps * dir).energy) / (2.0 * eps);
        };
        const double fd3 = fd(1e-3), fd4 = fd(1e-4);
        worst3 = std::max(worst3, rel_diff(analytic, fd3));
        worst4 = std::max(worst4, rel_diff(analytic, fd4));
        extrapolated = std::max(extrapolated, rel_diff(analytic, 2.0 * fd(5e-5) - fd4));
      }
    }
  }
  const double t = seconds_since(start);
  return {worst3 <= 1e-4 && worst4 <= 1e-4 && t < 120.0,
          fmt("max rel err %.2e at eps=1e-3, %.2e at eps=1e-4, %.2e Richardson-extrapolated "
              "(2 variants x 2 pairs x 5 dirs), %.1f s",
              worst3, worst4, extrapolated, t)};
}

Outcome gauss_newton_operator() {
  std::mt19937_64 rng(404);
  const auto [source, target] = circle_c_pair(32, 1.0);
  double worst_sym = 0.0, lowest_ratio = std::numeric_limits<double>::infinity();
  for (Variant variant : {Variant::State, Variant::Deformation}) {
    const RegistrationProblem p(variant, source, target, cube_band(2, 8, 32), 3.0, 2, 1.0, TimeGrid(10));
    const auto report = p.gradient(random_velocity(p.band(), rng, 1.0));
    std::vector<BandLimitedField> dirs, images;
    for (int n = 0; n < 20; ++n) {
      dirs.push_back(random_field(p.band(), rng, 1.0));
      images.push_back(p.gauss_newton_hvp(report, dirs.back()));
    }
    for (int n = 0; n < 20; ++n) {
      const int m = (n + 1) % 20;
      worst_sym = std::max(worst_sym, rel_diff(inner_product_V(images[n], dirs[m], p.ops()),
                                               inner_product_V(dirs[n], images[m], p.ops())));
      lowest_ratio = std::min(lowest_ratio, inner_product_V(images[n], dirs[n], p.ops()) /
                                                energy_V(dirs[n], p.ops()));
    }
  }
  return {worst_sym <= 1e-6 && lowest_ratio >= 0.999,
          fmt("max symmetry err %.2e, min <Hd,d>/<d,d> %.6f over 20 directions per variant", worst_sym,
              lowest_ratio)};
}

BandLimitedField scalar_field(const FrequencyBand& band, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  BandLimitedField f(band, 1);
  for (auto& c : f.data()) c = Complex(normal(rng), normal(rng));
  return f;
}

BandLimitedField brute_convolution(const BandLimitedField& a, const BandLimitedField& b) {
  const FrequencyBand& band = a.band();
  BandLimitedField out(band, 1);
  for (std::size_t p = 0; p < band.count(); ++p) {
    for (std::size_t q = 0; q < band.count(); ++q) {
      const auto kp = band.frequencies(p);
      const auto kq = band.frequencies(q);
      std::array<int, kMaxDims> index{0, 0, 0};
      bool inside = true;
      for (int j = 0; j < band.dims(); ++j) {
        index[j] = band.index_of(j, kp[j] + kq[j]);
        inside = inside && index[j] >= 0;
      }
      if (inside) out.at(0, band.linear(index)) += a.at(0, p) * b.at(0, q);
    }
  }
  return out;
}

// Real scalar field whose frequencies satisfy |k_j| <= reach on every axis.
BandLimitedField limited_support(const FrequencyBand& band, std::mt19937_64& rng, int reach) {
  auto f = random_field(band, rng, 0.0, 1);
  for (std::size_t n = 0; n < band.count(); ++n) {
    const auto k = band.frequencies(n);
    for (int j = 0; j < band.dims(); ++j) {
      if (std::abs(k[j]) > reach) f.at(0, n) = 0.0;
    }
  }
  return f;
}

Outcome truncated_convolution_oracles() {
  std::mt19937_64 rng(505);
  double brute = 0.0;
  const FrequencyBand small = cube_band(2, 5, 8);
  for (int n = 0; n < 10; ++n) {
    const auto a = scalar_field(small, rng);
    const auto b = scalar_field(small, rng);
    brute = std::max(brute, rel_diff(truncated_convolution(a, b), brute_convolution(a, b)));
  }
  double full = 0.0;
  const FrequencyBand whole = cube_band(2, 16, 16);
  for (int n = 0; n < 10; ++n) {
    const auto a = limited_support(whole, rng, 3);
    const auto b = limited_support(whole, rng, 4);
    const auto sa = include(a, whole.grid_sizes());
    const auto sb = include(b, whole.grid_sizes());
    SpatialVectorField product(whole.grid_sizes(), 1);
    for (std::size_t i = 0; i < product.data().size(); ++i) product.data()[i] = sa.data()[i] * sb.data()[i];
    full = std::max(full, rel_diff(project(product, whole), truncated_convolution(a, b)));
  }
  return {brute <= 1e-12 && full <= 1e-10,
          fmt("brute-force 5x5 max rel err %.2e, full-band 16x16 max rel err %.2e", brute, full)};
}

// Interpolation budget: each bilinear resampling errs by at most 1/8 of the
// largest second difference per axis; nt + 1 resamplings bound the gap.
double interpolation_budget(const ScalarImage& image, int nt) {
  const Shape& g = image.shape();
  double worst = 0.0;
  for (int j = 0; j < g[1]; ++j) {
    for (int i = 0; i < g[0]; ++i) {
      const double c = image.at(i, j);
      const double dxx = image.at((i + 1) % g[0], j) - 2.0 * c + image.at((i + g[0] - 1) % g[0], j);
      const double dyy = image.at(i, (j + 1) % g[1]) - 2.0 * c + image.at(i, (j + g[1] - 1) % g[1]);
      worst = std::max(worst, std::abs(dxx) + std::abs(dyy));
    }
  }
  return (nt + 1) * worst / 8.0;
}

Outcome variant_cross_check() {
  std::mt19937_64 rng(606);
  const auto [source, target] = blob_pair(32);
  const FrequencyBand band = cube_band(2, 8, 32);
  double gradient_gap = 0.0;
  for (const auto& [s, t] : {std::pair{source, target}, circle_c_pair(32, 1.0)}) {
    const RegistrationProblem state(Variant::State, s, t, band, 3.0, 2, 1.0, TimeGrid(20));
    const RegistrationProblem deformation(Variant::Deformation, s, t, band, 3.0, 2, 1.0, TimeGrid(20));
    const auto zero = BandLimitedField::zeros(band);
    gradient_gap = std::max(gradient_gap, rel_diff(*state.gradient(zero).gradient, *deformation.gradient(zero).gradient));
  }

  const RegistrationProblem state(Variant::State, source, target, band, 3.0, 2, 1.0, TimeGrid(20));
  const RegistrationProblem deformation(Variant::Deformation, source, target, band, 3.0, 2, 1.0, TimeGrid(20));
  const double budget = interpolation_budget(source, 20);
  double worst_ratio = 0.0, worst_rel_mse = 0.0;
  for (int n = 0; n < 3; ++n) {
    const auto v0 = random_velocity(band, rng, 1.5);
    const ScalarImage a = state.evaluate(v0).cache->final_image();
    const ScalarImage b = deformation.evaluate(v0).cache->final_image();
    double gap = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
    worst_ratio = std::max(worst_ratio, gap / budget);
    worst_rel_mse = std::max(worst_rel_mse, mse(a, b) / mse(a, ScalarImage(a.shape())));
  }
  return {gradient_gap <= 1e-10 && worst_ratio <= 1.0 && worst_rel_mse <= 1e-2,
          fmt("gradient gap at v0=0 %.2e; max |m1 state - m1 deformation| is %.2f of the interpolation "
              "budget %.3g, relative MSE %.2e",
              gradient_gap, worst_ratio, budget, worst_rel_mse)};
}

RunResult desk_run(int b) {
  const auto [source, target] = circle_c_pair(64, 1.0);
  const RegistrationProblem p(Variant::State, source, target, cube_band(2, b, 64), 3.0, 2, 1.0, TimeGrid(10));
  OptimizerConfig config;
  config.max_outer_iterations = 10;
  return run(p, BandLimitedField::zeros(p.band()), config);
}

Outcome desk_registration() {
  const auto start = std::chrono::steady_clock::now();
  const auto [source, target] = circle_c_pair(64, 1.0);
  const RegistrationProblem p(Variant::State, source, target, cube_band(2, 16, 64), 3.0, 2, 1.0, TimeGrid(10));
  OptimizerConfig config;
  config.max_outer_iterations = 10;
  const RunResult r = run(p, BandLimitedField::zeros(p.band()), config);
  const double t = seconds_since(start);
  bool decreasing = true;
  for (std::size_t n = 1; n < r.record.size(); ++n) decreasing = decreasing && r.record[n].energy < r.record[n - 1].energy;
  const double mse_rel = r.record.back().mse_rel;
  const double min_jac = p.min_jacobian_determinant(r.report);
  return {mse_rel <= 30.0 && decreasing && min_jac > 0.0 && t < 180.0,
          fmt("MSE_rel %.2f%% after %d iterations, energy %s, min det J %.4f, %.1f s", mse_rel,
              r.record.back().iteration, decreasing ? "strictly decreasing" : "NOT decreasing", min_jac, t)};
}

Outcome band_trend() {
  const double coarse = desk_run(8).record.back().mse_rel;
  const double fine = desk_run(32).record.back().mse_rel;
  return {fine < coarse, fmt("MSE_rel %.2f%% at B=32 vs %.2f%% at B=8", fine, coarse)};
}

Outcome complexity_scaling() {
  cli::RunConfig config;
  config.phantom = cli::PhantomSpec::parse("circle-c:64x64:1.0");
  config.bands = {8, 16, 32};
  const auto rows = cli::measure_complexity(config);
  bool exact = true, ordered = true;
  std::ostringstream detail;
  for (Variant variant : {Variant::State, Variant::Deformation}) {
    std::vector<std::size_t> counts;
    for (const auto& r : rows) {
      if (r.variant == variant) counts.push_back(r.footprint.band_coefficients);
    }
    for (std::size_t n = 1; n < counts.size(); ++n) exact = exact && counts[n] == 4 * counts[n - 1];
    detail << to_string(variant) << " coefficients";
    for (auto c : counts) detail << " " << c;
    detail << "; ";
  }
  for (const auto& s : rows) {
    for (const auto& d : rows) {
      if (s.variant == Variant::State && d.variant == Variant::Deformation && s.band == d.band) {
        ordered = ordered && d.footprint.grid_scalars < s.footprint.grid_scalars;
        if (s.band == 16) {
          detail << "grid scalars at B=16 state " << s.footprint.grid_scalars << " vs deformation "
                 << d.footprint.grid_scalars;
        }
      }
    }
  }
  return {exact && ordered, detail.str()};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const auto root = std::filesystem::temp_directory_path() / "geoshoot_acceptance_determinism";
  std::filesystem::remove_all(root);
  std::ostringstream log, err;
  bool ok = true;
  bool identical = true;
  for (const std::string variant : {"state", "deformation"}) {
    std::vector<std::string> csv;
    for (const std::string run : {"a", "b"}) {
      const auto out = root / (variant + "_" + run);
      const int rc = cli::main_entry({"--phantom", "circle-c:32x32:1.0", "--variant", variant, "--bands", "8",
                                      "--iters", "4", "--out", out.string()},
                                     log, err);
      ok = ok && rc == 0;
      csv.push_back(slurp(out / "B8" / "convergence.csv"));
    }
    identical = identical && !csv[0].empty() && csv[0] == csv[1];
  }
  std::filesystem::remove_all(root);
  return {ok && identical, ok ? (identical ? "convergence.csv byte-identical across repeated runs, both variants"
                                           : "convergence.csv differs between repeated runs")
                              : "CLI run failed: " + err.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"adjoint duality", adjoint_duality},
      {"EPDiff conservation", epdiff_conservation},
      {"gradient vs finite differences", gradient_correctness},
      {"Gauss-Newton operator", gauss_newton_operator},
      {"truncated convolution oracles", truncated_convolution_oracles},
      {"variant cross-check", variant_cross_check},
      {"desk registration", desk_registration},
      {"band-size trend", band_trend},
      {"complexity scaling", complexity_scaling},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t n = 0; n < criteria.size(); ++n) {
    Outcome o;
    try {
      o = criteria[n].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", n + 1, criteria[n].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
