#include "fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "geoshoot/phantom.hpp"
#include "geoshoot/spectral.hpp"

namespace geoshoot::testing {

FrequencyBand cube_band(int dims, int band, int grid) {
  if (dims == 2) return FrequencyBand(Shape{band, band}, Shape{grid, grid});
  return FrequencyBand(Shape{band, band, band}, Shape{grid, grid, grid});
}

BandLimitedField random_field(const FrequencyBand& band, std::mt19937_64& rng, double decay,
                              int components) {
  std::normal_distribution<double> normal;
  BandLimitedField f(band, components < 0 ? band.dims() : components);
  for (int c = 0; c < f.components(); ++c) {
    for (std::size_t n = 0; n < band.count(); ++n) {
      const auto k = band.frequencies(n);
      double k2 = 0.0;
      for (int a = 0; a < band.dims(); ++a) k2 += double(k[a]) * k[a];
      const double amp = std::pow(1.0 + k2, -decay);
      f.at(c, n) = amp * Complex(normal(rng), normal(rng));
    }
  }
  f.symmetrize();
  return f;
}

double rel_diff(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

double rel_diff(const BandLimitedField& a, const BandLimitedField& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

BandLimitedField with_voxel_amplitude(BandLimitedField f, double voxels) {
  const auto s = include(f, f.band().grid_sizes());
  double peak = 0.0;
  for (int a = 0; a < s.components(); ++a) {
    const double n = f.band().grid_sizes()[a];
    for (double x : s.component(a)) peak = std::max(peak, std::abs(x) * n);
  }
  if (peak > 0.0) f *= voxels / peak;
  return f;
}

std::pair<ScalarImage, ScalarImage> circle_c_pair(int n, double blur) {
  const Shape grid{n, n};
  return {make_phantom(PhantomKind::Circle, grid, blur), make_phantom(PhantomKind::CShape, grid, blur)};
}

std::pair<ScalarImage, ScalarImage> blob_pair(int n) {
  const Shape grid{n, n};
  return {make_phantom(PhantomKind::GaussianBlob, grid, 0.0),
          make_phantom(PhantomKind::OffsetBlob, grid, 0.0)};
}

}  // namespace geoshoot::testing
