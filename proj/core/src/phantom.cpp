#include "geoshoot/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fft.hpp"

namespace geoshoot {

PhantomKind parse_phantom_kind(std::string_view name) {
  if (name == "circle") return PhantomKind::Circle;
  if (name == "c-shape") return PhantomKind::CShape;
  if (name == "gaussian-blob") return PhantomKind::GaussianBlob;
  if (name == "offset-blob") return PhantomKind::OffsetBlob;
  throw std::invalid_argument("unknown phantom kind '" + std::string(name) +
                              "' (expected circle, c-shape, gaussian-blob, offset-blob)");
}

std::string to_string(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::Circle: return "circle";
    case PhantomKind::CShape: return "c-shape";
    case PhantomKind::GaussianBlob: return "gaussian-blob";
    case PhantomKind::OffsetBlob: return "offset-blob";
  }
  return "unknown";
}

ScalarImage gaussian_blur(const ScalarImage& image, double sigma_voxels) {
  if (sigma_voxels <= 0.0) return image;
  const Shape& s = image.shape();
  std::vector<Complex> work(image.values().begin(), image.values().end());
  detail::fft_inplace(s, detail::FftDirection::Forward, work);
  const double c = 2.0 * std::numbers::pi * std::numbers::pi * sigma_voxels * sigma_voxels;
  for (int k = 0; k < s[2]; ++k) {
    for (int j = 0; j < s[1]; ++j) {
      for (int i = 0; i < s[0]; ++i) {
        double q = 0.0;
        const std::array<int, 3> idx{i, j, k};
        for (int a = 0; a < s.dims(); ++a) {
          int f = idx[static_cast<std::size_t>(a)];
          if (f > s[a] / 2) f -= s[a];
          const double x = static_cast<double>(f) / s[a];
          q += x * x;
        }
        work[image.index(i, j, k)] *= std::exp(-c * q) / static_cast<double>(s.count());
      }
    }
  }
  detail::fft_inplace(s, detail::FftDirection::Backward, work);
  ScalarImage out(s);
  out.set_spacing(image.spacing());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = work[n].real();
  return out;
}

ScalarImage make_phantom(PhantomKind kind, const Shape& grid, double smoothness,
                         const PhantomGeometry& g) {
  if (grid.dims() < 2 || grid.dims() > 3) throw std::invalid_argument("make_phantom: 2D or 3D grid expected");
  ScalarImage img(grid);
  const int d = grid.dims();
  for (int k = 0; k < grid[2]; ++k) {
    for (int j = 0; j < grid[1]; ++j) {
      for (int i = 0; i < grid[0]; ++i) {
        const std::array<int, 3> idx{i, j, k};
        std::array<double, 3> x{0.0, 0.0, 0.0};
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) {
          const auto sa = static_cast<std::size_t>(a);
          x[sa] = static_cast<double>(idx[sa]) / grid[a] - g.center[sa];
          r2 += x[sa] * x[sa];
        }
        double value = 0.0;
        switch (kind) {
          case PhantomKind::Circle:
            value = r2 <= g.radius * g.radius ? 1.0 : 0.0;
            break;
          case PhantomKind::CShape: {
            const bool ring = r2 <= g.radius * g.radius && r2 > g.inner_radius * g.inner_radius;
            const bool gap = x[0] > 0.0 && std::abs(x[1]) < g.gap_half_width;
            value = ring && !gap ? 1.0 : 0.0;
            break;
          }
          case PhantomKind::GaussianBlob:
          case PhantomKind::OffsetBlob: {
            const double shift = kind == PhantomKind::OffsetBlob ? g.blob_offset : 0.0;
            const double dx = x[0] - shift;
            const double q = r2 - x[0] * x[0] + dx * dx;
            value = std::exp(-q / (2.0 * g.blob_width * g.blob_width));
            break;
          }
        }
        img.at(i, j, k) = value;
      }
    }
  }
  ScalarImage out = gaussian_blur(img, smoothness);
  for (auto& v : out.values()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

}  // namespace geoshoot
