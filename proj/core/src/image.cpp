#include "geoshoot/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace geoshoot {
namespace {

// Two-point stencil along one axis.
struct Taps {
  std::array<int, 2> index;
  std::array<double, 2> weight;
};

int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

Taps value_taps(double x, int n) {
  const double fl = std::floor(x);
  const double f = x - fl;
  const int i = wrap(static_cast<int>(fl), n);
  return {{i, wrap(i + 1, n)}, {1.0 - f, f}};
}

Taps slope_taps(double x, int n) {
  const double fl = std::floor(x);
  const double f = x - fl;
  const int i = wrap(static_cast<int>(fl), n);
  if (f == 0.0) return {{wrap(i - 1, n), wrap(i + 1, n)}, {-0.5, 0.5}};
  return {{i, wrap(i + 1, n)}, {-1.0, 1.0}};
}

double combine(const ScalarImage& image, const std::array<Taps, kMaxDims>& taps) {
  double s = 0.0;
  for (int c = 0; c < 2; ++c) {
    const double wc = taps[2].weight[static_cast<std::size_t>(c)];
    if (wc == 0.0) continue;
    for (int b = 0; b < 2; ++b) {
      const double wb = taps[1].weight[static_cast<std::size_t>(b)] * wc;
      if (wb == 0.0) continue;
      for (int a = 0; a < 2; ++a) {
        const double w = taps[0].weight[static_cast<std::size_t>(a)] * wb;
        if (w == 0.0) continue;
        s += w * image.at(taps[0].index[static_cast<std::size_t>(a)],
                          taps[1].index[static_cast<std::size_t>(b)],
                          taps[2].index[static_cast<std::size_t>(c)]);
      }
    }
  }
  return s;
}

void require_same_grid(const Shape& a, const Shape& b, const char* op) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(op) + ": grid mismatch " + a.str() + " vs " + b.str());
  }
}

}  // namespace

double sample(const ScalarImage& image, const VoxelPoint& p) {
  std::array<Taps, kMaxDims> taps;
  for (int a = 0; a < kMaxDims; ++a) {
    const auto sa = static_cast<std::size_t>(a);
    taps[sa] = a < image.dims() ? value_taps(p[sa], image.shape()[a]) : Taps{{0, 0}, {1.0, 0.0}};
  }
  return combine(image, taps);
}

void scatter(ScalarImage& image, const VoxelPoint& p, double value) {
  std::array<Taps, kMaxDims> taps;
  for (int a = 0; a < kMaxDims; ++a) {
    const auto sa = static_cast<std::size_t>(a);
    taps[sa] = a < image.dims() ? value_taps(p[sa], image.shape()[a]) : Taps{{0, 0}, {1.0, 0.0}};
  }
  for (int c = 0; c < 2; ++c) {
    const double wc = taps[2].weight[static_cast<std::size_t>(c)] * value;
    for (int b = 0; b < 2; ++b) {
      const double wb = taps[1].weight[static_cast<std::size_t>(b)] * wc;
      for (int a = 0; a < 2; ++a) {
        const double w = taps[0].weight[static_cast<std::size_t>(a)] * wb;
        if (w == 0.0) continue;
        image.at(taps[0].index[static_cast<std::size_t>(a)], taps[1].index[static_cast<std::size_t>(b)],
                 taps[2].index[static_cast<std::size_t>(c)]) += w;
      }
    }
  }
}

std::array<double, kMaxDims> sample_gradient(const ScalarImage& image, const VoxelPoint& p) {
  std::array<Taps, kMaxDims> values;
  for (int a = 0; a < kMaxDims; ++a) {
    const auto sa = static_cast<std::size_t>(a);
    values[sa] = a < image.dims() ? value_taps(p[sa], image.shape()[a]) : Taps{{0, 0}, {1.0, 0.0}};
  }
  std::array<double, kMaxDims> g{0.0, 0.0, 0.0};
  for (int j = 0; j < image.dims(); ++j) {
    auto taps = values;
    const auto sj = static_cast<std::size_t>(j);
    taps[sj] = slope_taps(p[sj], image.shape()[j]);
    g[sj] = combine(image, taps) * image.shape()[j];
  }
  return g;
}

ScalarImage warp(const ScalarImage& image, const SpatialVectorField& displacement) {
  require_same_grid(image.shape(), displacement.shape(), "warp");
  if (displacement.components() != image.dims()) {
    throw std::invalid_argument("warp: displacement must have one component per axis");
  }
  const Shape& s = image.shape();
  ScalarImage out(s);
  out.set_spacing(image.spacing());
  const int d = image.dims();
  for (int k = 0; k < s[2]; ++k) {
    for (int j = 0; j < s[1]; ++j) {
      for (int i = 0; i < s[0]; ++i) {
        const std::size_t n = image.index(i, j, k);
        VoxelPoint p{static_cast<double>(i), static_cast<double>(j), static_cast<double>(k)};
        for (int a = 0; a < d; ++a) {
          p[static_cast<std::size_t>(a)] += displacement.component(a)[n] * s[a];
        }
        out[n] = sample(image, p);
      }
    }
  }
  return out;
}

SpatialVectorField spatial_gradient(const ScalarImage& image) {
  const Shape& s = image.shape();
  const int d = image.dims();
  SpatialVectorField g(s, d);
  for (int k = 0; k < s[2]; ++k) {
    for (int j = 0; j < s[1]; ++j) {
      for (int i = 0; i < s[0]; ++i) {
        const std::size_t n = image.index(i, j, k);
        const std::array<int, kMaxDims> at{i, j, k};
        for (int a = 0; a < d; ++a) {
          auto lo = at, hi = at;
          const auto sa = static_cast<std::size_t>(a);
          lo[sa] = wrap(at[sa] - 1, s[a]);
          hi[sa] = wrap(at[sa] + 1, s[a]);
          g.component(a)[n] = 0.5 * s[a] *
                              (image.at(hi[0], hi[1], hi[2]) - image.at(lo[0], lo[1], lo[2]));
        }
      }
    }
  }
  return g;
}

double mse(const ScalarImage& a, const ScalarImage& b) {
  require_same_grid(a.shape(), b.shape(), "mse");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double r = a[i] - b[i];
    s += r * r;
  }
  return a.size() ? s / static_cast<double>(a.size()) : 0.0;
}

double min_jacobian_determinant(const SpatialVectorField& displacement) {
  const Shape& s = displacement.shape();
  const int d = s.dims();
  if (displacement.components() != d) {
    throw std::invalid_argument("min_jacobian_determinant: expected a vector field");
  }
  std::vector<SpatialVectorField> grads;
  for (int c = 0; c < d; ++c) {
    ScalarImage comp(s, std::vector<double>(displacement.component(c).begin(),
                                            displacement.component(c).end()));
    grads.push_back(spatial_gradient(comp));
  }
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < s.count(); ++n) {
    double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int c = 0; c < d; ++c) {
      for (int a = 0; a < d; ++a) m[c][a] += grads[static_cast<std::size_t>(c)].component(a)[n];
    }
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    worst = std::min(worst, det);
  }
  return worst;
}

}  // namespace geoshoot
