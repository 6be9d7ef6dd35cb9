#include "geoshoot/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fft.hpp"

namespace geoshoot {

SpectralOperators::SpectralOperators(FrequencyBand band, double alpha, int s)
    : band_(std::move(band)), alpha_(alpha), s_(s) {
  if (!(alpha > 0.0)) throw std::invalid_argument("SpectralOperators: alpha must be positive");
  if (s < 1) throw std::invalid_argument("SpectralOperators: s must be a positive integer");

  const std::size_t n = band_.count();
  l_.resize(n);
  k_.resize(n);
  for (auto& w : omega_) w.assign(n, 0.0);

  for (std::size_t l = 0; l < n; ++l) {
    const auto k = band_.frequencies(l);
    l_[l] = l_symbol(k);
    k_[l] = 1.0 / l_[l];
    const bool unpaired = band_.mirror(l) < 0;
    for (int a = 0; a < band_.dims(); ++a) {
      omega_[static_cast<std::size_t>(a)][l] =
          unpaired ? 0.0 : 2.0 * std::numbers::pi * k[static_cast<std::size_t>(a)];
    }
  }
}

double SpectralOperators::l_symbol(const std::array<int, kMaxDims>& k) const noexcept {
  double w2 = 0.0;
  for (int a = 0; a < band_.dims(); ++a) {
    const double w = 2.0 * std::numbers::pi * k[static_cast<std::size_t>(a)] /
                     static_cast<double>(band_.grid_sizes()[a]);
    w2 += w * w;
  }
  return std::pow(1.0 + alpha_ * w2, s_);
}

namespace {

void require_band(const BandLimitedField& f, const FrequencyBand& band, const char* op) {
  if (!(f.band() == band)) {
    throw std::invalid_argument(std::string(op) + ": field band " + f.band().band_sizes().str() +
                                " does not match operator band " + band.band_sizes().str());
  }
}

BandLimitedField multiply(const BandLimitedField& f, std::span<const double> m) {
  BandLimitedField out = f;
  const std::size_t n = f.band().count();
  for (int c = 0; c < f.components(); ++c) {
    auto dst = out.component(c);
    for (std::size_t k = 0; k < n; ++k) dst[k] *= m[k];
  }
  return out;
}

}  // namespace

SpatialVectorField include(const BandLimitedField& f, const Shape& grid) {
  const auto map = detail::grid_map(f.band(), grid);
  SpatialVectorField out(grid, f.components());
  for (int c = 0; c < f.components(); ++c) map->to_real_samples(f.component(c), out.component(c));
  return out;
}

BandLimitedField project(const SpatialVectorField& f, const FrequencyBand& band) {
  if (!(f.shape() == band.grid_sizes())) {
    throw std::invalid_argument("project: field grid " + f.shape().str() +
                                " does not match band grid " + band.grid_sizes().str());
  }
  const auto map = detail::grid_map(band, f.shape());
  BandLimitedField out(band, f.components());
  for (int c = 0; c < f.components(); ++c) map->real_to_coefficients(f.component(c), out.component(c));
  out.symmetrize();
  return out;
}

BandLimitedField apply_L(const BandLimitedField& f, const SpectralOperators& ops) {
  require_band(f, ops.band(), "apply_L");
  return multiply(f, ops.l_multiplier());
}

BandLimitedField apply_K(const BandLimitedField& f, const SpectralOperators& ops) {
  require_band(f, ops.band(), "apply_K");
  return multiply(f, ops.k_multiplier());
}

BandLimitedField spectral_jacobian(const BandLimitedField& f, const SpectralOperators& ops) {
  require_band(f, ops.band(), "spectral_jacobian");
  const int d = ops.band().dims();
  const std::size_t n = ops.band().count();
  BandLimitedField out(ops.band(), f.components() * d);
  for (int i = 0; i < f.components(); ++i) {
    auto src = f.component(i);
    for (int j = 0; j < d; ++j) {
      auto dst = out.component(i * d + j);
      auto w = ops.wavenumber(j);
      for (std::size_t k = 0; k < n; ++k) dst[k] = Complex(0.0, w[k]) * src[k];
    }
  }
  return out;
}

BandLimitedField spectral_divergence(const BandLimitedField& f, const SpectralOperators& ops) {
  require_band(f, ops.band(), "spectral_divergence");
  const int d = ops.band().dims();
  if (f.components() != d) {
    throw std::invalid_argument("spectral_divergence: expected a vector field");
  }
  const std::size_t n = ops.band().count();
  BandLimitedField out(ops.band(), 1);
  auto dst = out.component(0);
  for (int j = 0; j < d; ++j) {
    auto src = f.component(j);
    auto w = ops.wavenumber(j);
    for (std::size_t k = 0; k < n; ++k) dst[k] += Complex(0.0, w[k]) * src[k];
  }
  return out;
}

BandLimitedField truncated_convolution(const BandLimitedField& a, const BandLimitedField& b) {
  a.require_compatible(b, "truncated_convolution");
  if (a.components() != 1) {
    throw std::invalid_argument("truncated_convolution: expects single-component coefficient grids");
  }
  const auto map = detail::product_map(a.band());
  std::vector<Complex> sa(map->grid_count()), sb(map->grid_count());
  map->to_samples(a.component(0), sa);
  map->to_samples(b.component(0), sb);
  for (std::size_t i = 0; i < sa.size(); ++i) sa[i] *= sb[i];
  BandLimitedField out(a.band(), 1);
  map->to_coefficients(sa, out.component(0));
  return out;
}

double l2_pairing(const BandLimitedField& a, const BandLimitedField& b) {
  a.require_compatible(b, "l2_pairing");
  double s = 0.0;
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
  }
  return s;
}

double inner_product_V(const BandLimitedField& a, const BandLimitedField& b,
                       const SpectralOperators& ops) {
  require_band(a, ops.band(), "inner_product_V");
  a.require_compatible(b, "inner_product_V");
  const auto l = ops.l_multiplier();
  const std::size_t n = ops.band().count();
  double s = 0.0;
  for (int c = 0; c < a.components(); ++c) {
    auto x = a.component(c);
    auto y = b.component(c);
    for (std::size_t k = 0; k < n; ++k) {
      s += l[k] * (x[k].real() * y[k].real() + x[k].imag() * y[k].imag());
    }
  }
  return s;
}

double norm_V(const BandLimitedField& a, const SpectralOperators& ops) {
  return std::sqrt(std::max(0.0, inner_product_V(a, a, ops)));
}

}  // namespace geoshoot
