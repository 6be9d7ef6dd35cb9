#pragma once

// Thin FFTW wrapper shared by the spectral kernels. Plans are created once per
// (shape, direction) under a lock and executed lock-free afterwards.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "geoshoot/band.hpp"
#include "geoshoot/field.hpp"

namespace geoshoot::detail {

enum class FftDirection { Forward, Backward };

/// In-place unnormalized complex DFT over a grid stored axis-0-fastest.
/// Backward computes sum_k c(k) exp(+2 pi i k.n/N); Forward uses exp(-...).
void fft_inplace(const Shape& shape, FftDirection dir, std::span<Complex> data);

/// Maps between band coefficients and samples of the represented function on
/// a target grid at least as large as the band.
class SpectralGridMap {
 public:
  SpectralGridMap(const FrequencyBand& band, const Shape& grid);

  const Shape& grid() const noexcept { return grid_; }
  std::size_t grid_count() const noexcept { return grid_.count(); }

  /// samples(x_n) = sum_k coeffs(k) exp(2 pi i k.x_n), x_n = n / N.
  void to_samples(std::span<const Complex> coeffs, std::span<Complex> samples) const;
  /// Real part of to_samples.
  void to_real_samples(std::span<const Complex> coeffs, std::span<double> samples) const;
  /// coeffs(k) = mean_n samples(x_n) exp(-2 pi i k.x_n) for in-band k.
  void to_coefficients(std::span<const Complex> samples, std::span<Complex> coeffs) const;
  void real_to_coefficients(std::span<const double> samples, std::span<Complex> coeffs) const;

 private:
  Shape grid_;
  std::vector<std::size_t> scatter_;  // band linear index -> grid linear index
};

/// Cached map for (band, grid); safe to call concurrently.
std::shared_ptr<const SpectralGridMap> grid_map(const FrequencyBand& band, const Shape& grid);

/// Cached map onto the zero-padded product grid of a band (>= 2B-1 per axis),
/// on which pointwise products of band-limited functions are alias-free.
std::shared_ptr<const SpectralGridMap> product_map(const FrequencyBand& band);

Shape product_grid(const FrequencyBand& band);

}  // namespace geoshoot::detail
