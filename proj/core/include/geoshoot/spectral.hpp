#pragma once

#include <vector>

#include "geoshoot/band.hpp"
#include "geoshoot/field.hpp"

namespace geoshoot {

/// Per-frequency multiplier tables for the metric operator L = (Id - alpha Lap)^s,
/// its inverse K, and the spectral gradient.
///
/// Derivatives act on the unit torus: d/dx_j has symbol i 2 pi k_j. The
/// Laplacian inside L is measured in voxel units (symbol -(2 pi k_j / N_j)^2),
/// so alpha is a squared length in voxels and the same alpha behaves the same
/// on every grid resolution.
class SpectralOperators {
 public:
  SpectralOperators(FrequencyBand band, double alpha, int s);

  const FrequencyBand& band() const noexcept { return band_; }
  double alpha() const noexcept { return alpha_; }
  int s() const noexcept { return s_; }

  std::span<const double> l_multiplier() const noexcept { return l_; }
  std::span<const double> k_multiplier() const noexcept { return k_; }
  /// Angular wavenumber 2 pi k_j per in-band frequency; zero on unpaired
  /// boundary frequencies so the derivative preserves Hermitian symmetry.
  std::span<const double> wavenumber(int axis) const noexcept {
    return omega_[static_cast<std::size_t>(axis)];
  }

  /// Scalar form of the L symbol for an arbitrary frequency tuple.
  double l_symbol(const std::array<int, kMaxDims>& k) const noexcept;

 private:
  FrequencyBand band_;
  double alpha_;
  int s_;
  std::vector<double> l_;
  std::vector<double> k_;
  std::array<std::vector<double>, kMaxDims> omega_;
};

/// iota: evaluate a band-limited field on a spatial grid (zero-padded inverse DFT).
SpatialVectorField include(const BandLimitedField& f, const Shape& grid);
/// pi: in-band part of the forward DFT of a spatial field, Hermitian-symmetrized.
BandLimitedField project(const SpatialVectorField& f, const FrequencyBand& band);

BandLimitedField apply_L(const BandLimitedField& f, const SpectralOperators& ops);
BandLimitedField apply_K(const BandLimitedField& f, const SpectralOperators& ops);

/// d^2-component field; component i*d + j holds d f_i / d x_j.
BandLimitedField spectral_jacobian(const BandLimitedField& f, const SpectralOperators& ops);
/// Single-component divergence sum_j d f_j / d x_j.
BandLimitedField spectral_divergence(const BandLimitedField& f, const SpectralOperators& ops);

/// Linear convolution of two single-component coefficient grids, restricted
/// to the band. Works for arbitrary complex inputs.
BandLimitedField truncated_convolution(const BandLimitedField& a, const BandLimitedField& b);

/// l2 pairing Re sum_k <a(k), conj b(k)> over all components.
double l2_pairing(const BandLimitedField& a, const BandLimitedField& b);
/// <a, b>_V = <L a, b>_l2; equals the L2 (domain-mean) integral of L iota(a) . iota(b).
double inner_product_V(const BandLimitedField& a, const BandLimitedField& b,
                       const SpectralOperators& ops);
double norm_V(const BandLimitedField& a, const SpectralOperators& ops);

}  // namespace geoshoot
