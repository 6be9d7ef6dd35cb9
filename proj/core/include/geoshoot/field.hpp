#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "geoshoot/band.hpp"

namespace geoshoot {

using Complex = std::complex<double>;

/// Complex Fourier coefficients on a FrequencyBand, one coefficient grid per
/// component. Vector fields carry dims() components; scalar coefficient grids
/// (divergence, truncated convolution operands) carry one, and spectral
/// Jacobians carry dims()^2.
///
/// A field represents the real function sum_k c(k) exp(2 pi i k.x) when its
/// coefficients are Hermitian: c(-k) = conj(c(k)), with unpaired boundary
/// frequencies zero.
class BandLimitedField {
 public:
  BandLimitedField() = default;
  BandLimitedField(FrequencyBand band, int components);

  /// Zero vector field with dims() components.
  static BandLimitedField zeros(const FrequencyBand& band) {
    return BandLimitedField(band, band.dims());
  }

  const FrequencyBand& band() const noexcept { return band_; }
  int components() const noexcept { return components_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  std::span<Complex> component(int c) noexcept;
  std::span<const Complex> component(int c) const noexcept;
  std::span<Complex> data() noexcept { return coeffs_; }
  std::span<const Complex> data() const noexcept { return coeffs_; }

  Complex& at(int c, std::size_t k) noexcept { return coeffs_[offset(c) + k]; }
  const Complex& at(int c, std::size_t k) const noexcept { return coeffs_[offset(c) + k]; }

  BandLimitedField& operator+=(const BandLimitedField& o);
  BandLimitedField& operator-=(const BandLimitedField& o);
  BandLimitedField& operator*=(double s) noexcept;
  /// this += s * x
  BandLimitedField& axpy(double s, const BandLimitedField& x);

  friend BandLimitedField operator+(BandLimitedField a, const BandLimitedField& b) { return a += b; }
  friend BandLimitedField operator-(BandLimitedField a, const BandLimitedField& b) { return a -= b; }
  friend BandLimitedField operator*(double s, BandLimitedField a) { return a *= s; }
  friend BandLimitedField operator*(BandLimitedField a, double s) { return a *= s; }
  friend BandLimitedField operator-(BandLimitedField a) { return a *= -1.0; }

  /// Plain l2 norm of all coefficients.
  double norm() const noexcept;
  bool is_zero() const noexcept;
  bool all_finite() const noexcept;

  /// max |c(k) - conj(c(-k))| over paired frequencies, and |c(k)| over unpaired ones.
  double hermitian_defect() const noexcept;
  /// Replace c(k) by (c(k) + conj(c(-k)))/2; zero unpaired boundary frequencies.
  void symmetrize() noexcept;

  void require_compatible(const BandLimitedField& o, const char* op) const;

 private:
  std::size_t offset(int c) const noexcept {
    return static_cast<std::size_t>(c) * band_.count();
  }

  FrequencyBand band_;
  int components_ = 0;
  std::vector<Complex> coeffs_;
};

/// Real samples on a periodic grid over [0,1)^d, axis 0 fastest.
class ScalarImage {
 public:
  ScalarImage() = default;
  explicit ScalarImage(Shape shape, double fill = 0.0);
  ScalarImage(Shape shape, std::vector<double> values);

  const Shape& shape() const noexcept { return shape_; }
  int dims() const noexcept { return shape_.dims(); }
  std::size_t size() const noexcept { return values_.size(); }

  /// Physical voxel spacing; carried through I/O only.
  const std::array<double, kMaxDims>& spacing() const noexcept { return spacing_; }
  void set_spacing(const std::array<double, kMaxDims>& s) noexcept { spacing_ = s; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  double& at(int i, int j, int k = 0) noexcept { return values_[index(i, j, k)]; }
  double at(int i, int j, int k = 0) const noexcept { return values_[index(i, j, k)]; }

  std::size_t index(int i, int j, int k) const noexcept {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(shape_[0]) *
               (static_cast<std::size_t>(j) +
                static_cast<std::size_t>(shape_[1]) * static_cast<std::size_t>(k));
  }

  bool all_finite() const noexcept;

 private:
  Shape shape_;
  std::array<double, kMaxDims> spacing_{1.0, 1.0, 1.0};
  std::vector<double> values_;
};

/// Real vector samples on a periodic grid; component-major storage.
class SpatialVectorField {
 public:
  SpatialVectorField() = default;
  SpatialVectorField(Shape shape, int components);

  const Shape& shape() const noexcept { return shape_; }
  int components() const noexcept { return components_; }

  std::span<double> component(int c) noexcept;
  std::span<const double> component(int c) const noexcept;
  std::span<double> data() noexcept { return values_; }
  std::span<const double> data() const noexcept { return values_; }

  bool all_finite() const noexcept;

 private:
  Shape shape_;
  int components_ = 0;
  std::vector<double> values_;
};

}  // namespace geoshoot
