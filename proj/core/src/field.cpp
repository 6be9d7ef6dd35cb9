#include "geoshoot/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace geoshoot {

BandLimitedField::BandLimitedField(FrequencyBand band, int components)
    : band_(std::move(band)), components_(components) {
  if (components < 1) throw std::invalid_argument("BandLimitedField: components must be >= 1");
  coeffs_.assign(static_cast<std::size_t>(components) * band_.count(), Complex{});
}

std::span<Complex> BandLimitedField::component(int c) noexcept {
  return std::span<Complex>(coeffs_).subspan(offset(c), band_.count());
}

std::span<const Complex> BandLimitedField::component(int c) const noexcept {
  return std::span<const Complex>(coeffs_).subspan(offset(c), band_.count());
}

void BandLimitedField::require_compatible(const BandLimitedField& o, const char* op) const {
  if (!(band_ == o.band_)) {
    throw std::invalid_argument(std::string(op) + ": band mismatch (" +
                                band_.band_sizes().str() + " on " + band_.grid_sizes().str() +
                                " vs " + o.band_.band_sizes().str() + " on " +
                                o.band_.grid_sizes().str() + ")");
  }
  if (components_ != o.components_) {
    throw std::invalid_argument(std::string(op) + ": component count mismatch");
  }
}

BandLimitedField& BandLimitedField::operator+=(const BandLimitedField& o) {
  require_compatible(o, "operator+=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

BandLimitedField& BandLimitedField::operator-=(const BandLimitedField& o) {
  require_compatible(o, "operator-=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

BandLimitedField& BandLimitedField::operator*=(double s) noexcept {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

BandLimitedField& BandLimitedField::axpy(double s, const BandLimitedField& x) {
  require_compatible(x, "axpy");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * x.coeffs_[i];
  return *this;
}

double BandLimitedField::norm() const noexcept {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::norm(c);
  return std::sqrt(s);
}

bool BandLimitedField::is_zero() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const Complex& c) { return c == Complex{}; });
}

bool BandLimitedField::all_finite() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

double BandLimitedField::hermitian_defect() const noexcept {
  double worst = 0.0;
  const std::size_t n = band_.count();
  for (int c = 0; c < components_; ++c) {
    auto coeff = component(c);
    for (std::size_t k = 0; k < n; ++k) {
      const auto m = band_.mirror(k);
      const double d = m < 0 ? std::abs(coeff[k])
                             : std::abs(coeff[k] - std::conj(coeff[static_cast<std::size_t>(m)]));
      worst = std::max(worst, d);
    }
  }
  return worst;
}

void BandLimitedField::symmetrize() noexcept {
  const std::size_t n = band_.count();
  for (int c = 0; c < components_; ++c) {
    auto coeff = component(c);
    for (std::size_t k = 0; k < n; ++k) {
      const auto m = band_.mirror(k);
      if (m < 0) {
        coeff[k] = Complex{};
      } else if (static_cast<std::size_t>(m) > k) {
        const Complex avg = 0.5 * (coeff[k] + std::conj(coeff[static_cast<std::size_t>(m)]));
        coeff[k] = avg;
        coeff[static_cast<std::size_t>(m)] = std::conj(avg);
      } else if (static_cast<std::size_t>(m) == k) {
        coeff[k] = Complex(coeff[k].real(), 0.0);
      }
    }
  }
}

ScalarImage::ScalarImage(Shape shape, double fill)
    : shape_(shape), values_(shape.count(), fill) {}

ScalarImage::ScalarImage(Shape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  if (values_.size() != shape_.count()) {
    throw std::invalid_argument("ScalarImage: " + std::to_string(values_.size()) +
                                " values for shape " + shape_.str());
  }
}

bool ScalarImage::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

SpatialVectorField::SpatialVectorField(Shape shape, int components)
    : shape_(shape),
      components_(components),
      values_(static_cast<std::size_t>(components) * shape.count(), 0.0) {}

std::span<double> SpatialVectorField::component(int c) noexcept {
  return std::span<double>(values_).subspan(static_cast<std::size_t>(c) * shape_.count(),
                                            shape_.count());
}

std::span<const double> SpatialVectorField::component(int c) const noexcept {
  return std::span<const double>(values_).subspan(static_cast<std::size_t>(c) * shape_.count(),
                                                  shape_.count());
}

bool SpatialVectorField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace geoshoot
