#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace geoshoot {

inline constexpr int kMaxDims = 3;

/// Per-axis extent of a 2D or 3D grid. Axes past dims() report size 1 so
/// loops can always run over three axes.
class Shape {
 public:
  Shape() = default;
  Shape(std::initializer_list<int> sizes);
  explicit Shape(std::span<const int> sizes);

  int dims() const noexcept { return dims_; }
  int operator[](int axis) const noexcept { return sizes_[static_cast<std::size_t>(axis)]; }
  std::size_t count() const noexcept;
  std::string str() const;

  friend bool operator==(const Shape&, const Shape&) = default;

 private:
  int dims_ = 0;
  std::array<int, kMaxDims> sizes_{1, 1, 1};
};

/// Centered truncated frequency domain: axis j keeps B_j coefficients with
/// frequencies {-floor(B_j/2), ..., ceil(B_j/2)-1}, attached to a spatial grid
/// of N_j >= B_j samples on the unit torus.
///
/// Coefficients are stored with axis 0 fastest; storage index i on axis j maps
/// to frequency i - floor(B_j/2). For even B_j the lowest frequency has no
/// in-band partner; fields keep that coefficient at zero.
class FrequencyBand {
 public:
  FrequencyBand() = default;
  FrequencyBand(Shape band_sizes, Shape grid_sizes);

  int dims() const noexcept { return band_.dims(); }
  const Shape& band_sizes() const noexcept { return band_; }
  const Shape& grid_sizes() const noexcept { return grid_; }
  std::size_t count() const noexcept { return band_.count(); }

  int frequency(int axis, int index) const noexcept { return index - band_[axis] / 2; }
  /// Storage index of frequency k on an axis, or -1 when k is out of band.
  int index_of(int axis, int k) const noexcept;

  /// Frequency tuple of a linear storage index.
  std::array<int, kMaxDims> frequencies(std::size_t linear) const noexcept;
  std::size_t linear(const std::array<int, kMaxDims>& index) const noexcept;

  /// Linear index of the mirrored frequency -k, or -1 if -k is out of band.
  std::ptrdiff_t mirror(std::size_t linear) const noexcept { return mirror_->at(linear); }

  friend bool operator==(const FrequencyBand& a, const FrequencyBand& b) {
    return a.band_ == b.band_ && a.grid_ == b.grid_;
  }

 private:
  Shape band_;
  Shape grid_;
  std::shared_ptr<const std::vector<std::ptrdiff_t>> mirror_;
};

/// Smallest n' >= n whose only prime factors are 2, 3, 5 and 7.
int next_fast_length(int n);

}  // namespace geoshoot
