#include "geoshoot/band.hpp"

#include <stdexcept>

namespace geoshoot {

Shape::Shape(std::initializer_list<int> sizes)
    : Shape(std::span<const int>(sizes.begin(), sizes.size())) {}

Shape::Shape(std::span<const int> sizes) {
  if (sizes.empty() || sizes.size() > static_cast<std::size_t>(kMaxDims)) {
    throw std::invalid_argument("Shape: expected 1 to 3 axes, got " +
                                std::to_string(sizes.size()));
  }
  dims_ = static_cast<int>(sizes.size());
  for (std::size_t a = 0; a < sizes.size(); ++a) {
    if (sizes[a] < 1) throw std::invalid_argument("Shape: axis sizes must be positive");
    sizes_[a] = sizes[a];
  }
}

std::size_t Shape::count() const noexcept {
  if (dims_ == 0) return 0;
  return static_cast<std::size_t>(sizes_[0]) * static_cast<std::size_t>(sizes_[1]) *
         static_cast<std::size_t>(sizes_[2]);
}

std::string Shape::str() const {
  std::string s;
  for (int a = 0; a < dims_; ++a) {
    if (a) s += 'x';
    s += std::to_string(sizes_[static_cast<std::size_t>(a)]);
  }
  return s;
}

FrequencyBand::FrequencyBand(Shape band_sizes, Shape grid_sizes)
    : band_(band_sizes), grid_(grid_sizes) {
  if (band_.dims() < 2 || band_.dims() > 3) {
    throw std::invalid_argument("FrequencyBand: dimension must be 2 or 3");
  }
  if (band_.dims() != grid_.dims()) {
    throw std::invalid_argument("FrequencyBand: band " + band_.str() + " and grid " +
                                grid_.str() + " differ in dimension");
  }
  for (int a = 0; a < band_.dims(); ++a) {
    if (band_[a] > grid_[a]) {
      throw std::invalid_argument("FrequencyBand: band " + band_.str() +
                                  " exceeds grid " + grid_.str());
    }
  }

  auto table = std::make_shared<std::vector<std::ptrdiff_t>>(count());
  for (std::size_t l = 0; l < count(); ++l) {
    auto k = frequencies(l);
    std::array<int, kMaxDims> idx{};
    bool inside = true;
    for (int a = 0; a < kMaxDims; ++a) {
      idx[static_cast<std::size_t>(a)] = index_of(a, -k[static_cast<std::size_t>(a)]);
      if (idx[static_cast<std::size_t>(a)] < 0) inside = false;
    }
    (*table)[l] = inside ? static_cast<std::ptrdiff_t>(linear(idx)) : -1;
  }
  mirror_ = std::move(table);
}

int FrequencyBand::index_of(int axis, int k) const noexcept {
  const int b = band_[axis];
  const int i = k + b / 2;
  return (i >= 0 && i < b) ? i : -1;
}

std::array<int, kMaxDims> FrequencyBand::frequencies(std::size_t linear) const noexcept {
  std::array<int, kMaxDims> k{};
  for (int a = 0; a < kMaxDims; ++a) {
    const auto b = static_cast<std::size_t>(band_[a]);
    k[static_cast<std::size_t>(a)] = frequency(a, static_cast<int>(linear % b));
    linear /= b;
  }
  return k;
}

std::size_t FrequencyBand::linear(const std::array<int, kMaxDims>& index) const noexcept {
  return static_cast<std::size_t>(index[0]) +
         static_cast<std::size_t>(band_[0]) *
             (static_cast<std::size_t>(index[1]) +
              static_cast<std::size_t>(band_[1]) * static_cast<std::size_t>(index[2]));
}

int next_fast_length(int n) {
  if (n <= 1) return 1;
  for (int m = n;; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

}  // namespace geoshoot
