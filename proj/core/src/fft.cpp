#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace geoshoot::detail {
namespace {

struct PlanKey {
  int dims;
  std::array<int, kMaxDims> sizes;
  int sign;
  auto tie() const { return std::tie(dims, sizes, sign); }
  bool operator<(const PlanKey& o) const { return tie() < o.tie(); }
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const Shape& shape, int sign) {
    PlanKey key{shape.dims(), {shape[0], shape[1], shape[2]}, sign};
    std::lock_guard lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    // FFTW is row-major (last index fastest); our storage is axis-0 fastest.
    std::array<int, kMaxDims> n{};
    for (int a = 0; a < shape.dims(); ++a) n[static_cast<std::size_t>(a)] = shape[shape.dims() - 1 - a];
    std::vector<fftw_complex> scratch(shape.count());
    fftw_plan plan = fftw_plan_dft(shape.dims(), n.data(), scratch.data(), scratch.data(), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw std::runtime_error("fftw_plan_dft failed for shape " + shape.str());
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

std::size_t wrap(int k, int n) {
  return static_cast<std::size_t>(((k % n) + n) % n);
}

}  // namespace

void fft_inplace(const Shape& shape, FftDirection dir, std::span<Complex> data) {
  if (data.size() != shape.count()) throw std::invalid_argument("fft_inplace: size mismatch");
  fftw_plan plan = plan_cache().get(shape, dir == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

SpectralGridMap::SpectralGridMap(const FrequencyBand& band, const Shape& grid) : grid_(grid) {
  if (grid.dims() != band.dims()) {
    throw std::invalid_argument("grid " + grid.str() + " does not match band dimension");
  }
  for (int a = 0; a < grid.dims(); ++a) {
    if (grid[a] < band.band_sizes()[a]) {
      throw std::invalid_argument("grid " + grid.str() + " is smaller than band " +
                                  band.band_sizes().str());
    }
  }
  scatter_.resize(band.count());
  for (std::size_t l = 0; l < band.count(); ++l) {
    const auto k = band.frequencies(l);
    scatter_[l] = wrap(k[0], grid[0]) +
                  static_cast<std::size_t>(grid[0]) *
                      (wrap(k[1], grid[1]) + static_cast<std::size_t>(grid[1]) * wrap(k[2], grid[2]));
  }
}

void SpectralGridMap::to_samples(std::span<const Complex> coeffs, std::span<Complex> samples) const {
  std::fill(samples.begin(), samples.end(), Complex{});
  for (std::size_t l = 0; l < scatter_.size(); ++l) samples[scatter_[l]] = coeffs[l];
  fft_inplace(grid_, FftDirection::Backward, samples);
}

void SpectralGridMap::to_real_samples(std::span<const Complex> coeffs, std::span<double> samples) const {
  std::vector<Complex> work(grid_.count());
  to_samples(coeffs, work);
  for (std::size_t i = 0; i < work.size(); ++i) samples[i] = work[i].real();
}

void SpectralGridMap::to_coefficients(std::span<const Complex> samples, std::span<Complex> coeffs) const {
  std::vector<Complex> work(samples.begin(), samples.end());
  fft_inplace(grid_, FftDirection::Forward, work);
  const double scale = 1.0 / static_cast<double>(grid_.count());
  for (std::size_t l = 0; l < scatter_.size(); ++l) coeffs[l] = work[scatter_[l]] * scale;
}

void SpectralGridMap::real_to_coefficients(std::span<const double> samples, std::span<Complex> coeffs) const {
  std::vector<Complex> work(samples.begin(), samples.end());
  fft_inplace(grid_, FftDirection::Forward, work);
  const double scale = 1.0 / static_cast<double>(grid_.count());
  for (std::size_t l = 0; l < scatter_.size(); ++l) coeffs[l] = work[scatter_[l]] * scale;
}

Shape product_grid(const FrequencyBand& band) {
  std::array<int, kMaxDims> p{};
  for (int a = 0; a < band.dims(); ++a) {
    p[static_cast<std::size_t>(a)] = next_fast_length(2 * band.band_sizes()[a] - 1);
  }
  return Shape(std::span<const int>(p.data(), static_cast<std::size_t>(band.dims())));
}

namespace {

struct MapKey {
  std::array<int, kMaxDims> band;
  std::array<int, kMaxDims> grid;
  int dims;
  auto tie() const { return std::tie(dims, band, grid); }
  bool operator<(const MapKey& o) const { return tie() < o.tie(); }
};

std::shared_ptr<const SpectralGridMap> cached_map(const FrequencyBand& band, const Shape& grid) {
  static std::mutex mutex;
  static std::map<MapKey, std::shared_ptr<const SpectralGridMap>> maps;
  const auto& b = band.band_sizes();
  MapKey key{{b[0], b[1], b[2]}, {grid[0], grid[1], grid[2]}, band.dims()};
  {
    std::lock_guard lock(mutex);
    auto it = maps.find(key);
    if (it != maps.end()) return it->second;
  }
  auto map = std::make_shared<const SpectralGridMap>(band, grid);
  std::lock_guard lock(mutex);
  return maps.emplace(key, std::move(map)).first->second;
}

}  // namespace

std::shared_ptr<const SpectralGridMap> grid_map(const FrequencyBand& band, const Shape& grid) {
  return cached_map(band, grid);
}

std::shared_ptr<const SpectralGridMap> product_map(const FrequencyBand& band) {
  return cached_map(band, product_grid(band));
}

}  // namespace geoshoot::detail
