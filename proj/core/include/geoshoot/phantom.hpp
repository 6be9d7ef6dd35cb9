#pragma once

#include <array>
#include <string>
#include <string_view>

#include "geoshoot/field.hpp"

namespace geoshoot {

enum class PhantomKind { Circle, CShape, GaussianBlob, OffsetBlob };

PhantomKind parse_phantom_kind(std::string_view name);
std::string to_string(PhantomKind kind);

/// Geometry of the synthetic shapes, in domain units on [0,1)^d.
struct PhantomGeometry {
  std::array<double, 3> center{0.5, 0.5, 0.5};
  double radius = 0.2;          // disk / ring outer radius
  double inner_radius = 0.1;    // C-shape hole
  double gap_half_width = 0.04; // C-shape opening, towards +x
  double blob_width = 0.1;      // Gaussian blob standard deviation
  double blob_offset = 0.06;    // OffsetBlob shift along +x
};

/// Deterministic phantom in [0,1], blurred by a periodic Gaussian of standard
/// deviation `smoothness` voxels (0 disables the blur).
ScalarImage make_phantom(PhantomKind kind, const Shape& grid, double smoothness,
                         const PhantomGeometry& geometry = {});

/// Periodic Gaussian blur with standard deviation `sigma_voxels`.
ScalarImage gaussian_blur(const ScalarImage& image, double sigma_voxels);

}  // namespace geoshoot
