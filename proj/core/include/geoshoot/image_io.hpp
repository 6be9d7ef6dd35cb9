#pragma once

#include <filesystem>
#include <string>

#include "geoshoot/field.hpp"

namespace geoshoot {

/// Header of the on-disk image/field format:
///
///   dims=2
///   sizes=64 64
///   components=1
///   dtype=f32
///   order=little
///   spacing=1 1
///   <blank line>
///   <payload: components x prod(sizes) little-endian float32, axis 0 fastest,
///    one full scalar payload per component>
struct ImageHeader {
  int dims = 0;
  Shape sizes;
  int components = 1;
  std::string dtype = "f32";
  std::string order = "little";
  std::array<double, kMaxDims> spacing{1.0, 1.0, 1.0};

  std::size_t payload_bytes() const { return sizes.count() * static_cast<std::size_t>(components) * 4; }
};

ImageHeader read_header(const std::filesystem::path& path);

ScalarImage read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const ScalarImage& image);

SpatialVectorField read_field(const std::filesystem::path& path);
void write_field(const std::filesystem::path& path, const SpatialVectorField& field,
                 const std::array<double, kMaxDims>& spacing = {1.0, 1.0, 1.0});

}  // namespace geoshoot
