#pragma once

#include <array>

#include "geoshoot/field.hpp"

namespace geoshoot {

/// Position in voxel coordinates; any real value, wrapped periodically.
using VoxelPoint = std::array<double, kMaxDims>;

/// Periodic bilinear (2D) / trilinear (3D) interpolation.
double sample(const ScalarImage& image, const VoxelPoint& p);

/// Transpose of sample: adds value into the interpolation taps of p.
void scatter(ScalarImage& image, const VoxelPoint& p, double value);

/// Gradient of the periodic multilinear interpolant at p, in domain units
/// (d/dx on the unit torus). Inside a cell this is the exact interpolant
/// derivative; on a cell face along an axis the one-sided slopes are
/// averaged, which reduces to a centered difference at grid nodes.
std::array<double, kMaxDims> sample_gradient(const ScalarImage& image, const VoxelPoint& p);

/// out(x) = image(x + displacement(x)); displacement in domain units.
ScalarImage warp(const ScalarImage& image, const SpatialVectorField& displacement);

/// Centered differences with periodic wrap, in domain units.
SpatialVectorField spatial_gradient(const ScalarImage& image);

/// Mean squared difference (voxel sum divided by voxel count).
double mse(const ScalarImage& a, const ScalarImage& b);

/// Smallest Jacobian determinant of x -> x + displacement(x) over the grid,
/// using centered differences of the displacement.
double min_jacobian_determinant(const SpatialVectorField& displacement);

}  // namespace geoshoot
