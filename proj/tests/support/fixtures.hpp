#pragma once

#include <random>

#include "geoshoot/band.hpp"
#include "geoshoot/field.hpp"
#include "geoshoot/problem.hpp"

namespace geoshoot::testing {

FrequencyBand cube_band(int dims, int band, int grid);

/// Random Hermitian field; amplitudes decay as (1 + |k|^2)^(-decay).
BandLimitedField random_field(const FrequencyBand& band, std::mt19937_64& rng, double decay = 0.0,
                              int components = -1);

/// Relative difference |a - b| / max(|a|, |b|, floor).
double rel_diff(double a, double b, double floor = 1e-300);
double rel_diff(const BandLimitedField& a, const BandLimitedField& b);

/// Rescale a direction so its largest spatial displacement is `voxels` voxels.
BandLimitedField with_voxel_amplitude(BandLimitedField f, double voxels);

/// Blurred circle (source) and C-shape (target) on an N^2 grid.
std::pair<ScalarImage, ScalarImage> circle_c_pair(int n, double blur);
/// Two offset Gaussian blobs.
std::pair<ScalarImage, ScalarImage> blob_pair(int n);

}  // namespace geoshoot::testing
