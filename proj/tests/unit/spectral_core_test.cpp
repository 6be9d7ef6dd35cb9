#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "geoshoot/band.hpp"
#include "geoshoot/spectral.hpp"

namespace geoshoot {
namespace {

using testing::cube_band;
using testing::random_field;
using testing::rel_diff;

constexpr double kPi = std::numbers::pi;

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

BandLimitedField scalar_noise(const FrequencyBand& band, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  BandLimitedField f(band, 1);
  for (auto& c : f.data()) c = Complex(normal(rng), normal(rng));
  return f;
}

TEST(FrequencyBand, CenteredIndexSet) {
  const FrequencyBand even(Shape{4, 5}, Shape{8, 8});
  EXPECT_EQ(even.frequency(0, 0), -2);
  EXPECT_EQ(even.frequency(0, 3), 1);
  EXPECT_EQ(even.frequency(1, 0), -2);
  EXPECT_EQ(even.frequency(1, 4), 2);
  EXPECT_EQ(even.index_of(0, 2), -1);
  EXPECT_EQ(even.index_of(1, 2), 4);
  EXPECT_EQ(even.count(), 20u);
}

TEST(FrequencyBand, MirrorOfUnpairedFrequencyIsAbsent) {
  const FrequencyBand band(Shape{4, 4}, Shape{8, 8});
  const std::size_t lowest = band.linear({0, 2, 0});  // k = (-2, 0)
  EXPECT_EQ(band.mirror(lowest), -1);
  const std::size_t k = band.linear({3, 1, 0});  // k = (1, -1)
  EXPECT_EQ(band.frequencies(static_cast<std::size_t>(band.mirror(k)))[0], -1);
  EXPECT_EQ(band.frequencies(static_cast<std::size_t>(band.mirror(k)))[1], 1);
}

TEST(FrequencyBand, RejectsBandLargerThanGrid) {
  EXPECT_THROW(FrequencyBand(Shape{10, 4}, Shape{8, 8}), std::invalid_argument);
  EXPECT_THROW(FrequencyBand(Shape{4, 4}, Shape{8, 8, 8}), std::invalid_argument);
}

TEST(FrequencyBand, NextFastLength) {
  EXPECT_EQ(next_fast_length(11), 12);
  EXPECT_EQ(next_fast_length(13), 14);
  EXPECT_EQ(next_fast_length(17), 18);
  EXPECT_EQ(next_fast_length(64), 64);
}

TEST(Include, ZeroCoefficientsGiveZeroField) {
  const auto s = include(BandLimitedField::zeros(cube_band(2, 5, 8)), Shape{8, 8});
  EXPECT_EQ(max_abs(s.data()), 0.0);
}

TEST(Include, DcCoefficientIsConstant) {
  const FrequencyBand band = cube_band(2, 5, 8);
  BandLimitedField f = BandLimitedField::zeros(band);
  f.at(1, band.linear({2, 2, 0})) = 0.75;
  const auto s = include(f, Shape{8, 8});
  for (double x : s.component(1)) EXPECT_NEAR(x, 0.75, 1e-15);
  EXPECT_EQ(max_abs(s.component(0)), 0.0);
}

TEST(Include, HermitianPairMatchesTrigonometricSum) {
  const FrequencyBand band = cube_band(2, 5, 12);
  const double a = 0.8, b = -1.3;
  BandLimitedField f = BandLimitedField::zeros(band);
  f.at(0, band.linear({3, 2, 0})) = Complex(a / 2, -b / 2);
  f.at(0, band.linear({1, 2, 0})) = Complex(a / 2, b / 2);
  const auto s = include(f, Shape{12, 12});
  for (int j = 0; j < 12; ++j) {
    for (int i = 0; i < 12; ++i) {
      const double x = i / 12.0;
      EXPECT_NEAR(s.component(0)[i + 12 * j], a * std::cos(2 * kPi * x) + b * std::sin(2 * kPi * x), 1e-14);
    }
  }
}

TEST(Include, RejectsGridSmallerThanBand) {
  EXPECT_THROW(include(BandLimitedField::zeros(cube_band(2, 8, 8)), Shape{6, 6}), std::invalid_argument);
}

TEST(Project, InvertsInclude) {
  std::mt19937_64 rng(1);
  for (int dims : {2, 3}) {
    const FrequencyBand band = cube_band(dims, 6, 10);
    const auto f = random_field(band, rng);
    EXPECT_LT(rel_diff(project(include(f, band.grid_sizes()), band), f), 1e-12);
  }
}

TEST(Project, ConstantFieldGivesDcOnly) {
  const FrequencyBand band = cube_band(2, 5, 8);
  SpatialVectorField s(Shape{8, 8}, 2);
  for (double& x : s.component(0)) x = 2.5;
  const auto f = project(s, band);
  const std::size_t dc = band.linear({2, 2, 0});
  EXPECT_NEAR(f.at(0, dc).real(), 2.5, 1e-15);
  double others = 0.0;
  for (int c = 0; c < 2; ++c) {
    for (std::size_t k = 0; k < band.count(); ++k) {
      if (c == 0 && k == dc) continue;
      others = std::max(others, std::abs(f.at(c, k)));
    }
  }
  EXPECT_LT(others, 1e-15);
}

TEST(Project, OutOfBandCosineVanishes) {
  const FrequencyBand band = cube_band(2, 6, 16);
  SpatialVectorField s(Shape{16, 16}, 2);
  for (int j = 0; j < 16; ++j) {
    for (int i = 0; i < 16; ++i) s.component(0)[i + 16 * j] = std::cos(2 * kPi * 6 * i / 16.0);
  }
  EXPECT_LT(project(s, band).norm(), 1e-14);
}

TEST(Project, RejectsGridMismatch) {
  EXPECT_THROW(project(SpatialVectorField(Shape{8, 10}, 2), cube_band(2, 5, 8)), std::invalid_argument);
}

TEST(Project, IsAdjointOfIncludeUnderMeanPairing) {
  std::mt19937_64 rng(2);
  const FrequencyBand band = cube_band(2, 7, 12);
  const auto f = random_field(band, rng);
  SpatialVectorField g(band.grid_sizes(), 2);
  std::normal_distribution<double> normal;
  for (double& x : g.data()) x = normal(rng);
  const auto s = include(f, band.grid_sizes());
  double spatial = 0.0;
  for (std::size_t n = 0; n < g.data().size(); ++n) spatial += g.data()[n] * s.data()[n];
  spatial /= static_cast<double>(band.grid_sizes().count());
  EXPECT_LT(rel_diff(l2_pairing(project(g, band), f), spatial), 1e-9);
}

TEST(SpectralOperators, MultiplierInvariants) {
  const SpectralOperators ops(cube_band(2, 8, 16), 2.0, 3);
  const auto l = ops.l_multiplier();
  const auto k = ops.k_multiplier();
  EXPECT_EQ(l[ops.band().linear({4, 4, 0})], 1.0);
  for (std::size_t n = 0; n < l.size(); ++n) {
    EXPECT_GE(l[n], 1.0);
    EXPECT_NEAR(l[n] * k[n], 1.0, 1e-15);
  }
}

TEST(SpectralOperators, WavenumberIsOddAndZeroOnUnpairedFrequencies) {
  const SpectralOperators ops(cube_band(2, 8, 16), 1.0, 2);
  const auto& band = ops.band();
  for (std::size_t n = 0; n < band.count(); ++n) {
    const auto m = band.mirror(n);
    for (int a = 0; a < 2; ++a) {
      if (m < 0) {
        EXPECT_EQ(ops.wavenumber(a)[n], 0.0);
      } else {
        EXPECT_EQ(ops.wavenumber(a)[n], -ops.wavenumber(a)[static_cast<std::size_t>(m)]);
      }
    }
  }
}

TEST(ApplyL, SingleFrequencyMatchesScalarSymbol) {
  const FrequencyBand band = cube_band(2, 8, 20);
  const SpectralOperators ops(band, 1.0, 2);
  BandLimitedField f = BandLimitedField::zeros(band);
  const std::size_t k = band.linear({6, 1, 0});  // k = (2, -3)
  f.at(0, k) = Complex(0.3, -0.2);
  const double w2 = std::pow(2 * kPi * 2 / 20.0, 2) + std::pow(2 * kPi * 3 / 20.0, 2);
  const double expected = (1 + w2) * (1 + w2);
  EXPECT_NEAR(std::abs(apply_L(f, ops).at(0, k)) / std::abs(f.at(0, k)), expected, 1e-12 * expected);
}

TEST(ApplyL, DcIsUnchangedAndKInvertsL) {
  std::mt19937_64 rng(3);
  const FrequencyBand band = cube_band(3, 6, 8);
  const SpectralOperators ops(band, 4.0, 2);
  BandLimitedField dc = BandLimitedField::zeros(band);
  dc.at(2, band.linear({3, 3, 3})) = 1.5;
  EXPECT_EQ(rel_diff(apply_L(dc, ops), dc), 0.0);
  EXPECT_EQ(rel_diff(apply_K(dc, ops), dc), 0.0);
  const auto f = random_field(band, rng);
  EXPECT_LT(rel_diff(apply_K(apply_L(f, ops), ops), f), 1e-14);
}

TEST(ApplyL, RejectsBandMismatch) {
  const SpectralOperators ops(cube_band(2, 8, 16), 1.0, 2);
  EXPECT_THROW(apply_L(BandLimitedField::zeros(cube_band(2, 6, 16)), ops), std::invalid_argument);
}

TEST(SpectralJacobian, ConstantFieldHasZeroDerivatives) {
  const FrequencyBand band = cube_band(2, 5, 8);
  const SpectralOperators ops(band, 1.0, 2);
  BandLimitedField f = BandLimitedField::zeros(band);
  f.at(0, band.linear({2, 2, 0})) = 1.0;
  f.at(1, band.linear({2, 2, 0})) = -2.0;
  EXPECT_TRUE(spectral_jacobian(f, ops).is_zero());
  EXPECT_TRUE(spectral_divergence(f, ops).is_zero());
}

TEST(SpectralJacobian, DivergenceIsTrace) {
  std::mt19937_64 rng(4);
  const FrequencyBand band = cube_band(3, 5, 8);
  const SpectralOperators ops(band, 1.0, 2);
  const auto f = random_field(band, rng);
  const auto J = spectral_jacobian(f, ops);
  ASSERT_EQ(J.components(), 9);
  BandLimitedField trace(band, 1);
  for (int a = 0; a < 3; ++a) {
    for (std::size_t k = 0; k < band.count(); ++k) trace.at(0, k) += J.at(a * 3 + a, k);
  }
  EXPECT_LT(rel_diff(spectral_divergence(f, ops), trace), 1e-15);
}

TEST(SpectralJacobian, DifferentiatesCosineSine) {
  const FrequencyBand band = cube_band(2, 5, 16);
  const SpectralOperators ops(band, 1.0, 2);
  const double a = 0.8, b = -1.3;
  BandLimitedField f = BandLimitedField::zeros(band);
  f.at(0, band.linear({3, 2, 0})) = Complex(a / 2, -b / 2);
  f.at(0, band.linear({1, 2, 0})) = Complex(a / 2, b / 2);
  const auto J = include(spectral_jacobian(f, ops), Shape{16, 16});
  for (int i = 0; i < 16; ++i) {
    const double x = i / 16.0;
    const double expected = -2 * kPi * a * std::sin(2 * kPi * x) + 2 * kPi * b * std::cos(2 * kPi * x);
    EXPECT_NEAR(J.component(0)[i], expected, 1e-12);
    EXPECT_NEAR(J.component(1)[i], 0.0, 1e-12);
  }
}

TEST(SpectralOperators, PreserveHermitianSymmetry) {
  std::mt19937_64 rng(5);
  const FrequencyBand band = cube_band(2, 8, 16);
  const SpectralOperators ops(band, 2.0, 2);
  const auto f = random_field(band, rng);
  for (const auto& g : {apply_L(f, ops), apply_K(f, ops), spectral_jacobian(f, ops), spectral_divergence(f, ops)}) {
    EXPECT_LT(g.hermitian_defect(), 1e-12 * g.norm());
  }
  // Sums of in-band frequencies reach the unpaired boundary of an even band, so use an odd one.
  const FrequencyBand odd = cube_band(2, 7, 16);
  const auto a = random_field(odd, rng, 0.0, 1);
  const auto b = random_field(odd, rng, 0.0, 1);
  const auto c = truncated_convolution(a, b);
  EXPECT_LT(c.hermitian_defect(), 1e-12 * c.norm());
}

TEST(TruncatedConvolution, DcDeltaScales) {
  std::mt19937_64 rng(6);
  const FrequencyBand band = cube_band(2, 7, 8);
  const auto a = scalar_noise(band, rng);
  BandLimitedField delta(band, 1);
  delta.at(0, band.linear({3, 3, 0})) = Complex(0.0, 2.0);
  BandLimitedField expected(band, 1);
  for (std::size_t k = 0; k < band.count(); ++k) expected.at(0, k) = a.at(0, k) * Complex(0.0, 2.0);
  EXPECT_LT(rel_diff(truncated_convolution(a, delta), expected), 1e-14);
}

TEST(TruncatedConvolution, CommutativeAndBilinear) {
  std::mt19937_64 rng(7);
  const FrequencyBand band = cube_band(3, 5, 8);
  const auto a = scalar_noise(band, rng);
  const auto b = scalar_noise(band, rng);
  const auto c = scalar_noise(band, rng);
  EXPECT_LT(rel_diff(truncated_convolution(a, b), truncated_convolution(b, a)), 1e-13);
  EXPECT_LT(rel_diff(truncated_convolution(a + b, c), truncated_convolution(a, c) + truncated_convolution(b, c)),
            1e-12);
}

TEST(TruncatedConvolution, MatchesDirectDoubleSum) {
  std::mt19937_64 rng(8);
  const FrequencyBand band = cube_band(2, 5, 5);
  const auto a = scalar_noise(band, rng);
  const auto b = scalar_noise(band, rng);
  BandLimitedField direct(band, 1);
  for (int p0 = -2; p0 <= 2; ++p0)
    for (int p1 = -2; p1 <= 2; ++p1)
      for (int q0 = -2; q0 <= 2; ++q0)
        for (int q1 = -2; q1 <= 2; ++q1) {
          const int k0 = p0 + q0, k1 = p1 + q1;
          if (std::abs(k0) > 2 || std::abs(k1) > 2) continue;
          direct.at(0, static_cast<std::size_t>((k0 + 2) + 5 * (k1 + 2))) +=
              a.at(0, static_cast<std::size_t>((p0 + 2) + 5 * (p1 + 2))) *
              b.at(0, static_cast<std::size_t>((q0 + 2) + 5 * (q1 + 2)));
        }
  EXPECT_LT(rel_diff(truncated_convolution(a, b), direct), 1e-12);
}

TEST(TruncatedConvolution, RejectsBandMismatch) {
  EXPECT_THROW(truncated_convolution(BandLimitedField(cube_band(2, 5, 8), 1), BandLimitedField(cube_band(2, 6, 8), 1)),
               std::invalid_argument);
}

TEST(InnerProductV, PositiveSymmetricAndZeroAtZero) {
  std::mt19937_64 rng(9);
  const FrequencyBand band = cube_band(2, 8, 16);
  const SpectralOperators ops(band, 3.0, 2);
  const auto a = random_field(band, rng);
  const auto b = random_field(band, rng);
  EXPECT_GT(inner_product_V(a, a, ops), 0.0);
  EXPECT_EQ(inner_product_V(BandLimitedField::zeros(band), BandLimitedField::zeros(band), ops), 0.0);
  EXPECT_LT(rel_diff(inner_product_V(a, b, ops), inner_product_V(b, a, ops)), 1e-14);
  EXPECT_LT(rel_diff(l2_pairing(apply_L(a, ops), b), l2_pairing(a, apply_L(b, ops))), 1e-14);
}

TEST(InnerProductV, EqualsSpatialQuadratureAtFullBand) {
  std::mt19937_64 rng(10);
  const FrequencyBand band = cube_band(2, 12, 12);
  const SpectralOperators ops(band, 2.0, 2);
  const auto a = random_field(band, rng);
  const auto b = random_field(band, rng);
  const auto la = include(apply_L(a, ops), band.grid_sizes());
  const auto sb = include(b, band.grid_sizes());
  double quad = 0.0;
  for (std::size_t n = 0; n < la.data().size(); ++n) quad += la.data()[n] * sb.data()[n];
  quad /= static_cast<double>(band.grid_sizes().count());
  EXPECT_LT(rel_diff(inner_product_V(a, b, ops), quad), 1e-9);
}

}  // namespace
}  // namespace geoshoot
