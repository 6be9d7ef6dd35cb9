#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geoshoot/field.hpp"
#include "geoshoot/spectral.hpp"
#include "geoshoot/transport.hpp"

namespace geoshoot {

/// State: the image is advected by the flow. Deformation: the band-limited
/// map phi = id + iota(u) is transported and the image is I0 o phi.
enum class Variant { State, Deformation };

Variant parse_variant(std::string_view name);
std::string to_string(Variant v);

/// Discrete: gradient and Gauss-Newton products are the exact transposes of the
/// discretized forward map. Jacobi: the final-time costate U(1) is transported
/// by the RK4-integrated adjoint Jacobi equations, which matches the discrete
/// gradient at v0 = 0 and approximates it elsewhere.
enum class AdjointScheme { Discrete, Jacobi };

AdjointScheme parse_adjoint_scheme(std::string_view name);
std::string to_string(AdjointScheme a);

/// Forward-pass quantities kept for the gradient and Hessian-vector products.
struct ForwardCache {
  Trajectory velocity;
  std::vector<ScalarImage> images;    // m(t_k) for the state variant, only m(1) otherwise
  Trajectory displacement;            // u(t_k), deformation variant only
  SpatialVectorField final_gradient;  // grad m(1), or grad I0 o phi(1); set by gradient() when needed

  const ScalarImage& final_image() const { return images.back(); }
};

struct GradientReport {
  BandLimitedField v0;
  double energy = 0.0;
  double regularizer = 0.0;
  double image_term = 0.0;
  std::optional<BandLimitedField> gradient;  // V-metric gradient v0 + delta_v(0)
  std::shared_ptr<const ForwardCache> cache;
};

/// Stored-quantity counts of one gradient evaluation.
struct Footprint {
  std::size_t band_coefficients = 0;  // complex coefficients across all stored band fields
  std::size_t grid_scalars = 0;       // real full-grid samples
  std::size_t velocity_fields = 0;    // stored velocity snapshots (nodes and rates)
};

class RegistrationProblem {
 public:
  RegistrationProblem(Variant variant, ScalarImage source, ScalarImage target, FrequencyBand band,
                      double alpha, int s, double sigma, TimeGrid time,
                      AdjointScheme adjoint = AdjointScheme::Discrete);

  Variant variant() const noexcept { return variant_; }
  AdjointScheme adjoint_scheme() const noexcept { return adjoint_; }
  const ScalarImage& source() const noexcept { return source_; }
  const ScalarImage& target() const noexcept { return target_; }
  const FrequencyBand& band() const noexcept { return ops_.band(); }
  const SpectralOperators& ops() const noexcept { return ops_; }
  double sigma() const noexcept { return sigma_; }
  const TimeGrid& time() const noexcept { return time_; }

  /// Energy 1/2 <v0, v0>_V + mean((m(1) - I1)^2) / sigma^2, with the forward pass cached.
  GradientReport evaluate(const BandLimitedField& v0) const;
  GradientReport gradient(const BandLimitedField& v0) const;

  /// Gauss-Newton operator in the V metric: delta_v0 + J^T W J delta_v0, with J the
  /// exact tangent of the discrete forward map and J^T its adjoint under the scheme.
  BandLimitedField gauss_newton_hvp(const GradientReport& report,
                                    const BandLimitedField& delta_v0) const;

  /// Displacement u of the recovered map x -> x + u(x), with m(1) ~ I0 o (id + u).
  /// State variant: the composed semi-Lagrangian characteristics. Deformation
  /// variant: iota(u(1)) of the band-limited map.
  SpatialVectorField recovered_displacement(const GradientReport& report) const;
  /// Smallest Jacobian determinant of the recovered map over the grid
  /// (centered differences for the state variant, spectral for the deformation variant).
  double min_jacobian_determinant(const GradientReport& report) const;

  Footprint footprint(const GradientReport& report) const;

 private:
  BandLimitedField jacobi_gradient(const ForwardCache& cache, const ScalarImage& residual) const;
  BandLimitedField jacobi_hvp(const ForwardCache& cache, const IncrementalState& inc) const;

  Variant variant_;
  AdjointScheme adjoint_;
  ScalarImage source_;
  ScalarImage target_;
  SpectralOperators ops_;
  double sigma_;
  TimeGrid time_;
};

}  // namespace geoshoot
