#pragma once

#include <vector>

#include "geoshoot/field.hpp"
#include "geoshoot/spectral.hpp"

namespace geoshoot {

/// Uniform grid t_k = k / nt on [0, 1].
class TimeGrid {
 public:
  explicit TimeGrid(int intervals = 10);

  int intervals() const noexcept { return nt_; }
  int nodes() const noexcept { return nt_ + 1; }
  double step() const noexcept { return 1.0 / nt_; }
  double at(int k) const noexcept { return static_cast<double>(k) / nt_; }

 private:
  int nt_;
};

/// Band-limited field sampled at every time node, with the time derivative at
/// each node. Off-node values (the RK4 half steps) come from cubic Hermite
/// interpolation, which keeps replayed trajectories 4th-order accurate.
struct Trajectory {
  std::vector<BandLimitedField> nodes;
  std::vector<BandLimitedField> rates;

  int intervals() const noexcept { return static_cast<int>(nodes.size()) - 1; }
  const BandLimitedField& front() const { return nodes.front(); }
  const BandLimitedField& back() const { return nodes.back(); }
  /// Value at the middle of interval k, of length dt.
  BandLimitedField midpoint(int k, double dt) const;
  std::size_t coefficient_count() const noexcept;
};

/// EPDiff forward from v0. Throws NumericalBlowup on non-finite coefficients.
Trajectory integrate_epdiff(const BandLimitedField& v0, const TimeGrid& time,
                            const SpectralOperators& ops);

/// Semi-Lagrangian image transport; returns m at every node, m[0] = I0.
std::vector<ScalarImage> solve_state(const ScalarImage& I0, const Trajectory& velocity,
                                     const TimeGrid& time);

/// Displacement u of the map realized by solve_state's departure points,
/// composed over all steps: m(1)(x) ~ I0(x + u(x)). Domain units.
SpatialVectorField compose_characteristics(const Trajectory& velocity, const TimeGrid& time,
                                           const Shape& grid);

/// Band-limited displacement u of phi = id + iota(u), with du/dt = -v - Du * v, u(0) = 0.
Trajectory solve_deformation_state(const Trajectory& velocity, const TimeGrid& time,
                                   const SpectralOperators& ops);

/// I0 o (id + iota(u)).
ScalarImage deformed_image(const ScalarImage& I0, const BandLimitedField& displacement);

/// Reduced adjoint Jacobi system from U(1) = U1, delta_v(1) = 0 back to t = 0;
/// returns delta_v(0).
BandLimitedField solve_adjoint_jacobi_backward(const BandLimitedField& U1,
                                               const Trajectory& velocity, const TimeGrid& time,
                                               const SpectralOperators& ops);

/// Discrete adjoint of integrate_epdiff followed by solve_state. lambda1 is the
/// derivative of a functional of m(1) under the mean pairing; the result is the
/// V-metric gradient of that functional with respect to v0. Exact transpose of
/// solve_incremental_forward's map delta_v0 -> delta m(1).
BandLimitedField solve_state_adjoint(const Trajectory& velocity, const std::vector<ScalarImage>& images,
                                     const ScalarImage& lambda1, const TimeGrid& time,
                                     const SpectralOperators& ops);

/// Discrete adjoint of solve_deformation_state. u_bar1 is the derivative of a
/// functional of u(1) under the L2 coefficient pairing; the result is its
/// V-metric gradient with respect to v0. displacement is the forward output.
BandLimitedField solve_deformation_adjoint(const Trajectory& velocity, const Trajectory& displacement,
                                           const BandLimitedField& u_bar1, const TimeGrid& time,
                                           const SpectralOperators& ops);

struct IncrementalState {
  Trajectory delta_velocity;
  ScalarImage delta_image;              // delta m(1), state variant
  BandLimitedField delta_displacement;  // delta u(1), deformation variant
};

/// Incremental EPDiff together with the linearized semi-Lagrangian transport
/// of the image. `images` is the stored state sequence m(t_k).
IncrementalState solve_incremental_forward(const Trajectory& velocity,
                                           const std::vector<ScalarImage>& images,
                                           const BandLimitedField& delta_v0, const TimeGrid& time,
                                           const SpectralOperators& ops);

/// Incremental EPDiff together with the incremental deformation state
/// d(delta_u)/dt = -delta_v - D(delta_u) * v - Du * delta_v, delta_u(0) = 0.
/// v and u are re-integrated from velocity.front() so every stage is the exact
/// RK4 linearization.
IncrementalState solve_incremental_deformation(const Trajectory& velocity,
                                               const BandLimitedField& delta_v0,
                                               const TimeGrid& time, const SpectralOperators& ops);

/// Incremental adjoint Jacobi system from delta_U(1) = delta_U1, delta_w(1) = 0.
/// The companions U and w are co-integrated from U(1) = U1 and w(1) = 0; with
/// U1 = 0 (the Gauss-Newton case) they vanish identically and are skipped.
/// Returns delta_w(0).
BandLimitedField solve_incremental_adjoint_jacobi_backward(
    const BandLimitedField& delta_U1, const BandLimitedField& U1, const Trajectory& velocity,
    const Trajectory& delta_velocity, const TimeGrid& time, const SpectralOperators& ops);

}  // namespace geoshoot
