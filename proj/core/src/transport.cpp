#include "geoshoot/transport.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "geoshoot/errors.hpp"
#include "geoshoot/image.hpp"
#include "geoshoot/lie.hpp"

namespace geoshoot {
namespace {

using State = std::vector<BandLimitedField>;

State shifted(const State& y, double h, const State& k) {
  State out = y;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].axpy(h, k[i]);
  return out;
}

// Classical RK4 step of size h (negative when integrating backward).
// rhs(stage, y) with stage 0 at the start, 1 at the middle, 2 at the end.
template <typename Rhs>
State rk4(const State& y, double h, Rhs&& rhs, State* start_rate = nullptr) {
  State k1 = rhs(0, y);
  State k2 = rhs(1, shifted(y, 0.5 * h, k1));
  State k3 = rhs(1, shifted(y, 0.5 * h, k2));
  State k4 = rhs(2, shifted(y, h, k3));
  State out = y;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].axpy(h / 6.0, k1[i]);
    out[i].axpy(h / 3.0, k2[i]);
    out[i].axpy(h / 3.0, k3[i]);
    out[i].axpy(h / 6.0, k4[i]);
  }
  if (start_rate) *start_rate = std::move(k1);
  return out;
}

void check_finite(const State& y, const char* what, int node) {
  for (const auto& f : y) {
    if (!f.all_finite()) throw NumericalBlowup(std::string(what) + " produced non-finite values", node);
  }
}

void require_band(const BandLimitedField& f, const SpectralOperators& ops, const char* op) {
  if (!(f.band() == ops.band())) throw std::invalid_argument(std::string(op) + ": band mismatch");
}

void require_steps(const Trajectory& t, const TimeGrid& time, const char* op) {
  if (t.intervals() != time.intervals() || t.rates.size() != t.nodes.size()) {
    throw std::invalid_argument(std::string(op) + ": trajectory does not match the time grid");
  }
}

// v at the requested stage of forward interval k.
BandLimitedField stage_value(const Trajectory& v, int k, int stage, double dt) {
  if (stage == 0) return v.nodes[static_cast<std::size_t>(k)];
  if (stage == 2) return v.nodes[static_cast<std::size_t>(k + 1)];
  return v.midpoint(k, dt);
}

// Backward traversal of interval k: stage 0 sits at t_{k+1}.
BandLimitedField reverse_stage_value(const Trajectory& v, int k, int stage, double dt) {
  return stage_value(v, k, 2 - stage, dt);
}

VoxelPoint departure(const Shape& grid, const SpatialVectorField& v, int i, int j, int k,
                     std::size_t n, double dt) {
  VoxelPoint p{static_cast<double>(i), static_cast<double>(j), static_cast<double>(k)};
  for (int a = 0; a < grid.dims(); ++a) {
    p[static_cast<std::size_t>(a)] -= dt * grid[a] * v.component(a)[n];
  }
  return p;
}

State scaled(const State& y, double factor) {
  State out = y;
  for (auto& f : out) f *= factor;
  return out;
}

void accumulate(State& y, double h, const State& k) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i].axpy(h, k[i]);
}

// Transpose of the RK4 step linearized at y, applied to the cotangent bar of
// the step's output. transpose(s, c) applies the transposed rate Jacobian at s.
template <typename Rhs, typename Transpose>
State rk4_transpose(const State& y, double h, const State& bar, Rhs&& rhs, Transpose&& transpose) {
  const State s2 = shifted(y, 0.5 * h, rhs(0, y));
  const State s3 = shifted(y, 0.5 * h, rhs(1, s2));
  const State s4 = shifted(y, h, rhs(1, s3));

  State out = bar;
  State c3 = scaled(bar, h / 3.0);
  const State b4 = transpose(s4, scaled(bar, h / 6.0));
  accumulate(out, 1.0, b4);
  accumulate(c3, h, b4);
  State c2 = scaled(bar, h / 3.0);
  const State b3 = transpose(s3, c3);
  accumulate(out, 1.0, b3);
  accumulate(c2, 0.5 * h, b3);
  State c1 = scaled(bar, h / 6.0);
  const State b2 = transpose(s2, c2);
  accumulate(out, 1.0, b2);
  accumulate(c1, 0.5 * h, b2);
  accumulate(out, 1.0, transpose(y, c1));
  return out;
}

}  // namespace

TimeGrid::TimeGrid(int intervals) : nt_(intervals) {
  if (intervals < 1) throw std::invalid_argument("TimeGrid: need at least one interval");
}

BandLimitedField Trajectory::midpoint(int k, double dt) const {
  const auto a = static_cast<std::size_t>(k);
  BandLimitedField out = nodes[a];
  out += nodes[a + 1];
  out *= 0.5;
  out.axpy(dt / 8.0, rates[a]);
  out.axpy(-dt / 8.0, rates[a + 1]);
  return out;
}

std::size_t Trajectory::coefficient_count() const noexcept {
  std::size_t n = 0;
  for (const auto& f : nodes) n += f.size();
  for (const auto& f : rates) n += f.size();
  return n;
}

Trajectory integrate_epdiff(const BandLimitedField& v0, const TimeGrid& time,
                            const SpectralOperators& ops) {
  require_band(v0, ops, "integrate_epdiff");
  const double h = time.step();
  Trajectory out;
  out.nodes.reserve(static_cast<std::size_t>(time.nodes()));
  out.rates.reserve(static_cast<std::size_t>(time.nodes()));
  State y{v0};
  check_finite(y, "EPDiff integration", 0);
  auto rhs = [&](int, const State& s) { return State{epdiff_rhs(s[0], ops)}; };
  for (int k = 0; k < time.intervals(); ++k) {
    State rate;
    State next = rk4(y, h, rhs, &rate);
    out.nodes.push_back(std::move(y[0]));
    out.rates.push_back(std::move(rate[0]));
    y = std::move(next);
    check_finite(y, "EPDiff integration", k + 1);
  }
  out.rates.push_back(epdiff_rhs(y[0], ops));
  out.nodes.push_back(std::move(y[0]));
  return out;
}

std::vector<ScalarImage> solve_state(const ScalarImage& I0, const Trajectory& velocity,
                                     const TimeGrid& time) {
  require_steps(velocity, time, "solve_state");
  const Shape& grid = I0.shape();
  if (!(grid == velocity.front().band().grid_sizes())) {
    throw std::invalid_argument("solve_state: image grid " + grid.str() + " does not match band grid " +
                                velocity.front().band().grid_sizes().str());
  }
  const double dt = time.step();
  std::vector<ScalarImage> m;
  m.reserve(static_cast<std::size_t>(time.nodes()));
  m.push_back(I0);
  for (int step = 0; step < time.intervals(); ++step) {
    const auto v = include(velocity.nodes[static_cast<std::size_t>(step)], grid);
    const ScalarImage& prev = m.back();
    ScalarImage next(grid);
    next.set_spacing(I0.spacing());
    for (int k = 0; k < grid[2]; ++k) {
      for (int j = 0; j < grid[1]; ++j) {
        for (int i = 0; i < grid[0]; ++i) {
          const std::size_t n = next.index(i, j, k);
          next[n] = sample(prev, departure(grid, v, i, j, k, n, dt));
        }
      }
    }
    if (!next.all_finite()) throw NumericalBlowup("image transport produced non-finite values", step + 1);
    m.push_back(std::move(next));
  }
  return m;
}

SpatialVectorField compose_characteristics(const Trajectory& velocity, const TimeGrid& time,
                                           const Shape& grid) {
  require_steps(velocity, time, "compose_characteristics");
  const int d = grid.dims();
  const double dt = time.step();
  std::vector<ScalarImage> u(static_cast<std::size_t>(d), ScalarImage(grid));
  for (int step = 0; step < time.intervals(); ++step) {
    const auto v = include(velocity.nodes[static_cast<std::size_t>(step)], grid);
    std::vector<ScalarImage> next(static_cast<std::size_t>(d), ScalarImage(grid));
    for (int k = 0; k < grid[2]; ++k) {
      for (int j = 0; j < grid[1]; ++j) {
        for (int i = 0; i < grid[0]; ++i) {
          const std::size_t n = next[0].index(i, j, k);
          const VoxelPoint p = departure(grid, v, i, j, k, n, dt);
          for (int a = 0; a < d; ++a) {
            const auto sa = static_cast<std::size_t>(a);
            next[sa][n] = sample(u[sa], p) - dt * v.component(a)[n];
          }
        }
      }
    }
    u = std::move(next);
  }
  SpatialVectorField out(grid, d);
  for (int a = 0; a < d; ++a) {
    const auto src = u[static_cast<std::size_t>(a)].values();
    std::copy(src.begin(), src.end(), out.component(a).begin());
  }
  return out;
}

Trajectory solve_deformation_state(const Trajectory& velocity, const TimeGrid& time,
                                   const SpectralOperators& ops) {
  require_steps(velocity, time, "solve_deformation_state");
  require_band(velocity.front(), ops, "solve_deformation_state");
  const double h = time.step();
  // v is re-integrated alongside u so the stage values are the exact RK4 ones.
  auto rhs = [&](int, const State& s) {
    BandLimitedField du = -s[0];
    du -= jacobian_action(s[1], s[0], ops);
    return State{epdiff_rhs(s[0], ops), std::move(du)};
  };
  Trajectory out;
  State y{velocity.front(), BandLimitedField::zeros(ops.band())};
  for (int k = 0; k < time.intervals(); ++k) {
    State rate;
    State next = rk4(y, h, rhs, &rate);
    out.nodes.push_back(std::move(y[1]));
    out.rates.push_back(std::move(rate[1]));
    y = std::move(next);
    check_finite(y, "deformation state integration", k + 1);
  }
  out.rates.push_back(rhs(2, y)[1]);
  out.nodes.push_back(std::move(y[1]));
  return out;
}

ScalarImage deformed_image(const ScalarImage& I0, const BandLimitedField& displacement) {
  return warp(I0, include(displacement, I0.shape()));
}

BandLimitedField solve_adjoint_jacobi_backward(const BandLimitedField& U1,
                                               const Trajectory& velocity, const TimeGrid& time,
                                               const SpectralOperators& ops) {
  require_steps(velocity, time, "solve_adjoint_jacobi_backward");
  require_band(U1, ops, "solve_adjoint_jacobi_backward");
  const double h = time.step();
  State y{U1, BandLimitedField::zeros(ops.band())};
  for (int k = time.intervals() - 1; k >= 0; --k) {
    auto rhs = [&](int stage, const State& s) {
      const BandLimitedField v = reverse_stage_value(velocity, k, stage, h);
      auto r = adjoint_jacobi_rhs(v, s[0], s[1], ops);
      return State{std::move(r.U), std::move(r.delta_v)};
    };
    y = rk4(y, -h, rhs);
    check_finite(y, "adjoint Jacobi integration", k);
  }
  return y[1];
}

BandLimitedField solve_state_adjoint(const Trajectory& velocity, const std::vector<ScalarImage>& images,
                                     const ScalarImage& lambda1, const TimeGrid& time,
                                     const SpectralOperators& ops) {
  require_steps(velocity, time, "solve_state_adjoint");
  require_band(velocity.front(), ops, "solve_state_adjoint");
  if (static_cast<int>(images.size()) != time.nodes()) {
    throw std::invalid_argument("solve_state_adjoint: image sequence does not match the time grid");
  }
  const double h = time.step();
  const Shape& grid = lambda1.shape();
  const int d = grid.dims();
  ScalarImage lambda = lambda1;
  BandLimitedField mu = BandLimitedField::zeros(ops.band());
  for (int step = time.intervals() - 1; step >= 0; --step) {
    const auto si = static_cast<std::size_t>(step);
    const auto v = include(velocity.nodes[si], grid);
    const ScalarImage& m = images[si];
    SpatialVectorField force(grid, d);
    ScalarImage previous(grid);
    for (int k = 0; k < grid[2]; ++k) {
      for (int j = 0; j < grid[1]; ++j) {
        for (int i = 0; i < grid[0]; ++i) {
          const std::size_t n = previous.index(i, j, k);
          const VoxelPoint p = departure(grid, v, i, j, k, n, h);
          const auto g = sample_gradient(m, p);
          for (int a = 0; a < d; ++a) force.component(a)[n] = -h * lambda[n] * g[static_cast<std::size_t>(a)];
          scatter(previous, p, lambda[n]);
        }
      }
    }
    lambda = std::move(previous);
    mu = rk4_transpose(
        State{velocity.nodes[si]}, h, State{std::move(mu)},
        [&](int, const State& y) { return State{epdiff_rhs(y[0], ops)}; },
        [&](const State& y, const State& c) {
          return State{incremental_epdiff_rhs_transpose(y[0], c[0], ops)};
        })[0];
    mu += apply_K(project(force, ops.band()), ops);
    check_finite(State{mu}, "state adjoint integration", step);
  }
  return mu;
}

BandLimitedField solve_deformation_adjoint(const Trajectory& velocity, const Trajectory& displacement,
                                           const BandLimitedField& u_bar1, const TimeGrid& time,
                                           const SpectralOperators& ops) {
  require_steps(velocity, time, "solve_deformation_adjoint");
  require_steps(displacement, time, "solve_deformation_adjoint");
  require_band(u_bar1, ops, "solve_deformation_adjoint");
  const double h = time.step();
  auto rhs = [&](int, const State& s) {
    BandLimitedField du = -s[0];
    du -= jacobian_action(s[1], s[0], ops);
    return State{epdiff_rhs(s[0], ops), std::move(du)};
  };
  // Cotangents: V pairing for v, L2 pairing for u.
  auto transpose = [&](const State& s, const State& c) {
    BandLimitedField pulled = c[1];
    pulled += jacobian_transpose_action(s[1], c[1], ops);
    BandLimitedField v_bar = incremental_epdiff_rhs_transpose(s[0], c[0], ops);
    v_bar -= apply_K(pulled, ops);
    return State{std::move(v_bar), -1.0 * jacobian_action_transpose(s[0], c[1], ops)};
  };
  State bar{BandLimitedField::zeros(ops.band()), u_bar1};
  for (int k = time.intervals() - 1; k >= 0; --k) {
    const auto sk = static_cast<std::size_t>(k);
    bar = rk4_transpose(State{velocity.nodes[sk], displacement.nodes[sk]}, h, bar, rhs, transpose);
    check_finite(bar, "deformation adjoint integration", k);
  }
  return bar[0];
}

IncrementalState solve_incremental_forward(const Trajectory& velocity,
                                           const std::vector<ScalarImage>& images,
                                           const BandLimitedField& delta_v0, const TimeGrid& time,
                                           const SpectralOperators& ops) {
  require_steps(velocity, time, "solve_incremental_forward");
  require_band(delta_v0, ops, "solve_incremental_forward");
  if (static_cast<int>(images.size()) != time.nodes()) {
    throw std::invalid_argument("solve_incremental_forward: image sequence does not match the time grid");
  }
  const double h = time.step();
  const Shape& grid = images.front().shape();

  // Tangent of the RK4 map: v and delta_v advance together.
  auto rhs = [&](int, const State& s) {
    return State{epdiff_rhs(s[0], ops), incremental_epdiff_rhs(s[0], s[1], ops)};
  };
  IncrementalState out;
  State y{velocity.front(), delta_v0};
  ScalarImage dm(grid);
  dm.set_spacing(images.front().spacing());
  for (int step = 0; step < time.intervals(); ++step) {
    const auto si = static_cast<std::size_t>(step);
    const auto v = include(velocity.nodes[si], grid);
    const auto dv = include(y[1], grid);
    const ScalarImage& m = images[si];
    ScalarImage next(grid);
    next.set_spacing(dm.spacing());
    for (int k = 0; k < grid[2]; ++k) {
      for (int j = 0; j < grid[1]; ++j) {
        for (int i = 0; i < grid[0]; ++i) {
          const std::size_t n = next.index(i, j, k);
          const VoxelPoint p = departure(grid, v, i, j, k, n, h);
          const auto g = sample_gradient(m, p);
          double value = sample(dm, p);
          for (int a = 0; a < grid.dims(); ++a) {
            value -= h * g[static_cast<std::size_t>(a)] * dv.component(a)[n];
          }
          next[n] = value;
        }
      }
    }
    dm = std::move(next);

    State rate;
    State following = rk4(y, h, rhs, &rate);
    out.delta_velocity.nodes.push_back(std::move(y[1]));
    out.delta_velocity.rates.push_back(std::move(rate[1]));
    y = std::move(following);
    check_finite(y, "incremental EPDiff integration", step + 1);
    if (!dm.all_finite()) throw NumericalBlowup("incremental transport produced non-finite values", step + 1);
  }
  out.delta_velocity.rates.push_back(rhs(2, y)[1]);
  out.delta_velocity.nodes.push_back(std::move(y[1]));
  out.delta_image = std::move(dm);
  return out;
}

IncrementalState solve_incremental_deformation(const Trajectory& velocity,
                                               const BandLimitedField& delta_v0,
                                               const TimeGrid& time, const SpectralOperators& ops) {
  require_steps(velocity, time, "solve_incremental_deformation");
  require_band(delta_v0, ops, "solve_incremental_deformation");
  const double h = time.step();
  // State: v, u, delta_v, delta_u.
  auto rhs = [&](int, const State& s) {
    BandLimitedField du = -s[0];
    du -= jacobian_action(s[1], s[0], ops);
    BandLimitedField ddu = -s[2];
    ddu -= jacobian_action(s[3], s[0], ops);
    ddu -= jacobian_action(s[1], s[2], ops);
    return State{epdiff_rhs(s[0], ops), std::move(du), incremental_epdiff_rhs(s[0], s[2], ops),
                 std::move(ddu)};
  };
  IncrementalState out;
  const auto zero = BandLimitedField::zeros(ops.band());
  State y{velocity.front(), zero, delta_v0, zero};
  for (int k = 0; k < time.intervals(); ++k) {
    State rate;
    State next = rk4(y, h, rhs, &rate);
    out.delta_velocity.nodes.push_back(std::move(y[2]));
    out.delta_velocity.rates.push_back(std::move(rate[2]));
    y = std::move(next);
    check_finite(y, "incremental deformation integration", k + 1);
  }
  out.delta_velocity.rates.push_back(rhs(2, y)[2]);
  out.delta_velocity.nodes.push_back(y[2]);
  out.delta_displacement = std::move(y[3]);
  return out;
}

BandLimitedField solve_incremental_adjoint_jacobi_backward(
    const BandLimitedField& delta_U1, const BandLimitedField& U1, const Trajectory& velocity,
    const Trajectory& delta_velocity, const TimeGrid& time, const SpectralOperators& ops) {
  require_steps(velocity, time, "solve_incremental_adjoint_jacobi_backward");
  require_steps(delta_velocity, time, "solve_incremental_adjoint_jacobi_backward");
  require_band(delta_U1, ops, "solve_incremental_adjoint_jacobi_backward");
  require_band(U1, ops, "solve_incremental_adjoint_jacobi_backward");
  if (U1.is_zero()) return solve_adjoint_jacobi_backward(delta_U1, velocity, time, ops);

  const double h = time.step();
  const auto zero = BandLimitedField::zeros(ops.band());
  // State: U, w, delta_U, delta_w.
  State y{U1, zero, delta_U1, zero};
  for (int k = time.intervals() - 1; k >= 0; --k) {
    auto rhs = [&](int stage, const State& s) {
      const BandLimitedField v = reverse_stage_value(velocity, k, stage, h);
      const BandLimitedField dv = reverse_stage_value(delta_velocity, k, stage, h);
      auto base = adjoint_jacobi_rhs(v, s[0], s[1], ops);
      auto inc = incremental_adjoint_jacobi_rhs(v, dv, s[1], s[0], s[2], s[3], ops);
      return State{std::move(base.U), std::move(base.delta_v), std::move(inc.U),
                   std::move(inc.delta_v)};
    };
    y = rk4(y, -h, rhs);
    check_finite(y, "incremental adjoint Jacobi integration", k);
  }
  return y[3];
}

}  // namespace geoshoot
