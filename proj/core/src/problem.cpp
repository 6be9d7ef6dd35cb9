#include "geoshoot/problem.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "geoshoot/errors.hpp"
#include "geoshoot/image.hpp"
#include "geoshoot/lie.hpp"

namespace geoshoot {
namespace {

// grad I0 evaluated at x + displacement(x), through the interpolant.
SpatialVectorField gradient_at(const ScalarImage& image, const SpatialVectorField& displacement) {
  const Shape& g = image.shape();
  const int d = g.dims();
  SpatialVectorField out(g, d);
  for (int k = 0; k < g[2]; ++k) {
    for (int j = 0; j < g[1]; ++j) {
      for (int i = 0; i < g[0]; ++i) {
        const std::size_t n = image.index(i, j, k);
        VoxelPoint p{static_cast<double>(i), static_cast<double>(j), static_cast<double>(k)};
        for (int a = 0; a < d; ++a) p[static_cast<std::size_t>(a)] += g[a] * displacement.component(a)[n];
        const auto grad = sample_gradient(image, p);
        for (int a = 0; a < d; ++a) out.component(a)[n] = grad[static_cast<std::size_t>(a)];
      }
    }
  }
  return out;
}

// scale * pi(r * G), with r scalar and G a vector field on the grid.
BandLimitedField project_scaled(const ScalarImage& r, const SpatialVectorField& G, double scale,
                                const FrequencyBand& band) {
  SpatialVectorField prod(G.shape(), G.components());
  for (int a = 0; a < G.components(); ++a) {
    auto out = prod.component(a);
    auto in = G.component(a);
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = scale * r[n] * in[n];
  }
  return project(prod, band);
}

// delta m = G . iota(delta_u) on the grid.
ScalarImage chain_rule(const SpatialVectorField& G, const BandLimitedField& delta_u) {
  const auto du = include(delta_u, G.shape());
  ScalarImage dm(G.shape());
  for (int a = 0; a < du.components(); ++a) {
    auto g = G.component(a);
    auto u = du.component(a);
    for (std::size_t n = 0; n < dm.size(); ++n) dm[n] += g[n] * u[n];
  }
  return dm;
}

ScalarImage scaled(const ScalarImage& a, double factor) {
  ScalarImage out(a.shape());
  for (std::size_t n = 0; n < a.size(); ++n) out[n] = factor * a[n];
  return out;
}

ScalarImage difference(const ScalarImage& a, const ScalarImage& b) {
  ScalarImage out(a.shape());
  for (std::size_t n = 0; n < a.size(); ++n) out[n] = a[n] - b[n];
  return out;
}

}  // namespace

Variant parse_variant(std::string_view name) {
  if (name == "state") return Variant::State;
  if (name == "deformation") return Variant::Deformation;
  throw std::invalid_argument("unknown variant '" + std::string(name) + "' (expected state or deformation)");
}

std::string to_string(Variant v) { return v == Variant::State ? "state" : "deformation"; }

AdjointScheme parse_adjoint_scheme(std::string_view name) {
  if (name == "discrete") return AdjointScheme::Discrete;
  if (name == "jacobi") return AdjointScheme::Jacobi;
  throw std::invalid_argument("unknown adjoint scheme '" + std::string(name) + "' (expected discrete or jacobi)");
}

std::string to_string(AdjointScheme a) { return a == AdjointScheme::Discrete ? "discrete" : "jacobi"; }

RegistrationProblem::RegistrationProblem(Variant variant, ScalarImage source, ScalarImage target,
                                         FrequencyBand band, double alpha, int s, double sigma,
                                         TimeGrid time, AdjointScheme adjoint)
    : variant_(variant),
      adjoint_(adjoint),
      source_(std::move(source)),
      target_(std::move(target)),
      ops_(std::move(band), alpha, s),
      sigma_(sigma),
      time_(time) {
  if (!(source_.shape() == target_.shape())) {
    throw std::invalid_argument("source and target grids differ: " + source_.shape().str() + " vs " +
                                target_.shape().str());
  }
  if (!(source_.shape() == ops_.band().grid_sizes())) {
    throw std::invalid_argument("image grid " + source_.shape().str() + " does not match band grid " +
                                ops_.band().grid_sizes().str());
  }
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!source_.all_finite() || !target_.all_finite()) {
    throw std::invalid_argument("input images contain non-finite values");
  }
}

GradientReport RegistrationProblem::evaluate(const BandLimitedField& v0) const {
  if (!(v0.band() == band()) || v0.components() != band().dims()) {
    throw std::invalid_argument("evaluate: initial velocity does not live on the problem band");
  }
  auto cache = std::make_shared<ForwardCache>();
  cache->velocity = integrate_epdiff(v0, time_, ops_);
  if (variant_ == Variant::State) {
    cache->images = solve_state(source_, cache->velocity, time_);
  } else {
    cache->displacement = solve_deformation_state(cache->velocity, time_, ops_);
    cache->images.push_back(deformed_image(source_, cache->displacement.back()));
  }

  GradientReport r;
  r.v0 = v0;
  r.regularizer = 0.5 * inner_product_V(v0, v0, ops_);
  r.image_term = mse(cache->final_image(), target_) / (sigma_ * sigma_);
  r.energy = r.regularizer + r.image_term;
  r.cache = std::move(cache);
  return r;
}

GradientReport RegistrationProblem::gradient(const BandLimitedField& v0) const {
  GradientReport r = evaluate(v0);
  auto cache = std::make_shared<ForwardCache>(*r.cache);
  const ScalarImage residual = difference(cache->final_image(), target_);

  BandLimitedField g;
  if (adjoint_ == AdjointScheme::Jacobi) {
    cache->final_gradient = variant_ == Variant::State
                                ? spatial_gradient(cache->final_image())
                                : gradient_at(source_, include(cache->displacement.back(), source_.shape()));
    g = jacobi_gradient(*cache, residual);
  } else if (variant_ == Variant::State) {
    g = solve_state_adjoint(cache->velocity, cache->images, scaled(residual, 2.0 / (sigma_ * sigma_)),
                            time_, ops_);
  } else {
    cache->final_gradient = gradient_at(source_, include(cache->displacement.back(), source_.shape()));
    const BandLimitedField u_bar = project_scaled(residual, cache->final_gradient, 2.0 / (sigma_ * sigma_), band());
    g = solve_deformation_adjoint(cache->velocity, cache->displacement, u_bar, time_, ops_);
  }
  g += v0;
  r.gradient = std::move(g);
  r.cache = std::move(cache);
  return r;
}

BandLimitedField RegistrationProblem::gauss_newton_hvp(const GradientReport& report,
                                                       const BandLimitedField& delta_v0) const {
  if (!report.cache || !report.gradient) {
    throw InvalidState("gauss_newton_hvp needs a report produced by gradient()");
  }
  if (!(delta_v0.band() == band())) throw std::invalid_argument("gauss_newton_hvp: band mismatch");
  const ForwardCache& c = *report.cache;
  const double weight = 2.0 / (sigma_ * sigma_);

  BandLimitedField out;
  if (variant_ == Variant::State) {
    const IncrementalState inc = solve_incremental_forward(c.velocity, c.images, delta_v0, time_, ops_);
    out = adjoint_ == AdjointScheme::Jacobi
              ? jacobi_hvp(c, inc)
              : solve_state_adjoint(c.velocity, c.images, scaled(inc.delta_image, weight), time_, ops_);
  } else {
    const IncrementalState inc = solve_incremental_deformation(c.velocity, delta_v0, time_, ops_);
    out = adjoint_ == AdjointScheme::Jacobi
              ? jacobi_hvp(c, inc)
              : solve_deformation_adjoint(c.velocity, c.displacement,
                                          project_scaled(chain_rule(c.final_gradient, inc.delta_displacement),
                                                         c.final_gradient, weight, band()),
                                          time_, ops_);
  }
  out += delta_v0;
  return out;
}

// U(1) from the final-time costate, then the adjoint Jacobi system back to t = 0.
BandLimitedField RegistrationProblem::jacobi_gradient(const ForwardCache& c, const ScalarImage& residual) const {
  const BandLimitedField rho = project_scaled(residual, c.final_gradient, -2.0 / (sigma_ * sigma_), band());
  BandLimitedField pulled = rho;
  if (variant_ == Variant::Deformation) pulled += jacobian_transpose_action(c.displacement.back(), rho, ops_);
  return solve_adjoint_jacobi_backward(apply_K(pulled, ops_), c.velocity, time_, ops_);
}

// Gauss-Newton delta_U(1) keeps only the delta_lambda terms; the companion U is then zero.
BandLimitedField RegistrationProblem::jacobi_hvp(const ForwardCache& c, const IncrementalState& inc) const {
  const ScalarImage dm = variant_ == Variant::State ? inc.delta_image
                                                    : chain_rule(c.final_gradient, inc.delta_displacement);
  const BandLimitedField drho = project_scaled(dm, c.final_gradient, -2.0 / (sigma_ * sigma_), band());
  BandLimitedField pulled = drho;
  if (variant_ == Variant::Deformation) pulled += jacobian_transpose_action(c.displacement.back(), drho, ops_);
  return solve_incremental_adjoint_jacobi_backward(apply_K(pulled, ops_), BandLimitedField::zeros(band()),
                                                   c.velocity, inc.delta_velocity, time_, ops_);
}

SpatialVectorField RegistrationProblem::recovered_displacement(const GradientReport& report) const {
  if (!report.cache) throw InvalidState("report carries no forward pass");
  if (variant_ == Variant::Deformation) return include(report.cache->displacement.back(), source_.shape());
  return compose_characteristics(report.cache->velocity, time_, source_.shape());
}

double RegistrationProblem::min_jacobian_determinant(const GradientReport& report) const {
  if (!report.cache) throw InvalidState("report carries no forward pass");
  if (variant_ == Variant::State) return geoshoot::min_jacobian_determinant(recovered_displacement(report));

  // phi(1) = id + iota(u) is band-limited, so its Jacobian is exact in the spectral domain.
  const int d = band().dims();
  const auto J = include(spectral_jacobian(report.cache->displacement.back(), ops_), source_.shape());
  double lowest = std::numeric_limits<double>::infinity();
  const std::size_t count = source_.size();
  for (std::size_t n = 0; n < count; ++n) {
    double a[3][3] = {};
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) a[i][j] = (i == j ? 1.0 : 0.0) + J.component(i * d + j)[n];
    }
    const double det = d == 2 ? a[0][0] * a[1][1] - a[0][1] * a[1][0]
                              : a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                                    a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                                    a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    lowest = std::min(lowest, det);
  }
  return lowest;
}

Footprint RegistrationProblem::footprint(const GradientReport& report) const {
  if (!report.cache) throw InvalidState("report carries no forward pass");
  const ForwardCache& c = *report.cache;
  Footprint f;
  f.velocity_fields = c.velocity.nodes.size() + c.velocity.rates.size();
  f.band_coefficients = c.velocity.coefficient_count() + c.displacement.coefficient_count();
  // Backward cotangents: v alone for the state variant, v and u for the deformation variant.
  const std::size_t field = BandLimitedField::zeros(band()).size();
  f.band_coefficients += variant_ == Variant::State ? field : 2 * field;
  for (const auto& m : c.images) f.grid_scalars += m.size();
  f.grid_scalars += c.final_gradient.data().size();
  // The state adjoint carries a full-grid image costate.
  if (variant_ == Variant::State) f.grid_scalars += source_.size();
  return f;
}

}  // namespace geoshoot
