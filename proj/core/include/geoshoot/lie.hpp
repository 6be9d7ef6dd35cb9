#pragma once

#include "geoshoot/field.hpp"
#include "geoshoot/spectral.hpp"

namespace geoshoot {

/// Adjoint Jacobi pair: the transported costate U and the Jacobi variable
/// (the gradient being carried to t = 0).
struct JacobiCostate {
  BandLimitedField U;
  BandLimitedField delta_v;
};

/// Lie bracket on band-limited fields: Dv * w - Dw * v, products truncated to the band.
BandLimitedField ad(const BandLimitedField& v, const BandLimitedField& w,
                    const SpectralOperators& ops);

/// Metric adjoint of ad_v: K[(Dv)^T * Lw + D(Lw) * v + Lw (div v)].
/// Satisfies <ad_dagger(v, w), u>_V = <w, ad(v, u)>_V.
BandLimitedField ad_dagger(const BandLimitedField& v, const BandLimitedField& w,
                           const SpectralOperators& ops);

/// EPDiff velocity rate: -ad_dagger(v, v).
BandLimitedField epdiff_rhs(const BandLimitedField& v, const SpectralOperators& ops);

/// Time derivatives of the reduced adjoint Jacobi system:
///   dU = -ad_dagger(v, U)
///   d(delta_v) = -U + ad(v, delta_v) - ad_dagger(delta_v, v)
JacobiCostate adjoint_jacobi_rhs(const BandLimitedField& v, const BandLimitedField& U,
                                 const BandLimitedField& delta_v, const SpectralOperators& ops);

/// Truncated Jacobian action Du * v (component i: sum_j d_j u_i * v_j); the
/// transport term of the band-limited deformation state equation.
BandLimitedField jacobian_action(const BandLimitedField& u, const BandLimitedField& v,
                                 const SpectralOperators& ops);

/// Truncated transposed action (Du)^T * r (component j: sum_i d_j u_i * r_i).
BandLimitedField jacobian_transpose_action(const BandLimitedField& u, const BandLimitedField& r,
                                           const SpectralOperators& ops);

/// L2 transpose of u -> Du * v: component i is -sum_j d_j(r_i v_j), i.e. -(Dr * v + r (div v)).
BandLimitedField jacobian_action_transpose(const BandLimitedField& v, const BandLimitedField& r,
                                           const SpectralOperators& ops);

/// Linearized EPDiff: -ad_dagger(delta_v, v) - ad_dagger(v, delta_v).
BandLimitedField incremental_epdiff_rhs(const BandLimitedField& v, const BandLimitedField& delta_v,
                                        const SpectralOperators& ops);

/// V-metric transpose of incremental_epdiff_rhs at v: ad_dagger(w, v) - ad(v, w).
BandLimitedField incremental_epdiff_rhs_transpose(const BandLimitedField& v, const BandLimitedField& w,
                                                  const SpectralOperators& ops);

/// Time derivatives of the incremental adjoint Jacobi system (returned as
/// {d delta_U, d delta_w}):
///   d delta_U = -ad_dagger(delta_v, U) - ad_dagger(v, delta_U)
///   d delta_w = -delta_U + ad(delta_v, w) + ad(v, delta_w)
///               - ad_dagger(delta_w, v) - ad_dagger(w, delta_v)
JacobiCostate incremental_adjoint_jacobi_rhs(const BandLimitedField& v,
                                             const BandLimitedField& delta_v,
                                             const BandLimitedField& w, const BandLimitedField& U,
                                             const BandLimitedField& delta_U,
                                             const BandLimitedField& delta_w,
                                             const SpectralOperators& ops);

}  // namespace geoshoot
