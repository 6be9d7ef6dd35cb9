#include "geoshoot/lie.hpp"

#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace geoshoot {
namespace {

using Samples = std::vector<double>;

// A vector field and its Jacobian sampled on the alias-free product grid.
// grad[i * d + j] holds d f_i / d x_j.
struct Lifted {
  std::vector<Samples> value;
  std::vector<Samples> grad;
};

void require_vector(const BandLimitedField& f, const SpectralOperators& ops, const char* op) {
  if (!(f.band() == ops.band())) {
    throw std::invalid_argument(std::string(op) + ": band mismatch (" +
                                f.band().band_sizes().str() + " vs " +
                                ops.band().band_sizes().str() + ")");
  }
  if (f.components() != ops.band().dims()) {
    throw std::invalid_argument(std::string(op) + ": expected a vector field");
  }
}

Lifted lift(const BandLimitedField& f, const SpectralOperators& ops) {
  const auto map = detail::product_map(ops.band());
  const int d = ops.band().dims();
  const std::size_t n = ops.band().count();
  const std::size_t p = map->grid_count();

  Lifted out;
  out.value.assign(static_cast<std::size_t>(d), Samples(p));
  out.grad.assign(static_cast<std::size_t>(d * d), Samples(p));
  std::vector<Complex> deriv(n);
  for (int i = 0; i < d; ++i) {
    auto c = f.component(i);
    map->to_real_samples(c, out.value[static_cast<std::size_t>(i)]);
    for (int j = 0; j < d; ++j) {
      auto w = ops.wavenumber(j);
      for (std::size_t k = 0; k < n; ++k) deriv[k] = Complex(0.0, w[k]) * c[k];
      map->to_real_samples(deriv, out.grad[static_cast<std::size_t>(i * d + j)]);
    }
  }
  return out;
}

// Accumulates pointwise products on the product grid; one projection at the end.
class Accumulator {
 public:
  explicit Accumulator(const SpectralOperators& ops)
      : ops_(ops), map_(detail::product_map(ops.band())), d_(ops.band().dims()) {
    sum_.assign(static_cast<std::size_t>(d_), Samples(map_->grid_count(), 0.0));
  }

  // sign * (Da b - Db a)
  void add_ad(const Lifted& a, const Lifted& b, double sign) {
    const std::size_t p = map_->grid_count();
    for (int i = 0; i < d_; ++i) {
      auto& out = sum_[static_cast<std::size_t>(i)];
      for (int j = 0; j < d_; ++j) {
        const auto& da = a.grad[static_cast<std::size_t>(i * d_ + j)];
        const auto& db = b.grad[static_cast<std::size_t>(i * d_ + j)];
        const auto& aj = a.value[static_cast<std::size_t>(j)];
        const auto& bj = b.value[static_cast<std::size_t>(j)];
        for (std::size_t x = 0; x < p; ++x) out[x] += sign * (da[x] * bj[x] - db[x] * aj[x]);
      }
    }
  }

  // sign * [(Dv)^T m + (Dm) v + m div v], with m = L w already lifted.
  void add_coadjoint(const Lifted& v, const Lifted& m, double sign) {
    const std::size_t p = map_->grid_count();
    Samples div(p, 0.0);
    for (int j = 0; j < d_; ++j) {
      const auto& g = v.grad[static_cast<std::size_t>(j * d_ + j)];
      for (std::size_t x = 0; x < p; ++x) div[x] += g[x];
    }
    for (int i = 0; i < d_; ++i) {
      auto& out = sum_[static_cast<std::size_t>(i)];
      const auto& mi = m.value[static_cast<std::size_t>(i)];
      for (std::size_t x = 0; x < p; ++x) out[x] += sign * mi[x] * div[x];
      for (int j = 0; j < d_; ++j) {
        const auto& dvj_i = v.grad[static_cast<std::size_t>(j * d_ + i)];
        const auto& mj = m.value[static_cast<std::size_t>(j)];
        const auto& dmi_j = m.grad[static_cast<std::size_t>(i * d_ + j)];
        const auto& vj = v.value[static_cast<std::size_t>(j)];
        for (std::size_t x = 0; x < p; ++x) out[x] += sign * (dvj_i[x] * mj[x] + dmi_j[x] * vj[x]);
      }
    }
  }

  // sign * Du v
  void add_jacobian_action(const Lifted& u, const Lifted& v, double sign) {
    const std::size_t p = map_->grid_count();
    for (int i = 0; i < d_; ++i) {
      auto& out = sum_[static_cast<std::size_t>(i)];
      for (int j = 0; j < d_; ++j) {
        const auto& du = u.grad[static_cast<std::size_t>(i * d_ + j)];
        const auto& vj = v.value[static_cast<std::size_t>(j)];
        for (std::size_t x = 0; x < p; ++x) out[x] += sign * du[x] * vj[x];
      }
    }
  }

  // sign * r div v
  void add_divergence_scaling(const Lifted& r, const Lifted& v, double sign) {
    const std::size_t p = map_->grid_count();
    Samples div(p, 0.0);
    for (int j = 0; j < d_; ++j) {
      const auto& g = v.grad[static_cast<std::size_t>(j * d_ + j)];
      for (std::size_t x = 0; x < p; ++x) div[x] += g[x];
    }
    for (int i = 0; i < d_; ++i) {
      auto& out = sum_[static_cast<std::size_t>(i)];
      const auto& ri = r.value[static_cast<std::size_t>(i)];
      for (std::size_t x = 0; x < p; ++x) out[x] += sign * ri[x] * div[x];
    }
  }

  // sign * (Du)^T r
  void add_jacobian_transpose_action(const Lifted& u, const Lifted& r, double sign) {
    const std::size_t p = map_->grid_count();
    for (int j = 0; j < d_; ++j) {
      auto& out = sum_[static_cast<std::size_t>(j)];
      for (int i = 0; i < d_; ++i) {
        const auto& du = u.grad[static_cast<std::size_t>(i * d_ + j)];
        const auto& ri = r.value[static_cast<std::size_t>(i)];
        for (std::size_t x = 0; x < p; ++x) out[x] += sign * du[x] * ri[x];
      }
    }
  }

  BandLimitedField project() const {
    BandLimitedField out = BandLimitedField::zeros(ops_.band());
    for (int i = 0; i < d_; ++i) {
      map_->real_to_coefficients(sum_[static_cast<std::size_t>(i)], out.component(i));
    }
    out.symmetrize();
    return out;
  }

  BandLimitedField project_K() const { return apply_K(project(), ops_); }

 private:
  const SpectralOperators& ops_;
  std::shared_ptr<const detail::SpectralGridMap> map_;
  int d_;
  std::vector<Samples> sum_;
};

}  // namespace

BandLimitedField ad(const BandLimitedField& v, const BandLimitedField& w,
                    const SpectralOperators& ops) {
  require_vector(v, ops, "ad");
  require_vector(w, ops, "ad");
  Accumulator acc(ops);
  acc.add_ad(lift(v, ops), lift(w, ops), 1.0);
  return acc.project();
}

BandLimitedField ad_dagger(const BandLimitedField& v, const BandLimitedField& w,
                           const SpectralOperators& ops) {
  require_vector(v, ops, "ad_dagger");
  require_vector(w, ops, "ad_dagger");
  Accumulator acc(ops);
  acc.add_coadjoint(lift(v, ops), lift(apply_L(w, ops), ops), 1.0);
  return acc.project_K();
}

BandLimitedField epdiff_rhs(const BandLimitedField& v, const SpectralOperators& ops) {
  require_vector(v, ops, "epdiff_rhs");
  Accumulator acc(ops);
  acc.add_coadjoint(lift(v, ops), lift(apply_L(v, ops), ops), -1.0);
  return acc.project_K();
}

JacobiCostate adjoint_jacobi_rhs(const BandLimitedField& v, const BandLimitedField& U,
                                 const BandLimitedField& delta_v, const SpectralOperators& ops) {
  require_vector(v, ops, "adjoint_jacobi_rhs");
  require_vector(U, ops, "adjoint_jacobi_rhs");
  require_vector(delta_v, ops, "adjoint_jacobi_rhs");

  const Lifted lv = lift(v, ops);
  const Lifted ldv = lift(delta_v, ops);

  Accumulator du(ops);
  du.add_coadjoint(lv, lift(apply_L(U, ops), ops), -1.0);

  Accumulator bracket(ops);
  bracket.add_ad(lv, ldv, 1.0);
  Accumulator coad(ops);
  coad.add_coadjoint(ldv, lift(apply_L(v, ops), ops), 1.0);

  JacobiCostate rates{du.project_K(), bracket.project()};
  rates.delta_v -= coad.project_K();
  rates.delta_v -= U;
  return rates;
}

BandLimitedField incremental_epdiff_rhs_transpose(const BandLimitedField& v, const BandLimitedField& w,
                                                  const SpectralOperators& ops) {
  require_vector(v, ops, "incremental_epdiff_rhs_transpose");
  require_vector(w, ops, "incremental_epdiff_rhs_transpose");
  const Lifted lv = lift(v, ops);
  const Lifted lw = lift(w, ops);
  Accumulator coad(ops);
  coad.add_coadjoint(lw, lift(apply_L(v, ops), ops), 1.0);
  Accumulator bracket(ops);
  bracket.add_ad(lv, lw, 1.0);
  BandLimitedField out = coad.project_K();
  out -= bracket.project();
  return out;
}

BandLimitedField jacobian_action(const BandLimitedField& u, const BandLimitedField& v,
                                 const SpectralOperators& ops) {
  require_vector(u, ops, "jacobian_action");
  require_vector(v, ops, "jacobian_action");
  Accumulator acc(ops);
  acc.add_jacobian_action(lift(u, ops), lift(v, ops), 1.0);
  return acc.project();
}

BandLimitedField jacobian_action_transpose(const BandLimitedField& v, const BandLimitedField& r,
                                           const SpectralOperators& ops) {
  require_vector(v, ops, "jacobian_action_transpose");
  require_vector(r, ops, "jacobian_action_transpose");
  const Lifted lv = lift(v, ops);
  const Lifted lr = lift(r, ops);
  Accumulator acc(ops);
  acc.add_jacobian_action(lr, lv, -1.0);
  acc.add_divergence_scaling(lr, lv, -1.0);
  return acc.project();
}

BandLimitedField jacobian_transpose_action(const BandLimitedField& u, const BandLimitedField& r,
                                           const SpectralOperators& ops) {
  require_vector(u, ops, "jacobian_transpose_action");
  require_vector(r, ops, "jacobian_transpose_action");
  Accumulator acc(ops);
  acc.add_jacobian_transpose_action(lift(u, ops), lift(r, ops), 1.0);
  return acc.project();
}

BandLimitedField incremental_epdiff_rhs(const BandLimitedField& v, const BandLimitedField& delta_v,
                                        const SpectralOperators& ops) {
  require_vector(v, ops, "incremental_epdiff_rhs");
  require_vector(delta_v, ops, "incremental_epdiff_rhs");
  Accumulator acc(ops);
  acc.add_coadjoint(lift(delta_v, ops), lift(apply_L(v, ops), ops), -1.0);
  acc.add_coadjoint(lift(v, ops), lift(apply_L(delta_v, ops), ops), -1.0);
  return acc.project_K();
}

JacobiCostate incremental_adjoint_jacobi_rhs(const BandLimitedField& v,
                                             const BandLimitedField& delta_v,
                                             const BandLimitedField& w, const BandLimitedField& U,
                                             const BandLimitedField& delta_U,
                                             const BandLimitedField& delta_w,
                                             const SpectralOperators& ops) {
  for (const auto* f : {&v, &delta_v, &w, &U, &delta_U, &delta_w}) {
    require_vector(*f, ops, "incremental_adjoint_jacobi_rhs");
  }
  const Lifted lv = lift(v, ops);
  const Lifted ldv = lift(delta_v, ops);
  const Lifted ldw = lift(delta_w, ops);
  const Lifted lw = lift(w, ops);

  Accumulator d_du(ops);
  d_du.add_coadjoint(ldv, lift(apply_L(U, ops), ops), -1.0);
  d_du.add_coadjoint(lv, lift(apply_L(delta_U, ops), ops), -1.0);

  Accumulator bracket(ops);
  bracket.add_ad(ldv, lw, 1.0);
  bracket.add_ad(lv, ldw, 1.0);

  Accumulator coad(ops);
  coad.add_coadjoint(ldw, lift(apply_L(v, ops), ops), 1.0);
  coad.add_coadjoint(lw, lift(apply_L(delta_v, ops), ops), 1.0);

  JacobiCostate rates{d_du.project_K(), bracket.project()};
  rates.delta_v -= coad.project_K();
  rates.delta_v -= delta_U;
  return rates;
}

}  // namespace geoshoot
