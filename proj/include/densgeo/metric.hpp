#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "densgeo/calculus.hpp"
#include "densgeo/density.hpp"
#include "densgeo/space.hpp"

namespace densgeo {

// Step for central finite differences in the base measure: small relative to
// the distance at which μ ± t·dir leaves the positive cone.
inline double default_fd_step(const Density& mu, const TangentVector& dir) {
  const double sup = radon_nikodym(dir, mu).cwiseAbs().maxCoeff();
  return sup == 0.0 ? 1e-5 : 1e-5 / sup;
}

// A regular metric: the family of tangent-space automorphisms Φ_μ whose
// Fisher-Rao pairing G_μ(ν¹, ν²) = ⟨Φ_μ(ν¹), ν²⟩^FR defines the metric.
// Implementations must keep Φ_μ self-adjoint and positive with respect to
// the Fisher-Rao inner product.
class RegularMetricModel {
 public:
  virtual ~RegularMetricModel() = default;

  virtual std::string name() const = 0;
  virtual TangentVector phi(const Density& mu, const TangentVector& nu) const = 0;
  virtual TangentVector phi_inverse(const Density& mu, const TangentVector& nu) const = 0;

  // Gâteaux derivative of μ ↦ Φ_μ(arg) in direction dir: closed form when
  // the model provides one, central finite difference otherwise (fd_step ≤ 0
  // selects default_fd_step).
  virtual TangentVector gateaux_phi(const Density& mu, const TangentVector& dir,
                                    const TangentVector& arg, double fd_step = 0.0) const = 0;

  // Whether gateaux_phi is exact (no finite-difference truncation) on the
  // given space.
  virtual bool has_closed_gateaux(const Space& sp) const = 0;
};

// G(ν¹, ν²) = ⟨Φ(ν¹), ν²⟩^FR.
inline double metric_inner(const RegularMetricModel& model, const Density& mu,
                           const TangentVector& nu1, const TangentVector& nu2) {
  return fisher_rao_inner(mu, model.phi(mu, nu1), nu2);
}

inline double metric_norm(const RegularMetricModel& model, const Density& mu,
                          const TangentVector& nu) {
  return std::sqrt(std::max(metric_inner(model, mu, nu, nu), 0.0));
}

// Central finite difference (Φ_{μ+t·dir}(arg) − Φ_{μ−t·dir}(arg)) / (2t).
// The output is recentered against μ unconditionally: the difference
// quotient divides round-off-level mass by the step.
inline TangentVector gateaux_phi_fd(const RegularMetricModel& model, const Density& mu,
                                    const TangentVector& dir, const TangentVector& arg,
                                    double step) {
  require_same_space(mu.space(), dir.space(), "gateaux_phi_fd");
  require_same_space(mu.space(), arg.space(), "gateaux_phi_fd");
  if (!(step > 0.0)) {
    throw std::invalid_argument("gateaux_phi_fd: step must be positive");
  }
  const ScalarField rp = mu.rho() + step * dir.density();
  const ScalarField rm = mu.rho() - step * dir.density();
  if ((rp.array() <= 0.0).any() || (rm.array() <= 0.0).any()) {
    throw std::runtime_error("gateaux_phi_fd: perturbed measure leaves the positive cone");
  }
  const TangentVector pp = model.phi(Density(mu.space_ptr(), rp), arg);
  const TangentVector pm = model.phi(Density(mu.space_ptr(), rm), arg);
  return recenter_tangent(mu, (pp.density() - pm.density()) / (2.0 * step));
}

// Exact derivative of μ ↦ Φ^O_μ(arg) in direction dir for the variational
// Laplacian, which is linear in the masses of μ: writing h = Δ_μ⁻¹(d arg/dμ),
// the potential derivative solves Δ_μ ḣ = −(1/m)·(dΔ edge form with the
// perturbation masses applied to h), shifted so ∫h_t dμ_t stays zero, and
// d/dt(−h_t ρ_t) = −(ḣ ρ + h·d dir/d vol).
inline TangentVector otto_gateaux_closed(const Density& mu, const TangentVector& dir,
                                         const TangentVector& arg) {
  const Space& sp = mu.space();
  require_same_space(sp, dir.space(), "otto_gateaux_closed");
  require_same_space(sp, arg.space(), "otto_gateaux_closed");
  if (sp.is_grid() && sp.style() == LaplacianStyle::Compositional) {
    throw std::logic_error(
        "otto_gateaux_closed: no closed form for the compositional style; use gateaux_phi_fd");
  }
  const ScalarField& m = mu.masses();
  const ScalarField a = radon_nikodym(dir, mu);
  const ScalarField b = radon_nikodym(arg, mu);
  const ScalarField h = solve_mu_laplacian(mu, b);
  const ScalarField pert_masses = dir.density().cwiseProduct(sp.volumes());
  const ScalarField rhs = -detail::edge_form(sp, pert_masses, h).cwiseQuotient(m);
  ScalarField hdot = solve_mu_laplacian(mu, rhs);
  hdot.array() -= h.cwiseProduct(a).dot(m);
  const ScalarField raw = -(hdot.cwiseProduct(mu.rho()) + h.cwiseProduct(dir.density()));
  return recenter_tangent_checked(mu, raw, 1e-10, "otto_gateaux_closed");
}

// Fisher-Rao metric: Φ = identity, so the metric is the L²(μ) pairing of
// Radon-Nikodym derivatives and Φ does not depend on μ.
class FisherRaoModel final : public RegularMetricModel {
 public:
  std::string name() const override { return "fisher_rao"; }

  TangentVector phi(const Density& mu, const TangentVector& nu) const override {
    require_same_space(mu.space(), nu.space(), "FisherRaoModel::phi");
    return nu;
  }

  TangentVector phi_inverse(const Density& mu, const TangentVector& nu) const override {
    require_same_space(mu.space(), nu.space(), "FisherRaoModel::phi_inverse");
    return nu;
  }

  TangentVector gateaux_phi(const Density& mu, const TangentVector& dir,
                            const TangentVector& arg, double /*fd_step*/ = 0.0) const override {
    require_same_space(mu.space(), dir.space(), "FisherRaoModel::gateaux_phi");
    require_same_space(mu.space(), arg.space(), "FisherRaoModel::gateaux_phi");
    return TangentVector::zero(mu.space_ptr());
  }

  bool has_closed_gateaux(const Space&) const override { return true; }
};

// Otto metric: Φ_μ = −ı_μ ∘ Δ_μ⁻¹ ∘ ı_μ⁻¹, the metric underlying Wasserstein
// gradient flows. The style parameter must match the Laplacian style of the
// spaces the model acts on.
class OttoModel final : public RegularMetricModel {
 public:
  explicit OttoModel(LaplacianStyle style) : style_(style) {}

  std::string name() const override { return "otto"; }
  LaplacianStyle style() const { return style_; }

  TangentVector phi(const Density& mu, const TangentVector& nu) const override {
    require_same_space(mu.space(), nu.space(), "OttoModel::phi");
    check_style(mu.space(), "OttoModel::phi");
    const ScalarField h = solve_mu_laplacian(mu, radon_nikodym(nu, mu));
    return recenter_tangent_checked(mu, (-h).cwiseProduct(mu.rho()), 1e-10, "OttoModel::phi");
  }

  TangentVector phi_inverse(const Density& mu, const TangentVector& nu) const override {
    require_same_space(mu.space(), nu.space(), "OttoModel::phi_inverse");
    check_style(mu.space(), "OttoModel::phi_inverse");
    const ScalarField q = mu_laplacian(mu, radon_nikodym(nu, mu));
    return recenter_tangent_checked(mu, (-q).cwiseProduct(mu.rho()), 1e-10,
                                    "OttoModel::phi_inverse");
  }

  TangentVector gateaux_phi(const Density& mu, const TangentVector& dir,
                            const TangentVector& arg, double fd_step = 0.0) const override {
    check_style(mu.space(), "OttoModel::gateaux_phi");
    if (has_closed_gateaux(mu.space())) {
      return otto_gateaux_closed(mu, dir, arg);
    }
    const double step = fd_step > 0.0 ? fd_step : default_fd_step(mu, dir);
    return gateaux_phi_fd(*this, mu, dir, arg, step);
  }

  bool has_closed_gateaux(const Space& sp) const override {
    return !sp.is_grid() || sp.style() == LaplacianStyle::Variational;
  }

 private:
  void check_style(const Space& sp, const char* where) const {
    const LaplacianStyle space_style =
        sp.is_grid() ? sp.style() : LaplacianStyle::Variational;
    if (space_style != style_) {
      throw std::invalid_argument(std::string(where) +
                                  ": the model's Laplacian style does not match the space's");
    }
  }

  LaplacianStyle style_;
};

// Dirichlet-form evaluation of the Otto inner product,
// ∫ ⟨grad Δ_μ⁻¹a, grad Δ_μ⁻¹b⟩ dμ; agrees with metric_inner exactly on
// graphs, to O(h²) on grids.
inline double otto_inner_via_dirichlet(const Density& mu, const TangentVector& nu1,
                                       const TangentVector& nu2) {
  const Space& sp = mu.space();
  require_same_space(sp, nu1.space(), "otto_inner_via_dirichlet");
  require_same_space(sp, nu2.space(), "otto_inner_via_dirichlet");
  const ScalarField h1 = solve_mu_laplacian(mu, radon_nikodym(nu1, mu));
  const ScalarField h2 = solve_mu_laplacian(mu, radon_nikodym(nu2, mu));
  return mu.integrate(pointwise_inner(mu, gradient(sp, h1), gradient(sp, h2)));
}

}  // namespace densgeo
