#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "densgeo/calculus.hpp"
#include "densgeo/density.hpp"
#include "densgeo/metric.hpp"
#include "densgeo/space.hpp"

namespace densgeo {

// K-tensor of a regular metric: the unique tensor with
// G(K(A,B), C) = (mixture derivative of G)(A; B, C). Computed from the
// representer r = (dA/dμ)·Φ(B) − ∂_A Φ(B); r may carry total mass, so the
// centered representative r − (∫r)·μ is used before inverting Φ (the
// Fisher-Rao pairing of μ against tangent vectors vanishes, so the induced
// functional is unchanged).
inline TangentVector k_tensor(const RegularMetricModel& model, const Density& mu,
                              const TangentVector& A, const TangentVector& B,
                              double fd_step = 0.0) {
  require_same_space(mu.space(), A.space(), "k_tensor");
  require_same_space(mu.space(), B.space(), "k_tensor");
  const ScalarField a = radon_nikodym(A, mu);
  const TangentVector phiB = model.phi(mu, B);
  const TangentVector dphi = model.gateaux_phi(mu, A, B, fd_step);
  const TangentVector centered =
      recenter_tangent(mu, a.cwiseProduct(phiB.density()) - dphi.density());
  return model.phi_inverse(mu, centered);
}

// Generalized Amari-Chentsov tensor 𝒜(A; B, C) = G(K(A,B), C).
inline double amari_tensor(const RegularMetricModel& model, const Density& mu,
                           const TangentVector& A, const TangentVector& B,
                           const TangentVector& C) {
  return metric_inner(model, mu, k_tensor(model, mu, A, B), C);
}

// Christoffel operator of the α-connection in the mixture chart:
// Γ^α(A, B) = −(α+1)/2 · K(A, B); α = −1 is the flat mixture connection.
inline TangentVector alpha_gamma(const RegularMetricModel& model, double alpha,
                                 const Density& mu, const TangentVector& A,
                                 const TangentVector& B) {
  if (alpha == -1.0) {
    return TangentVector::zero(mu.space_ptr());
  }
  return k_tensor(model, mu, A, B) * (-0.5 * (alpha + 1.0));
}

// Torsion of the α-connection on constant fields:
// Tor^α(A, B) = (α+1)/2 · (K(B,A) − K(A,B)).
inline TangentVector torsion(const RegularMetricModel& model, double alpha, const Density& mu,
                             const TangentVector& A, const TangentVector& B) {
  if (alpha == -1.0) {
    return TangentVector::zero(mu.space_ptr());
  }
  return (k_tensor(model, mu, B, A) - k_tensor(model, mu, A, B)) * (0.5 * (alpha + 1.0));
}

// Gram matrix of the metric on the tangent basis of density.hpp; symmetric
// positive-definite for a valid regular metric.
inline Eigen::MatrixXd gram_matrix(const RegularMetricModel& model, const Density& mu,
                                   const std::vector<TangentVector>& basis) {
  const int d = static_cast<int>(basis.size());
  Eigen::MatrixXd g(d, d);
  for (int k = 0; k < d; ++k) {
    const TangentVector pk = model.phi(mu, basis[static_cast<std::size_t>(k)]);
    for (int l = 0; l < d; ++l) {
      g(k, l) = fisher_rao_inner(mu, pk, basis[static_cast<std::size_t>(l)]);
    }
  }
  return g;
}

inline Eigen::MatrixXd gram_matrix(const RegularMetricModel& model, const Density& mu) {
  return gram_matrix(model, mu, tangent_basis(mu.space_ptr()));
}

// D-tensor: the symmetric tensor with G(D(A,B), C) = 𝒜(C; A, B), extracted
// by a dense solve against the tangent basis. The right-hand side is
// symmetrized in (A, B), which makes D (and hence the Levi-Civita formula
// below) symmetric bitwise. Capped at 512 vertices.
inline TangentVector d_tensor(const RegularMetricModel& model, const Density& mu,
                              const TangentVector& A, const TangentVector& B) {
  const int n = mu.size();
  if (n > 512) {
    throw std::runtime_error("d_tensor: dense basis extraction is capped at 512 vertices");
  }
  const std::vector<TangentVector> basis = tangent_basis(mu.space_ptr());
  const Eigen::MatrixXd g = gram_matrix(model, mu, basis);
  Eigen::VectorXd t(n - 1);
  for (int k = 0; k < n - 1; ++k) {
    const TangentVector& bk = basis[static_cast<std::size_t>(k)];
    t[k] =
        0.5 * (amari_tensor(model, mu, bk, A, B) + amari_tensor(model, mu, bk, B, A));
  }
  const Eigen::VectorXd x = Eigen::PartialPivLU<Eigen::MatrixXd>(g).solve(t);
  ScalarField out = ScalarField::Zero(n);
  for (int k = 0; k < n - 1; ++k) {
    out += x[k] * basis[static_cast<std::size_t>(k)].density();
  }
  return TangentVector::from_raw(mu.space_ptr(), std::move(out));
}

// Levi-Civita connection of a regular metric in the mixture chart:
// Γ^LC(A, B) = −½K(A,B) − ½K(B,A) + ½D(A,B); torsion-free by construction.
inline TangentVector levi_civita_gamma(const RegularMetricModel& model, const Density& mu,
                                       const TangentVector& A, const TangentVector& B) {
  return k_tensor(model, mu, A, B) * (-0.5) + k_tensor(model, mu, B, A) * (-0.5) +
         d_tensor(model, mu, A, B) * 0.5;
}

enum class ConnectionVariant { AlphaFamily, LeviCivita, Mixture };

// A connection on the density manifold: a member of a metric's α-family, its
// Levi-Civita connection, or the flat mixture connection (Γ ≡ 0).
struct ConnectionSpec {
  std::shared_ptr<const RegularMetricModel> model;
  double alpha = 1.0;
  ConnectionVariant variant = ConnectionVariant::AlphaFamily;

  static ConnectionSpec alpha_family(std::shared_ptr<const RegularMetricModel> m, double a) {
    if (!m) {
      throw std::invalid_argument("ConnectionSpec::alpha_family: null model");
    }
    return ConnectionSpec{std::move(m), a, ConnectionVariant::AlphaFamily};
  }
  static ConnectionSpec levi_civita(std::shared_ptr<const RegularMetricModel> m) {
    if (!m) {
      throw std::invalid_argument("ConnectionSpec::levi_civita: null model");
    }
    return ConnectionSpec{std::move(m), 0.0, ConnectionVariant::LeviCivita};
  }
  static ConnectionSpec mixture() {
    return ConnectionSpec{nullptr, -1.0, ConnectionVariant::Mixture};
  }
};

inline TangentVector connection_gamma(const ConnectionSpec& spec, const Density& mu,
                                      const TangentVector& X, const TangentVector& Y) {
  switch (spec.variant) {
    case ConnectionVariant::Mixture:
      return TangentVector::zero(mu.space_ptr());
    case ConnectionVariant::LeviCivita:
      return levi_civita_gamma(*spec.model, mu, X, Y);
    case ConnectionVariant::AlphaFamily:
      return alpha_gamma(*spec.model, spec.alpha, mu, X, Y);
  }
  throw std::logic_error("connection_gamma: unknown connection variant");
}

// Closed-form Otto tensors. Derived for the compositional grid calculus,
// where they agree with the definitional K and torsion exactly and with the
// definitional A and D to O(h²); on graphs they match only for uniform μ.
// All outputs are centered representatives (the raw formulas carry O(h²)
// total mass on grids).

inline TangentVector k_otto_closed(const Density& mu, const TangentVector& A,
                                   const TangentVector& B) {
  const Space& sp = mu.space();
  const ScalarField a = radon_nikodym(A, mu);
  const ScalarField b = radon_nikodym(B, mu);
  const ScalarField h = solve_mu_laplacian(mu, b);
  const ScalarField q =
      a.cwiseProduct(b) + pointwise_inner(mu, gradient(sp, h), gradient(sp, a));
  return recenter_tangent(mu, q.cwiseProduct(mu.rho()));
}

inline double amari_otto_closed(const Density& mu, const TangentVector& A,
                                const TangentVector& B, const TangentVector& C) {
  const Space& sp = mu.space();
  const ScalarField a = radon_nikodym(A, mu);
  const ScalarField hb = solve_mu_laplacian(mu, radon_nikodym(B, mu));
  const ScalarField hc = solve_mu_laplacian(mu, radon_nikodym(C, mu));
  const ScalarField q = pointwise_inner(mu, gradient(sp, hb), gradient(sp, hc));
  return mu.integrate(a.cwiseProduct(q));
}

inline TangentVector torsion_otto_closed(double alpha, const Density& mu,
                                         const TangentVector& A, const TangentVector& B) {
  const Space& sp = mu.space();
  const ScalarField a = radon_nikodym(A, mu);
  const ScalarField b = radon_nikodym(B, mu);
  const ScalarField ha = solve_mu_laplacian(mu, a);
  const ScalarField hb = solve_mu_laplacian(mu, b);
  const ScalarField q = pointwise_inner(mu, gradient(sp, ha), gradient(sp, b)) -
                        pointwise_inner(mu, gradient(sp, hb), gradient(sp, a));
  return recenter_tangent(mu, q.cwiseProduct(mu.rho())) * (0.5 * (alpha + 1.0));
}

inline TangentVector d_otto_closed(const Density& mu, const TangentVector& A,
                                   const TangentVector& B) {
  const Space& sp = mu.space();
  const ScalarField ha = solve_mu_laplacian(mu, radon_nikodym(A, mu));
  const ScalarField hb = solve_mu_laplacian(mu, radon_nikodym(B, mu));
  const ScalarField q = pointwise_inner(mu, gradient(sp, ha), gradient(sp, hb));
  const ScalarField out = -mu_laplacian(mu, q);
  return recenter_tangent(mu, out.cwiseProduct(mu.rho()));
}

inline TangentVector lc_otto_closed(const Density& mu, const TangentVector& A,
                                    const TangentVector& B) {
  const Space& sp = mu.space();
  const ScalarField a = radon_nikodym(A, mu);
  const ScalarField b = radon_nikodym(B, mu);
  const ScalarField ha = solve_mu_laplacian(mu, a);
  const ScalarField hb = solve_mu_laplacian(mu, b);
  const ScalarField q =
      2.0 * a.cwiseProduct(b) +
      mu_laplacian(mu, pointwise_inner(mu, gradient(sp, ha), gradient(sp, hb))) +
      pointwise_inner(mu, gradient(sp, ha), gradient(sp, b)) +
      pointwise_inner(mu, gradient(sp, a), gradient(sp, hb));
  return recenter_tangent(mu, q.cwiseProduct(mu.rho())) * (-0.5);
}

namespace detail {

inline Density perturbed_density(const Density& mu, const TangentVector& dir, double t,
                                 const char* where) {
  const ScalarField rho = mu.rho() + t * dir.density();
  if ((rho.array() <= 0.0).any()) {
    throw std::runtime_error(std::string(where) + ": perturbed density leaves the positive cone");
  }
  return Density(mu.space_ptr(), rho);
}

}  // namespace detail

// Curvature R(A,B)C of a connection with constant coefficient fields in the
// mixture chart (vanishing bracket):
// ∂_A Γ(B,C) − ∂_B Γ(A,C) + Γ(A, Γ(B,C)) − Γ(B, Γ(A,C)), the ∂ terms by
// central differences in the chart. Output recentered unconditionally.
inline TangentVector curvature_fd(const ConnectionSpec& spec, const Density& mu,
                                  const TangentVector& A, const TangentVector& B,
                                  const TangentVector& C, double step = 1e-5) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("curvature_fd: step must be positive");
  }
  const auto dgamma = [&](const TangentVector& dir, const TangentVector& X,
                          const TangentVector& Y) {
    const Density mp = detail::perturbed_density(mu, dir, step, "curvature_fd");
    const Density mm = detail::perturbed_density(mu, dir, -step, "curvature_fd");
    const TangentVector gp = connection_gamma(spec, mp, X, Y);
    const TangentVector gm = connection_gamma(spec, mm, X, Y);
    return TangentVector::from_raw(mu.space_ptr(),
                                   (gp.density() - gm.density()) / (2.0 * step));
  };
  const TangentVector gBC = connection_gamma(spec, mu, B, C);
  const TangentVector gAC = connection_gamma(spec, mu, A, C);
  const TangentVector out = dgamma(A, B, C) - dgamma(B, A, C) +
                            connection_gamma(spec, mu, A, gBC) -
                            connection_gamma(spec, mu, B, gAC);
  return recenter_tangent(mu, out.density());
}

// Conjugacy residual |A G(B,C) − G(Γ^α(A,B), C) − G(B, Γ^{−α}(A,C))| with the
// directional derivative computed by central differences in the chart.
inline double duality_residual(const RegularMetricModel& model, double alpha, const Density& mu,
                               const TangentVector& A, const TangentVector& B,
                               const TangentVector& C, double step = 1e-5) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("duality_residual: step must be positive");
  }
  const Density mp = detail::perturbed_density(mu, A, step, "duality_residual");
  const Density mm = detail::perturbed_density(mu, A, -step, "duality_residual");
  const double dg = (metric_inner(model, mp, B, C) - metric_inner(model, mm, B, C)) / (2.0 * step);
  const TangentVector nb = alpha_gamma(model, alpha, mu, A, B);
  const TangentVector nc = alpha_gamma(model, -alpha, mu, A, C);
  return std::abs(dg - metric_inner(model, mu, nb, C) - metric_inner(model, mu, B, nc));
}

// Metric-compatibility residual of the Levi-Civita connection,
// |A G(B,C) − G(Γ^LC(A,B), C) − G(B, Γ^LC(A,C))|.
inline double lc_compatibility_residual(const RegularMetricModel& model, const Density& mu,
                                        const TangentVector& A, const TangentVector& B,
                                        const TangentVector& C, double step = 1e-5) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("lc_compatibility_residual: step must be positive");
  }
  const Density mp = detail::perturbed_density(mu, A, step, "lc_compatibility_residual");
  const Density mm = detail::perturbed_density(mu, A, -step, "lc_compatibility_residual");
  const double dg = (metric_inner(model, mp, B, C) - metric_inner(model, mm, B, C)) / (2.0 * step);
  const TangentVector nb = levi_civita_gamma(model, mu, A, B);
  const TangentVector nc = levi_civita_gamma(model, mu, A, C);
  return std::abs(dg - metric_inner(model, mu, nb, C) - metric_inner(model, mu, B, nc));
}

}  // namespace densgeo
