#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "densgeo/density.hpp"
#include "densgeo/space.hpp"

namespace densgeo {

namespace detail {

// Edge accumulation Σ_j w_ij η_ij (f_j − f_i) per vertex, with η_ij the
// arithmetic mean of the given per-vertex weights. With η built from the
// masses of μ this is m·Δ_μ; the closed-form Gâteaux derivative of the
// Laplacian re-uses it with perturbation masses, since η is linear in them.
inline ScalarField edge_form(const Space& sp, const ScalarField& eta_vertex,
                             const ScalarField& f) {
  ScalarField acc = ScalarField::Zero(sp.size());
  for (const Edge& e : sp.edges()) {
    const double t = e.weight * 0.5 * (eta_vertex[e.i] + eta_vertex[e.j]) * (f[e.j] - f[e.i]);
    acc[e.i] += t;
    acc[e.j] -= t;
  }
  return acc;
}

}  // namespace detail

// Weighted Laplacian Δ_μ f = div_μ(grad f). Variational style (graphs and
// grids): (1/m_i) Σ_j w_ij θ_ij (f_j − f_i) with θ_ij = (m_i + m_j)/2.
// Compositional style (grids): three-point Laplacian plus the drift term
// (grad f)·(grad log ρ), projected onto μ-mean-zero fields. Self-adjoint in
// L²(μ) exactly for the variational style, to O(h²) for the compositional
// one; kernel the constants either way.
inline ScalarField mu_laplacian(const Density& mu, const ScalarField& f) {
  const Space& sp = mu.space();
  if (f.size() != sp.size()) {
    throw std::invalid_argument("mu_laplacian: field length does not match the space");
  }
  if (!sp.is_grid() || sp.style() == LaplacianStyle::Variational) {
    return detail::edge_form(sp, mu.masses(), f).cwiseQuotient(mu.masses());
  }
  const double h = sp.spacing();
  const ScalarField lap_g = (cyclic_shift(f, 1) - 2.0 * f + cyclic_shift(f, -1)) / (h * h);
  const ScalarField log_rho = mu.rho().array().log().matrix();
  ScalarField q = lap_g + gradient(sp, f).cwiseProduct(gradient(sp, log_rho));
  q.array() -= mu.integrate(q);
  return q;
}

// Divergence of a discrete vector field, the formal adjoint of the gradient
// in L²(μ): ∫ f · div X dμ = −∫ ⟨grad f, X⟩ dμ. Exact for graphs and for the
// variational grid style; O(h²) for the compositional grid style (whose
// output is projected onto μ-mean-zero fields).
inline ScalarField divergence(const Density& mu, const EdgeField& X) {
  const Space& sp = mu.space();
  if (sp.is_grid()) {
    if (X.size() != sp.size()) {
      throw std::invalid_argument("divergence: grid vector field must be vertex-indexed");
    }
    if (sp.style() == LaplacianStyle::Variational) {
      const ScalarField flux = mu.rho().cwiseProduct(X);
      return (cyclic_shift(flux, 1) - cyclic_shift(flux, -1))
          .cwiseQuotient((2.0 * sp.spacing()) * mu.rho());
    }
    const ScalarField log_rho = mu.rho().array().log().matrix();
    ScalarField q = gradient(sp, X) + X.cwiseProduct(gradient(sp, log_rho));
    q.array() -= mu.integrate(q);
    return q;
  }
  if (X.size() != sp.edge_count()) {
    throw std::invalid_argument("divergence: graph vector field must be edge-indexed");
  }
  const ScalarField& m = mu.masses();
  ScalarField acc = ScalarField::Zero(sp.size());
  int e = 0;
  for (const Edge& ed : sp.edges()) {
    const double t = ed.weight * 0.5 * (m[ed.i] + m[ed.j]) * X[e++];
    acc[ed.i] += t;
    acc[ed.j] -= t;
  }
  return acc.cwiseQuotient(m);
}

// Pointwise inner product (carré du champ) of two vector fields. Grids:
// plain product of the vertex-indexed fields. Graphs: the Dirichlet-form
// density Γ(X,Y)_i = (1/2m_i) Σ_{e ∋ i} w_e θ_e X_e Y_e, whose μ-integral is
// the edge Dirichlet sum.
inline ScalarField pointwise_inner(const Density& mu, const EdgeField& X, const EdgeField& Y) {
  const Space& sp = mu.space();
  if (sp.is_grid()) {
    if (X.size() != sp.size() || Y.size() != sp.size()) {
      throw std::invalid_argument("pointwise_inner: grid vector fields must be vertex-indexed");
    }
    return X.cwiseProduct(Y);
  }
  if (X.size() != sp.edge_count() || Y.size() != sp.edge_count()) {
    throw std::invalid_argument("pointwise_inner: graph vector fields must be edge-indexed");
  }
  const ScalarField& m = mu.masses();
  ScalarField acc = ScalarField::Zero(sp.size());
  int e = 0;
  for (const Edge& ed : sp.edges()) {
    const double t = ed.weight * 0.5 * (m[ed.i] + m[ed.j]) * X[e] * Y[e];
    acc[ed.i] += t;
    acc[ed.j] += t;
    ++e;
  }
  return acc.cwiseQuotient(2.0 * m);
}

// Dense matrix of the raw operator behind mu_laplacian (before the
// compositional mean-zero projection; the bordered solve supplies the
// projection through its multiplier column).
inline Eigen::MatrixXd mu_laplacian_matrix(const Density& mu) {
  const Space& sp = mu.space();
  const int n = sp.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  if (!sp.is_grid() || sp.style() == LaplacianStyle::Variational) {
    const ScalarField& m = mu.masses();
    for (const Edge& e : sp.edges()) {
      const double t = e.weight * 0.5 * (m[e.i] + m[e.j]);
      a(e.i, e.i) -= t / m[e.i];
      a(e.i, e.j) += t / m[e.i];
      a(e.j, e.j) -= t / m[e.j];
      a(e.j, e.i) += t / m[e.j];
    }
    return a;
  }
  const double h = sp.spacing();
  const ScalarField log_rho = mu.rho().array().log().matrix();
  const ScalarField v = gradient(sp, log_rho);
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1) % n;
    const int im = (i - 1 + n) % n;
    a(i, ip) += 1.0 / (h * h) + v[i] / (2.0 * h);
    a(i, im) += 1.0 / (h * h) - v[i] / (2.0 * h);
    a(i, i) -= 2.0 / (h * h);
  }
  return a;
}

namespace detail {

inline ScalarField solve_dense_bordered(const Density& mu, const ScalarField& r) {
  const int n = mu.size();
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(n + 1, n + 1);
  big.topLeftCorner(n, n) = mu_laplacian_matrix(mu);
  big.block(0, n, n, 1).setOnes();
  big.block(n, 0, 1, n) = mu.masses().transpose();
  Eigen::VectorXd rhs(n + 1);
  rhs.head(n) = r;
  rhs[n] = 0.0;
  const Eigen::VectorXd sol = Eigen::PartialPivLU<Eigen::MatrixXd>(big).solve(rhs);
  return sol.head(n);
}

// Conjugate gradient on the positive-semidefinite stiffness form
// (S h)_i = Σ_j w θ (h_i − h_j); consistent right-hand sides have zero
// component in the kernel of constants.
inline ScalarField solve_variational_cg(const Density& mu, const ScalarField& r) {
  const Space& sp = mu.space();
  const ScalarField& m = mu.masses();
  const auto apply = [&](const ScalarField& h) { return (-edge_form(sp, m, h)).eval(); };
  const ScalarField b = -m.cwiseProduct(r);
  ScalarField x = ScalarField::Zero(sp.size());
  ScalarField res = b;
  ScalarField p = res;
  double rr = res.squaredNorm();
  const double tol2 = 1e-26 * b.squaredNorm();
  const int maxit = 50 * sp.size();
  for (int it = 0; it < maxit && rr > tol2; ++it) {
    const ScalarField sp_ = apply(p);
    const double alpha = rr / p.dot(sp_);
    x += alpha * p;
    res -= alpha * sp_;
    const double rr_new = res.squaredNorm();
    p = res + (rr_new / rr) * p;
    rr = rr_new;
  }
  if (rr > tol2) {
    throw std::runtime_error("solve_mu_laplacian: conjugate gradient did not converge");
  }
  x.array() -= x.dot(m);
  return x;
}

// BiCGSTAB on the mean-zero-projected compositional operator, which is not
// self-adjoint in any fixed inner product.
inline ScalarField solve_compositional_bicgstab(const Density& mu, const ScalarField& r) {
  const auto apply = [&](const ScalarField& h) { return mu_laplacian(mu, h); };
  const int n = mu.size();
  ScalarField x = ScalarField::Zero(n);
  ScalarField res = r;
  const ScalarField rhat = res;
  double rho_prev = 1.0, alpha = 1.0, omega = 1.0;
  ScalarField v = ScalarField::Zero(n), p = ScalarField::Zero(n);
  const double tol2 = 1e-26 * r.squaredNorm();
  const int maxit = 50 * n;
  for (int it = 0; it < maxit && res.squaredNorm() > tol2; ++it) {
    const double rho = rhat.dot(res);
    if (rho == 0.0) break;
    const double beta = (rho / rho_prev) * (alpha / omega);
    p = res + beta * (p - omega * v);
    v = apply(p);
    alpha = rho / rhat.dot(v);
    const ScalarField s = res - alpha * v;
    const ScalarField t = apply(s);
    const double tt = t.squaredNorm();
    omega = tt > 0.0 ? t.dot(s) / tt : 0.0;
    x += alpha * p + omega * s;
    res = s - omega * t;
    rho_prev = rho;
  }
  if (res.squaredNorm() > tol2) {
    throw std::runtime_error("solve_mu_laplacian: BiCGSTAB did not converge");
  }
  x.array() -= x.dot(mu.masses());
  return x;
}

}  // namespace detail

// Solves Δ_μ h = r for the μ-mean-zero potential h. The right-hand side must
// be μ-mean-zero up to a relative drift of 1e-10 (it is recentered below
// that, rejected above). Up to 512 vertices a dense bordered system
// [[Δ, 1], [mᵀ, 0]] enforces the gauge exactly; beyond that, matrix-free
// Krylov iterations take over.
inline ScalarField solve_mu_laplacian(const Density& mu, ScalarField r) {
  const Space& sp = mu.space();
  if (r.size() != sp.size()) {
    throw std::invalid_argument("solve_mu_laplacian: field length does not match the space");
  }
  const double mean = mu.integrate(r);
  const double scale = mu.integrate(r.cwiseAbs());
  if (scale > 0.0 && std::abs(mean) > 1e-10 * scale) {
    throw std::runtime_error("solve_mu_laplacian: right-hand side is not mean-zero (relative drift " +
                             std::to_string(std::abs(mean) / scale) + ", tolerance 1e-10)");
  }
  r.array() -= mean;
  if (sp.size() <= 512) {
    return detail::solve_dense_bordered(mu, r);
  }
  if (!sp.is_grid() || sp.style() == LaplacianStyle::Variational) {
    return detail::solve_variational_cg(mu, r);
  }
  return detail::solve_compositional_bicgstab(mu, r);
}

}  // namespace densgeo
