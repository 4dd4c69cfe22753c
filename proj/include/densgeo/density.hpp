#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "densgeo/space.hpp"

namespace densgeo {

// A positive probability density with respect to the reference volumes of a
// Space: masses m_i = rho_i · vol_i sum to one. Construction renormalizes
// when the drift |Σ m − 1| is at most 1e-8 (integrators accumulate round-off)
// and rejects anything larger.
class Density {
 public:
  Density(std::shared_ptr<const Space> space, ScalarField rho)
      : space_(std::move(space)), rho_(std::move(rho)) {
    if (!space_) {
      throw std::invalid_argument("Density: null space");
    }
    if (rho_.size() != space_->size()) {
      throw std::invalid_argument("Density: field length does not match the space");
    }
    for (int i = 0; i < rho_.size(); ++i) {
      if (!(rho_[i] > 0.0) || !std::isfinite(rho_[i])) {
        throw std::invalid_argument("Density: rho must be strictly positive and finite (vertex " +
                                    std::to_string(i) + ")");
      }
    }
    const double mass = rho_.dot(space_->volumes());
    if (std::abs(mass - 1.0) > 1e-8) {
      throw std::invalid_argument("Density: total mass " + std::to_string(mass) +
                                  " drifts from 1 by more than 1e-8; normalize explicitly");
    }
    rho_ /= mass;
    masses_ = rho_.cwiseProduct(space_->volumes());
  }

  // Normalizes an arbitrary positive field into a probability density.
  static Density normalized(std::shared_ptr<const Space> space, ScalarField positive) {
    if (!space) {
      throw std::invalid_argument("Density::normalized: null space");
    }
    if (positive.size() != space->size()) {
      throw std::invalid_argument("Density::normalized: field length does not match the space");
    }
    for (int i = 0; i < positive.size(); ++i) {
      if (!(positive[i] > 0.0) || !std::isfinite(positive[i])) {
        throw std::invalid_argument(
            "Density::normalized: field must be strictly positive and finite (vertex " +
            std::to_string(i) + ")");
      }
    }
    positive /= positive.dot(space->volumes());
    return Density(std::move(space), std::move(positive));
  }

  static Density uniform(std::shared_ptr<const Space> space) {
    if (!space) {
      throw std::invalid_argument("Density::uniform: null space");
    }
    ScalarField rho = ScalarField::Constant(space->size(), 1.0 / space->total_volume());
    return Density(std::move(space), std::move(rho));
  }

  const Space& space() const { return *space_; }
  const std::shared_ptr<const Space>& space_ptr() const { return space_; }
  int size() const { return static_cast<int>(rho_.size()); }
  const ScalarField& rho() const { return rho_; }

  // Vertex masses m_i = rho_i · vol_i.
  const ScalarField& masses() const { return masses_; }

  // ∫ f dμ = Σ f_i m_i.
  double integrate(const ScalarField& f) const {
    if (f.size() != rho_.size()) {
      throw std::invalid_argument("Density::integrate: field length does not match the space");
    }
    return f.dot(masses_);
  }

 private:
  std::shared_ptr<const Space> space_;
  ScalarField rho_;
  ScalarField masses_;
};

// A tangent vector at any density: a signed measure with zero total mass,
// stored as a density with respect to the fixed reference volume. In this
// affine chart the mixture connection is literally the flat connection
// (parallel fields are constant arrays).
class TangentVector {
 public:
  TangentVector(std::shared_ptr<const Space> space, ScalarField density)
      : space_(std::move(space)), density_(std::move(density)) {
    if (!space_) {
      throw std::invalid_argument("TangentVector: null space");
    }
    if (density_.size() != space_->size()) {
      throw std::invalid_argument("TangentVector: field length does not match the space");
    }
    const double mass = density_.dot(space_->volumes());
    const double scale = density_.cwiseAbs().dot(space_->volumes());
    if (std::abs(mass) > 1e-12 * scale) {
      throw std::invalid_argument("TangentVector: total mass " + std::to_string(mass) +
                                  " is not zero (relative drift " +
                                  std::to_string(scale > 0 ? std::abs(mass) / scale : 0.0) +
                                  ", tolerance 1e-12)");
    }
  }

  // Internal constructor for results whose zero mass holds in exact
  // arithmetic (sums and scalings of tangent vectors, recentered fields);
  // skips the relative-drift validation, which cancellation can trip.
  static TangentVector from_raw(std::shared_ptr<const Space> space, ScalarField density) {
    TangentVector v;
    v.space_ = std::move(space);
    v.density_ = std::move(density);
    if (!v.space_ || v.density_.size() != v.space_->size()) {
      throw std::invalid_argument("TangentVector::from_raw: field length does not match the space");
    }
    return v;
  }

  static TangentVector zero(std::shared_ptr<const Space> space) {
    const int n = space->size();
    return from_raw(std::move(space), ScalarField::Zero(n));
  }

  const Space& space() const { return *space_; }
  const std::shared_ptr<const Space>& space_ptr() const { return space_; }
  int size() const { return static_cast<int>(density_.size()); }
  const ScalarField& density() const { return density_; }

  double total_mass() const { return density_.dot(space_->volumes()); }

  TangentVector operator+(const TangentVector& o) const {
    require_same_space(*space_, *o.space_, "TangentVector::operator+");
    return from_raw(space_, density_ + o.density_);
  }
  TangentVector operator-(const TangentVector& o) const {
    require_same_space(*space_, *o.space_, "TangentVector::operator-");
    return from_raw(space_, density_ - o.density_);
  }
  TangentVector operator-() const { return from_raw(space_, -density_); }
  TangentVector operator*(double c) const { return from_raw(space_, c * density_); }
  friend TangentVector operator*(double c, const TangentVector& v) { return v * c; }

 private:
  TangentVector() = default;

  std::shared_ptr<const Space> space_;
  ScalarField density_;
};

// Subtracts (total mass)·μ from a raw signed density, making it a tangent
// vector; the Fisher-Rao pairing of μ against any tangent vector vanishes, so
// this does not change the induced functional on the tangent space.
inline TangentVector recenter_tangent(const Density& mu, ScalarField raw) {
  if (raw.size() != mu.size()) {
    throw std::invalid_argument("recenter_tangent: field length does not match the space");
  }
  const double mass = raw.dot(mu.space().volumes());
  raw -= mass * mu.rho();
  return TangentVector::from_raw(mu.space_ptr(), std::move(raw));
}

// Recentering variant that first validates the relative mass drift; used by
// operators whose output is mean-zero by construction, where a larger drift
// indicates a bug rather than round-off.
inline TangentVector recenter_tangent_checked(const Density& mu, ScalarField raw,
                                              double rel_tol, const char* where) {
  const double mass = raw.dot(mu.space().volumes());
  const double scale = raw.cwiseAbs().dot(mu.space().volumes());
  if (scale > 0.0 && std::abs(mass) > rel_tol * scale) {
    throw std::runtime_error(std::string(where) + ": output mass drift " +
                             std::to_string(std::abs(mass) / scale) + " exceeds tolerance " +
                             std::to_string(rel_tol));
  }
  return recenter_tangent(mu, std::move(raw));
}

// Radon-Nikodym derivative dν/dμ as a per-vertex scalar field. For a tangent
// vector ν the result has zero μ-mean; for a density it is positive.
inline ScalarField radon_nikodym(const TangentVector& nu, const Density& mu) {
  require_same_space(nu.space(), mu.space(), "radon_nikodym");
  return nu.density().cwiseQuotient(mu.rho());
}

inline ScalarField radon_nikodym(const Density& nu, const Density& mu) {
  require_same_space(nu.space(), mu.space(), "radon_nikodym");
  return nu.rho().cwiseQuotient(mu.rho());
}

// Inverse identification ı_μ: maps a scalar field to the tangent vector
// (f − ∫f dμ)·μ.
inline TangentVector tangent_from_field(const Density& mu, const ScalarField& f) {
  if (f.size() != mu.size()) {
    throw std::invalid_argument("tangent_from_field: field length does not match the space");
  }
  const double mean = mu.integrate(f);
  return TangentVector::from_raw(mu.space_ptr(),
                                 (f.array() - mean).matrix().cwiseProduct(mu.rho()));
}

// Fisher-Rao inner product: Σ a_i b_i m_i with a = dν₁/dμ, b = dν₂/dμ.
inline double fisher_rao_inner(const Density& mu, const TangentVector& nu1,
                               const TangentVector& nu2) {
  require_same_space(mu.space(), nu1.space(), "fisher_rao_inner");
  require_same_space(mu.space(), nu2.space(), "fisher_rao_inner");
  return (nu1.density().cwiseProduct(nu2.density()).cwiseQuotient(mu.rho()))
      .dot(mu.space().volumes());
}

inline double fisher_rao_norm(const Density& mu, const TangentVector& nu) {
  return std::sqrt(std::max(fisher_rao_inner(mu, nu, nu), 0.0));
}

// A scalar field together with the density it has zero mean against.
class MeanZeroField {
 public:
  MeanZeroField(ScalarField values, Density base) : values_(std::move(values)), base_(std::move(base)) {
    if (values_.size() != base_.size()) {
      throw std::invalid_argument("MeanZeroField: field length does not match the space");
    }
    const double mean = base_.integrate(values_);
    const double scale = base_.integrate(values_.cwiseAbs());
    if (scale > 0.0 && std::abs(mean) > 1e-12 * scale) {
      throw std::invalid_argument("MeanZeroField: μ-mean " + std::to_string(mean) +
                                  " is not zero (tolerance 1e-12 relative)");
    }
  }

  const ScalarField& values() const { return values_; }
  const Density& base() const { return base_; }

 private:
  ScalarField values_;
  Density base_;
};

// Projection f ↦ f − ∫f dμ onto μ-mean-zero fields.
inline MeanZeroField project_mean_zero(const ScalarField& f, const Density& mu) {
  if (f.size() != mu.size()) {
    throw std::invalid_argument("project_mean_zero: field length does not match the space");
  }
  const double mean = mu.integrate(f);
  return MeanZeroField((f.array() - mean).matrix(), mu);
}

// Straight line segment (1−t)·μ₀ + t·μ₁ in the affine chart; geodesic of the
// mixture connection.
inline Density mixture_geodesic(const Density& mu0, const Density& mu1, double t) {
  require_same_space(mu0.space(), mu1.space(), "mixture_geodesic");
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument("mixture_geodesic: t = " + std::to_string(t) +
                                " lies outside [0, 1]");
  }
  return Density(mu0.space_ptr(), (1.0 - t) * mu0.rho() + t * mu1.rho());
}

// Basis of the tangent space (dimension n − 1): the k-th vector carries
// density +1/vol_k at vertex k and −1/vol_0 at vertex 0, k = 1..n−1.
inline std::vector<TangentVector> tangent_basis(const std::shared_ptr<const Space>& space) {
  std::vector<TangentVector> basis;
  const int n = space->size();
  basis.reserve(static_cast<std::size_t>(n - 1));
  for (int k = 1; k < n; ++k) {
    ScalarField s = ScalarField::Zero(n);
    s[k] = 1.0 / space->volumes()[k];
    s[0] = -1.0 / space->volumes()[0];
    basis.push_back(TangentVector::from_raw(space, std::move(s)));
  }
  return basis;
}

}  // namespace densgeo
