#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/LU>

#include <cmath>
#include <stdexcept>

#include "densgeo/density.hpp"
#include "densgeo/rng.hpp"

using namespace densgeo;

namespace {

std::shared_ptr<const Space> c4() {
  return Space::make_graph(Eigen::VectorXd::Ones(4),
                           {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {0, 3, 1.0}});
}

std::shared_ptr<const Space> k2() {
  return Space::make_graph(Eigen::VectorXd::Ones(2), {{0, 1, 1.0}});
}

}  // namespace

TEST_CASE("density construction and normalization") {
  const auto sp = c4();
  ScalarField rho(4);
  rho << 0.1, 0.2, 0.3, 0.4;
  const Density mu(sp, rho);
  CHECK(mu.rho().isApprox(rho));
  CHECK(mu.masses().sum() == doctest::Approx(1.0).epsilon(1e-15));

  rho << 0.1, 0.2, 0.3, 0.4 + 5e-9;  // drift within tolerance: renormalized
  const Density mu2(sp, rho);
  CHECK(std::abs(mu2.masses().sum() - 1.0) <= 1e-15);

  rho << 0.1, 0.2, 0.3, 0.3;  // drift beyond tolerance
  CHECK_THROWS_AS(Density(sp, rho), std::invalid_argument);
  rho << -0.1, 0.4, 0.3, 0.4;
  CHECK_THROWS_AS(Density(sp, rho), std::invalid_argument);

  ScalarField positive(4);
  positive << 1.0, 2.0, 3.0, 4.0;
  const Density mu3 = Density::normalized(sp, positive);
  CHECK(mu3.masses().sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mu3.rho()[0] == doctest::Approx(0.1).epsilon(1e-14));

  const Density u = Density::uniform(sp);
  CHECK(u.rho().minCoeff() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(u.rho().maxCoeff() == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("integration uses reference volumes") {
  const auto sp = Space::make_cycle(16);
  const Density u = Density::uniform(sp);
  CHECK(u.integrate(ScalarField::Ones(16)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(u.rho()[0] == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("tangent vectors enforce zero total mass") {
  const auto sp = c4();
  ScalarField s(4);
  s << 1.0, 0.0, 0.0, 0.0;
  CHECK_THROWS_AS(TangentVector(sp, s), std::invalid_argument);
  s << 1.0, -1.0, 0.5, -0.5;
  const TangentVector t(sp, s);
  CHECK(t.total_mass() == 0.0);

  const TangentVector raw = TangentVector::from_raw(sp, ScalarField::Ones(4));
  CHECK(raw.total_mass() == 4.0);  // from_raw skips the check by design

  const TangentVector sum = t + t;
  CHECK(sum.density().isApprox(2.0 * s));
  CHECK((t - t).density().cwiseAbs().maxCoeff() == 0.0);
  CHECK((-t).density()[0] == -1.0);
  CHECK((t * 2.0).density()[0] == 2.0);
  CHECK((2.0 * t).density()[0] == 2.0);
  CHECK(TangentVector::zero(sp).density().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("recentering") {
  const auto sp = c4();
  const Density mu = Density::uniform(sp);
  ScalarField raw(4);
  raw << 1.0, 0.5, -0.25, 0.3;
  const TangentVector t = recenter_tangent(mu, raw);
  CHECK(std::abs(t.total_mass()) <= 1e-15);

  CHECK_THROWS_AS((void)recenter_tangent_checked(mu, raw, 1e-10, "test"), std::runtime_error);
  ScalarField tiny = raw;
  tiny.array() -= raw.sum() / 4.0;  // mass now ~1e-17
  CHECK_NOTHROW((void)recenter_tangent_checked(mu, tiny, 1e-10, "test"));
}

TEST_CASE("radon nikodym round trip and projection") {
  const auto sp = c4();
  SplitMix64 rng(5);
  const Density mu = random_density(sp, rng);
  const ScalarField g = rng.gaussian_field(4);
  const TangentVector t = tangent_from_field(mu, g);
  CHECK(std::abs(t.total_mass()) <= 1e-14);
  const MeanZeroField f = project_mean_zero(g, mu);
  CHECK((radon_nikodym(t, mu) - f.values()).cwiseAbs().maxCoeff() <= 1e-13);

  ScalarField biased = ScalarField::Ones(4);
  CHECK_THROWS_AS(MeanZeroField(biased, mu), std::invalid_argument);
}

TEST_CASE("fisher rao pairing anchors") {
  const auto sp = k2();
  const Density mu = Density::uniform(sp);
  ScalarField nu(2);
  nu << 0.5, -0.5;
  const TangentVector t(sp, nu);
  CHECK(fisher_rao_inner(mu, t, t) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fisher_rao_norm(mu, t) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("mixture geodesic is affine") {
  const auto sp = c4();
  SplitMix64 rng(9);
  const Density a = random_density(sp, rng);
  const Density b = random_density(sp, rng);
  CHECK(mixture_geodesic(a, b, 0.0).rho().isApprox(a.rho(), 1e-14));
  CHECK(mixture_geodesic(a, b, 1.0).rho().isApprox(b.rho(), 1e-14));
  const ScalarField quarter = mixture_geodesic(a, b, 0.25).rho();
  const ScalarField mid = 0.5 * (a.rho() + mixture_geodesic(a, b, 0.5).rho());
  CHECK((quarter - mid).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK_THROWS_AS((void)mixture_geodesic(a, b, -0.1), std::invalid_argument);
  CHECK_THROWS_AS((void)mixture_geodesic(a, b, 1.1), std::invalid_argument);
}

TEST_CASE("tangent basis spans the tangent space") {
  const auto sp = c4();
  const auto basis = tangent_basis(sp);
  REQUIRE(basis.size() == 3);
  Eigen::MatrixXd m(4, 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(basis[static_cast<std::size_t>(k)].total_mass()) <= 1e-15);
    m.col(k) = basis[static_cast<std::size_t>(k)].density();
  }
  CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(m).rank() == 3);
}

TEST_CASE("splitmix64 bit-exact stream") {
  SplitMix64 rng(42);
  CHECK(rng.next_u64() == 13679457532755275413ULL);
  CHECK(rng.next_u64() == 2949826092126892291ULL);
  CHECK(rng.next_u64() == 5139283748462763858ULL);

  SplitMix64 rng2(42);
  CHECK(rng2.uniform() == 0.74156487877182331);

  SplitMix64 rng3(42);
  CHECK(std::abs(rng3.gaussian() - 0.41471975043153048) <= 1e-14);
  CHECK(std::abs(rng3.gaussian() - 0.65268122215194269) <= 1e-14);
}

TEST_CASE("random draws match the pinned stream") {
  const auto sp = c4();
  SplitMix64 rng(42);
  const Density mu = random_density(sp, rng);
  ScalarField expect(4);
  expect << 0.23671369443348661, 0.26662204836289566, 0.12316789054928926, 0.3734963666543285;
  CHECK((mu.rho() - expect).cwiseAbs().maxCoeff() <= 1e-14);

  const TangentVector t = random_tangent(mu, rng);
  ScalarField texp(4);
  texp << 0.3330400431549132, -0.25511416535720527, 0.14030364839540349, -0.21822952619311139;
  CHECK((t.density() - texp).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(fisher_rao_norm(mu, t) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(t.total_mass()) <= 1e-14);
}
