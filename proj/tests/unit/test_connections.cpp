#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "densgeo/connections.hpp"
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

struct Draw {
  Density mu;
  TangentVector a;
  TangentVector b;
  TangentVector c;
};

Draw draw(const std::shared_ptr<const Space>& sp, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Density mu = random_density(sp, rng);
  TangentVector a = random_tangent(mu, rng);
  TangentVector b = random_tangent(mu, rng);
  TangentVector c = random_tangent(mu, rng);
  return Draw{std::move(mu), std::move(a), std::move(b), std::move(c)};
}

}  // namespace

TEST_CASE("k tensor vanishes at the uniform two-point density") {
  const auto sp = k2();
  const Density mu = Density::uniform(sp);
  ScalarField s(2);
  s << 0.5, -0.5;
  const TangentVector nu(sp, s);
  const OttoModel otto(LaplacianStyle::Variational);
  const FisherRaoModel fr;
  CHECK(k_tensor(otto, mu, nu, nu).density().cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(k_tensor(fr, mu, nu, nu).density().cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(k_otto_closed(mu, nu, nu).density().cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("fisher rao amari tensor reproduces the amari-chentsov value") {
  const auto sp = c4();
  const Density mu = Density::uniform(sp);
  ScalarField fa(4), fb(4), fc(4);
  fa << 1.0, -1.0, 1.0, -1.0;
  fb << 1.0, 1.0, -1.0, -1.0;
  fc << 1.0, -1.0, -1.0, 1.0;
  const TangentVector a(sp, fa.cwiseProduct(mu.rho()));
  const TangentVector b(sp, fb.cwiseProduct(mu.rho()));
  const TangentVector c(sp, fc.cwiseProduct(mu.rho()));
  const FisherRaoModel fr;
  CHECK(amari_tensor(fr, mu, a, b, c) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("alpha connection family") {
  const Draw d = draw(c4(), 31);
  const OttoModel otto(LaplacianStyle::Variational);
  CHECK(alpha_gamma(otto, -1.0, d.mu, d.a, d.b).density().cwiseAbs().maxCoeff() == 0.0);
  CHECK(torsion(otto, -1.0, d.mu, d.a, d.b).density().cwiseAbs().maxCoeff() == 0.0);
  const TangentVector k = k_tensor(otto, d.mu, d.a, d.b);
  const TangentVector g1 = alpha_gamma(otto, 1.0, d.mu, d.a, d.b);
  CHECK((g1.density() + k.density()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("torsion linearity in alpha is exact") {
  const Draw d = draw(c4(), 32);
  const OttoModel otto(LaplacianStyle::Variational);
  const TangentVector t1 = torsion(otto, 1.0, d.mu, d.a, d.b);
  for (const double alpha : {0.5, 2.0, -0.25}) {
    const TangentVector ta = torsion(otto, alpha, d.mu, d.a, d.b);
    CHECK((ta.density() - (0.5 * (alpha + 1.0)) * t1.density()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("fisher rao torsion vanishes") {
  const Draw d = draw(c4(), 33);
  const FisherRaoModel fr;
  for (const double alpha : {-0.5, 0.0, 1.0, 2.0}) {
    CHECK(fisher_rao_norm(d.mu, torsion(fr, alpha, d.mu, d.a, d.b)) <= 1e-12);
  }
}

TEST_CASE("gram matrix of the uniform fisher rao metric on c4") {
  const auto sp = c4();
  const Density mu = Density::uniform(sp);
  const FisherRaoModel fr;
  const Eigen::MatrixXd g = gram_matrix(fr, mu);
  REQUIRE(g.rows() == 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(g(i, j) == doctest::Approx(i == j ? 8.0 : 4.0).epsilon(1e-13));
    }
  }
  const double mineig =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (g + g.transpose()))
          .eigenvalues()
          .minCoeff();
  CHECK(mineig > 0.0);
}

TEST_CASE("d tensor is symmetric and capped") {
  const Draw d = draw(c4(), 34);
  const OttoModel otto(LaplacianStyle::Variational);
  const TangentVector dab = d_tensor(otto, d.mu, d.a, d.b);
  const TangentVector dba = d_tensor(otto, d.mu, d.b, d.a);
  CHECK((dab.density() - dba.density()).cwiseAbs().maxCoeff() == 0.0);

  const auto big = Space::make_cycle(600);
  const Density mu = Density::uniform(big);
  const Eigen::ArrayXd x = big->grid_coordinates().array();
  const TangentVector s = tangent_from_field(mu, x.sin().matrix());
  CHECK_THROWS_AS((void)d_tensor(otto, mu, s, s), std::runtime_error);
}

TEST_CASE("levi-civita connection is torsion free and metric compatible") {
  const Draw d = draw(c4(), 901);
  for (const bool use_otto : {false, true}) {
    std::shared_ptr<const RegularMetricModel> model;
    if (use_otto) {
      model = std::make_shared<OttoModel>(LaplacianStyle::Variational);
    } else {
      model = std::make_shared<FisherRaoModel>();
    }
    const TangentVector g1 = levi_civita_gamma(*model, d.mu, d.a, d.b);
    const TangentVector g2 = levi_civita_gamma(*model, d.mu, d.b, d.a);
    CHECK((g1.density() - g2.density()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(lc_compatibility_residual(*model, d.mu, d.a, d.b, d.c, 1e-5) <= 1e-8);
  }
}

TEST_CASE("duality residual is small in the exact regime") {
  const Draw d = draw(c4(), 901);
  const FisherRaoModel fr;
  const OttoModel otto(LaplacianStyle::Variational);
  for (const double alpha : {-1.0, 0.0, 1.0}) {
    CHECK(duality_residual(fr, alpha, d.mu, d.a, d.b, d.c, 1e-5) <= 1e-8);
    CHECK(duality_residual(otto, alpha, d.mu, d.a, d.b, d.c, 1e-5) <= 1e-8);
  }
}

TEST_CASE("closed otto forms on the smooth grid instance") {
  const auto sp = Space::make_cycle(64, 2.0 * std::numbers::pi, LaplacianStyle::Compositional);
  const Eigen::ArrayXd x = sp->grid_coordinates().array();
  const Density mu = Density::normalized(sp, (0.3 * x.sin()).exp().matrix());
  const TangentVector sa = tangent_from_field(mu, x.sin().matrix());
  const TangentVector sb = tangent_from_field(mu, (2.0 * x).cos().matrix());

  const TangentVector lhs = lc_otto_closed(mu, sa, sb);
  const TangentVector rhs = k_otto_closed(mu, sa, sb) * (-0.5) +
                            k_otto_closed(mu, sb, sa) * (-0.5) +
                            d_otto_closed(mu, sa, sb) * 0.5;
  CHECK((lhs.density() - rhs.density()).cwiseAbs().maxCoeff() <= 1e-12);

  const TangentVector t1 = torsion_otto_closed(1.0, mu, sa, sb);
  const TangentVector t2 = torsion_otto_closed(1.0, mu, sb, sa);
  CHECK((t1.density() + t2.density()).cwiseAbs().maxCoeff() == 0.0);

  CHECK(std::abs(k_otto_closed(mu, sa, sb).total_mass()) <= 1e-15);
  CHECK(std::abs(d_otto_closed(mu, sa, sb).total_mass()) <= 1e-15);
}

TEST_CASE("curvature of the mixture connection vanishes identically") {
  const Draw d = draw(c4(), 35);
  const ConnectionSpec mix = ConnectionSpec::mixture();
  CHECK(curvature_fd(mix, d.mu, d.a, d.b, d.c, 1e-5).density().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fisher rao alpha=0 curvature does not vanish") {
  const Draw d = draw(c4(), 36);
  const auto fr = std::make_shared<FisherRaoModel>();
  const ConnectionSpec spec = ConnectionSpec::alpha_family(fr, 0.0);
  CHECK(fisher_rao_norm(d.mu, curvature_fd(spec, d.mu, d.a, d.b, d.c, 1e-5)) >= 1e-3);
}

TEST_CASE("connection spec factories validate their model") {
  CHECK_THROWS_AS((void)ConnectionSpec::alpha_family(nullptr, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)ConnectionSpec::levi_civita(nullptr), std::invalid_argument);
  const ConnectionSpec mix = ConnectionSpec::mixture();
  const Draw d = draw(c4(), 37);
  CHECK(connection_gamma(mix, d.mu, d.a, d.b).density().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("perturbed density guards the positive cone") {
  const Draw d = draw(c4(), 38);
  CHECK_THROWS_AS((void)detail::perturbed_density(d.mu, d.a, 1e3, "test"), std::runtime_error);
  CHECK_NOTHROW((void)detail::perturbed_density(d.mu, d.a, 1e-6, "test"));
}
