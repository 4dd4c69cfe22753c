#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "densgeo/metric.hpp"
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
};

Draw draw_c4(std::uint64_t seed) {
  const auto sp = c4();
  SplitMix64 rng(seed);
  Density mu = random_density(sp, rng);
  TangentVector a = random_tangent(mu, rng);
  TangentVector b = random_tangent(mu, rng);
  return Draw{std::move(mu), std::move(a), std::move(b)};
}

}  // namespace

TEST_CASE("fisher rao model is the identity automorphism") {
  const Draw d = draw_c4(1);
  const FisherRaoModel fr;
  CHECK(fr.name() == "fisher_rao");
  CHECK(fr.phi(d.mu, d.a).density().isApprox(d.a.density()));
  CHECK(fr.phi_inverse(d.mu, d.a).density().isApprox(d.a.density()));
  CHECK(metric_inner(fr, d.mu, d.a, d.b) ==
        doctest::Approx(fisher_rao_inner(d.mu, d.a, d.b)).epsilon(1e-15));
  CHECK(fr.gateaux_phi(d.mu, d.a, d.b).density().cwiseAbs().maxCoeff() == 0.0);
  CHECK(fr.has_closed_gateaux(*c4()));
}

TEST_CASE("otto anchors on the two-point graph") {
  const auto sp = k2();
  const Density mu = Density::uniform(sp);
  ScalarField s(2);
  s << 0.5, -0.5;
  const TangentVector nu(sp, s);
  const OttoModel otto(LaplacianStyle::Variational);
  CHECK(otto.name() == "otto");
  CHECK(metric_inner(otto, mu, nu, nu) == doctest::Approx(0.5).epsilon(1e-13));
  const TangentVector ph = otto.phi(mu, nu);
  CHECK(ph.density()[0] == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(ph.density()[1] == doctest::Approx(-0.25).epsilon(1e-13));
  const TangentVector round = otto.phi_inverse(mu, ph);
  CHECK((round.density() - s).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("phi round trips on random inputs") {
  const OttoModel otto(LaplacianStyle::Variational);
  for (const auto& sp : {c4(), Space::make_cycle(32)}) {
    SplitMix64 rng(13);
    const Density mu = random_density(sp, rng);
    const TangentVector nu = random_tangent(mu, rng);
    const TangentVector round = otto.phi_inverse(mu, otto.phi(mu, nu));
    CHECK(fisher_rao_norm(mu, round - nu) <= 1e-10 * fisher_rao_norm(mu, nu));
    CHECK(std::abs(otto.phi(mu, nu).total_mass()) <= 1e-13);
  }
  const OttoModel comp(LaplacianStyle::Compositional);
  const auto spc = Space::make_cycle(32, 2.0 * std::numbers::pi, LaplacianStyle::Compositional);
  SplitMix64 rng(13);
  const Density mu = random_density(spc, rng);
  const TangentVector nu = random_tangent(mu, rng);
  const TangentVector round = comp.phi_inverse(mu, comp.phi(mu, nu));
  CHECK(fisher_rao_norm(mu, round - nu) <= 1e-10 * fisher_rao_norm(mu, nu));
}

TEST_CASE("otto style must match the space") {
  const OttoModel comp(LaplacianStyle::Compositional);
  const Draw d = draw_c4(2);
  CHECK_THROWS_AS((void)comp.phi(d.mu, d.a), std::invalid_argument);
  const OttoModel var(LaplacianStyle::Variational);
  const auto spc = Space::make_cycle(16, 2.0 * std::numbers::pi, LaplacianStyle::Compositional);
  const Density mu = Density::uniform(spc);
  const TangentVector nu = tangent_from_field(mu, spc->grid_coordinates().array().sin().matrix());
  CHECK_THROWS_AS((void)var.phi(mu, nu), std::invalid_argument);
  CHECK_FALSE(comp.has_closed_gateaux(*spc));
  CHECK(var.has_closed_gateaux(*Space::make_cycle(16)));
}

TEST_CASE("two evaluation paths of the otto inner product agree on graphs") {
  const auto sp = c4();
  SplitMix64 rng(901);
  const Density mu = random_density(sp, rng);
  const TangentVector sa = random_tangent(mu, rng);
  const TangentVector sb = random_tangent(mu, rng);
  const OttoModel otto(LaplacianStyle::Variational);
  CHECK(std::abs(otto_inner_via_dirichlet(mu, sa, sb) - metric_inner(otto, mu, sa, sb)) <=
        1e-12);
}

TEST_CASE("closed gateaux derivative matches finite differences at second order") {
  const auto sp = c4();
  SplitMix64 rng(901);
  const Density mu = random_density(sp, rng);
  const TangentVector sa = random_tangent(mu, rng);
  const TangentVector sb = random_tangent(mu, rng);
  const OttoModel otto(LaplacianStyle::Variational);
  const TangentVector closed = otto_gateaux_closed(mu, sa, sb);
  CHECK(std::abs(closed.total_mass()) <= 1e-14);

  const double expect[3] = {7.70115493597956e-08, 1.9252869562502717e-08,
                            4.8131199581469275e-09};
  double err[3];
  const double steps[3] = {1e-3, 5e-4, 2.5e-4};
  for (int i = 0; i < 3; ++i) {
    err[i] = (gateaux_phi_fd(otto, mu, sa, sb, steps[i]) - closed)
                 .density()
                 .cwiseAbs()
                 .maxCoeff();
    CHECK(std::abs(err[i] - expect[i]) <= 1e-4 * expect[i]);
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.125));
  CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.125));

  CHECK(std::abs(default_fd_step(mu, sa) - 6.806262023883014e-06) <= 1e-16);
}

TEST_CASE("finite-difference gateaux guards its step") {
  const Draw d = draw_c4(3);
  const OttoModel otto(LaplacianStyle::Variational);
  CHECK_THROWS_AS((void)gateaux_phi_fd(otto, d.mu, d.a, d.b, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)gateaux_phi_fd(otto, d.mu, d.a, d.b, -1e-3), std::invalid_argument);
  CHECK_THROWS_AS((void)gateaux_phi_fd(otto, d.mu, d.a, d.b, 1e6), std::runtime_error);
}

TEST_CASE("compositional gateaux falls back to finite differences") {
  const auto sp = Space::make_cycle(32, 2.0 * std::numbers::pi, LaplacianStyle::Compositional);
  SplitMix64 rng(5);
  const Density mu = random_density(sp, rng);
  const TangentVector a = random_tangent(mu, rng);
  const TangentVector b = random_tangent(mu, rng);
  const OttoModel comp(LaplacianStyle::Compositional);
  const TangentVector via_model = comp.gateaux_phi(mu, a, b);
  const TangentVector via_fd = gateaux_phi_fd(comp, mu, a, b, default_fd_step(mu, a));
  CHECK((via_model.density() - via_fd.density()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS((void)otto_gateaux_closed(mu, a, b), std::logic_error);
}

TEST_CASE("otto symmetry residual refines on compositional grids") {
  double resid[2];
  for (int lvl = 0; lvl < 2; ++lvl) {
    const int n = 64 << lvl;
    const auto sp = Space::make_cycle(n, 2.0 * std::numbers::pi, LaplacianStyle::Compositional);
    const Eigen::ArrayXd x = sp->grid_coordinates().array();
    const Density mu = Density::normalized(sp, (0.4 * x.sin()).exp().matrix());
    const TangentVector s1 = tangent_from_field(mu, x.sin().matrix());
    const TangentVector s2 = tangent_from_field(mu, (2.0 * x).cos().matrix());
    const OttoModel comp(LaplacianStyle::Compositional);
    resid[lvl] = std::abs(metric_inner(comp, mu, s1, s2) - metric_inner(comp, mu, s2, s1));
  }
  CHECK(std::abs(resid[0] - 0.00015716100027754476) <= 1e-10);
  CHECK(std::abs(resid[1] - 3.9304757384575617e-05) <= 1e-10);
  CHECK(resid[0] / resid[1] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("metric norm squares the inner product") {
  const Draw d = draw_c4(17);
  const OttoModel otto(LaplacianStyle::Variational);
  const double n = metric_norm(otto, d.mu, d.a);
  CHECK(n * n == doctest::Approx(metric_inner(otto, d.mu, d.a, d.a)).epsilon(1e-12));
}
