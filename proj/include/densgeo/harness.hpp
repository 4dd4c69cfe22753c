#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "densgeo/checks.hpp"
#include "densgeo/config.hpp"
#include "densgeo/connections.hpp"
#include "densgeo/geodesics.hpp"
#include "densgeo/report.hpp"

namespace densgeo {

struct ConvergenceRow {
  std::string quantity;
  int n = 0;
  double error = 0.0;
};

namespace detail {

struct GridStudyInstance {
  Density mu;
  TangentVector sa;
  TangentVector sb;
};

inline GridStudyInstance grid_study_instance(const std::shared_ptr<const Space>& sp,
                                             bool uniform) {
  const double omega = 2.0 * std::numbers::pi / (sp->spacing() * sp->size());
  const Eigen::ArrayXd x = sp->grid_coordinates().array();
  Density mu = uniform ? Density::uniform(sp)
                       : Density::normalized(sp, (0.3 * (omega * x).sin()).exp().matrix());
  TangentVector sa = tangent_from_field(mu, (omega * x).sin().matrix());
  TangentVector sb = tangent_from_field(mu, (2.0 * omega * x).cos().matrix());
  return GridStudyInstance{std::move(mu), std::move(sa), std::move(sb)};
}

inline double rel_field_error(const TangentVector& got, const TangentVector& want,
                              const Density& mu) {
  const ScalarField diff =
      (got.density() - want.density()).cwiseQuotient(mu.rho());
  const ScalarField ref = want.density().cwiseQuotient(mu.rho());
  return diff.cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
}

}  // namespace detail

// Definitional tensors (finite differences plus Gram reconstruction) against
// the closed grid forms on a smooth non-uniform density, across a 1-2-4
// refinement of the cycle.
inline std::vector<ConvergenceRow> definitional_vs_closed_study(LaplacianStyle style,
                                                                int base_n, int levels,
                                                                double circumference) {
  std::vector<ConvergenceRow> rows;
  for (int lvl = 0; lvl < levels; ++lvl) {
    const int n = base_n << lvl;
    const auto sp = Space::make_cycle(n, circumference, style);
    const OttoModel model(style);
    const auto inst = detail::grid_study_instance(sp, false);
    const auto rn_err = [&](const TangentVector& def, const TangentVector& closed) {
      return (def.density() - closed.density())
          .cwiseQuotient(inst.mu.rho())
          .cwiseAbs()
          .maxCoeff();
    };
    rows.push_back({"k_tensor", n,
                    rn_err(k_tensor(model, inst.mu, inst.sa, inst.sb),
                           k_otto_closed(inst.mu, inst.sa, inst.sb))});
    rows.push_back({"torsion", n,
                    rn_err(torsion(model, 1.0, inst.mu, inst.sa, inst.sb),
                           torsion_otto_closed(1.0, inst.mu, inst.sa, inst.sb))});
    rows.push_back({"d_tensor", n,
                    rn_err(d_tensor(model, inst.mu, inst.sa, inst.sb),
                           d_otto_closed(inst.mu, inst.sa, inst.sb))});
    rows.push_back({"amari", n,
                    std::abs(amari_tensor(model, inst.mu, inst.sa, inst.sb, inst.sa) -
                             amari_otto_closed(inst.mu, inst.sa, inst.sb, inst.sa))});
  }
  return rows;
}

// Closed grid forms against the exact continuum tensors of the cycle for
// Fourier data on the uniform density.
inline std::vector<ConvergenceRow> closed_vs_analytic_study(LaplacianStyle style, int base_n,
                                                            int levels, double circumference) {
  std::vector<ConvergenceRow> rows;
  const double omega = 2.0 * std::numbers::pi / circumference;
  for (int lvl = 0; lvl < levels; ++lvl) {
    const int n = base_n << lvl;
    const auto sp = Space::make_cycle(n, circumference, style);
    const auto inst = detail::grid_study_instance(sp, true);
    const Eigen::ArrayXd x = sp->grid_coordinates().array();
    const Eigen::ArrayXd s1 = (omega * x).sin(), c1 = (omega * x).cos();
    const Eigen::ArrayXd s2 = (2.0 * omega * x).sin(), c2 = (2.0 * omega * x).cos();

    const auto rel_err = [&](const TangentVector& closed, const Eigen::ArrayXd& analytic) {
      const Eigen::ArrayXd got = closed.density().array() / inst.mu.rho().array();
      return (got - analytic).abs().maxCoeff() / analytic.abs().maxCoeff();
    };
    rows.push_back({"k_tensor", n,
                    rel_err(k_otto_closed(inst.mu, inst.sa, inst.sb),
                            s1 * c2 + 0.5 * s2 * c1)});
    rows.push_back({"torsion", n,
                    rel_err(torsion_otto_closed(1.0, inst.mu, inst.sa, inst.sb),
                            1.5 * s2 * c1)});
    rows.push_back({"d_tensor", n,
                    rel_err(d_otto_closed(inst.mu, inst.sa, inst.sa), 2.0 * c2)});
    const double am = amari_otto_closed(inst.mu, inst.sa, inst.sb, inst.sa);
    const double am_ref = -0.125 / (omega * omega);
    rows.push_back({"amari", n, std::abs(am - am_ref) / std::abs(am_ref)});
  }
  return rows;
}

namespace detail {

inline Table convergence_table(const std::string& name,
                               const std::vector<ConvergenceRow>& rows, int levels) {
  Table t;
  t.name = name;
  t.columns = {"quantity", "n", "error", "ratio_vs_previous"};
  const int quantities = levels > 0 ? static_cast<int>(rows.size()) / levels : 0;
  for (int q = 0; q < quantities; ++q) {
    for (int lvl = 0; lvl < levels; ++lvl) {
      const ConvergenceRow& r = rows[static_cast<std::size_t>(lvl * quantities + q)];
      const double ratio =
          lvl == 0 ? 0.0
                   : rows[static_cast<std::size_t>((lvl - 1) * quantities + q)].error /
                         (r.error > 0 ? r.error : 1.0);
      t.rows.push_back({Cell::of(r.quantity), Cell::of(r.n), Cell::of(r.error),
                        Cell::of(ratio)});
    }
  }
  return t;
}

inline void convergence_checks(const std::string& prefix,
                               const std::vector<ConvergenceRow>& rows, int levels,
                               bool allow_floor, std::vector<CheckRecord>& out) {
  const int quantities = levels > 0 ? static_cast<int>(rows.size()) / levels : 0;
  for (int q = 0; q < quantities; ++q) {
    const std::string& name = rows[static_cast<std::size_t>(q)].quantity;
    double max_err = 0.0, min_ratio = 1e300, max_ratio = 0.0;
    for (int lvl = 0; lvl < levels; ++lvl) {
      const double err = rows[static_cast<std::size_t>(lvl * quantities + q)].error;
      max_err = std::max(max_err, err);
      if (lvl > 0) {
        const double prev = rows[static_cast<std::size_t>((lvl - 1) * quantities + q)].error;
        const double ratio = err > 0 ? prev / err : 1e300;
        min_ratio = std::min(min_ratio, ratio);
        max_ratio = std::max(max_ratio, ratio);
      }
    }
    if (allow_floor && max_err < 1e-6) {
      out.push_back(check_le(prefix + "/floor/" + name, max_err, 1e-6));
      continue;
    }
    out.push_back(check_ge(prefix + "/order/" + name, min_ratio, 3.2));
    out.push_back(check_le(prefix + "/order_upper/" + name, max_ratio, 4.8));
  }
}

inline std::shared_ptr<const RegularMetricModel> make_model(const std::string& metric,
                                                            const Space& sp) {
  if (metric == "fisher_rao") return std::make_shared<FisherRaoModel>();
  return std::make_shared<OttoModel>(sp.is_grid() ? sp.style() : LaplacianStyle::Variational);
}

inline Report run_verify(const ExperimentConfig& cfg) {
  Report r;
  r.experiment = cfg.experiment_name;
  r.config = cfg;
  const auto sp = build_space(cfg.space);
  VerifyParams p;
  p.metric = cfg.metric;
  p.alphas = cfg.alphas;
  p.trials = cfg.trials;
  p.seed = cfg.seed;
  p.fd_step = cfg.fd_step;
  r.checks = run_verify_checks(sp, p);
  return r;
}

inline Report run_torsion_scan(const ExperimentConfig& cfg) {
  Report r;
  r.experiment = cfg.experiment_name;
  r.config = cfg;
  const auto sp = build_space(cfg.space);

  TrialSet set = draw_trials(sp, cfg.seed, std::max(1, cfg.trials), 2);
  std::vector<double> alphas = cfg.alphas;
  std::sort(alphas.begin(), alphas.end());

  Table t;
  t.name = "torsion_scan";
  t.columns = {"metric", "alpha", "trial", "torsion_norm", "linearity_residual"};

  double fr_worst = 0.0, lin_worst = 0.0, flat_worst = 0.0;
  double otto_min = 1e300;
  double top_alpha = -1.0;
  for (double a : alphas) top_alpha = std::max(top_alpha, a);

  for (const std::string metric : {"fisher_rao", "otto"}) {
    const auto model = make_model(metric, *sp);
    for (double alpha : alphas) {
      for (std::size_t trial = 0; trial < set.mus.size(); ++trial) {
        const Density& mu = set.mus[trial];
        const TangentVector t1 = torsion(*model, 1.0, mu, set.as[trial], set.bs[trial]);
        const TangentVector tor = torsion(*model, alpha, mu, set.as[trial], set.bs[trial]);
        const double norm = metric_norm(*model, mu, tor);
        const double lin =
            (tor - t1 * (0.5 * (alpha + 1.0))).density().cwiseAbs().maxCoeff() /
            std::max(1.0, t1.density().cwiseAbs().maxCoeff());
        t.rows.push_back({Cell::of(metric), Cell::of(alpha),
                          Cell::of(static_cast<int>(trial)), Cell::of(norm), Cell::of(lin)});
        lin_worst = std::max(lin_worst, lin);
        if (metric == "fisher_rao") fr_worst = std::max(fr_worst, norm);
        if (alpha == -1.0) flat_worst = std::max(flat_worst, norm);
        if (metric == "otto" && alpha == top_alpha && top_alpha > -1.0) {
          otto_min = std::min(otto_min, norm);
        }
      }
    }
  }
  r.tables.push_back(std::move(t));
  r.checks.push_back(check_le("torsion_scan/fisher_rao_torsion_zero", fr_worst, 1e-10));
  r.checks.push_back(check_le("torsion_scan/linearity", lin_worst, 1e-12));
  if (top_alpha > -1.0) {
    r.checks.push_back(check_ge("torsion_scan/otto_torsion_nonzero", otto_min, 1e-3));
  }
  if (std::find(alphas.begin(), alphas.end(), -1.0) != alphas.end()) {
    r.checks.push_back(check_le("torsion_scan/alpha_minus_one_flat", flat_worst, 0.0));
  }
  std::sort(r.checks.begin(), r.checks.end(),
            [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
  return r;
}

inline Report run_convergence(const ExperimentConfig& cfg) {
  if (cfg.space.kind != "cycle") {
    throw ConfigError("config error at field 'space.kind': convergence requires a cycle space");
  }
  if (cfg.space.n > 128) {
    throw ConfigError(
        "config error at field 'space.n': convergence refines to 4n and the dense Gram "
        "reconstruction caps at 512 points; use n <= 128");
  }
  Report r;
  r.experiment = cfg.experiment_name;
  r.config = cfg;
  const int levels = 3;
  const auto def_rows = definitional_vs_closed_study(cfg.space.style, cfg.space.n, levels,
                                                     cfg.space.circumference);
  const auto an_rows = closed_vs_analytic_study(cfg.space.style, cfg.space.n, levels,
                                                cfg.space.circumference);
  r.tables.push_back(convergence_table("definitional_vs_closed", def_rows, levels));
  r.tables.push_back(convergence_table("closed_vs_analytic", an_rows, levels));
  convergence_checks("convergence/definitional", def_rows, levels, true, r.checks);
  convergence_checks("convergence/analytic", an_rows, levels, false, r.checks);

  const int quantities = static_cast<int>(an_rows.size()) / levels;
  for (int q = 0; q < quantities; ++q) {
    const ConvergenceRow& last = an_rows[static_cast<std::size_t>((levels - 1) * quantities + q)];
    r.checks.push_back(
        check_le("convergence/analytic_final/" + last.quantity, last.error, 1e-3));
  }
  std::sort(r.checks.begin(), r.checks.end(),
            [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
  return r;
}

inline Report run_geodesic_compare(const ExperimentConfig& cfg) {
  Report r;
  r.experiment = cfg.experiment_name;
  r.config = cfg;
  const auto sp = build_space(cfg.space);
  if (sp->size() > 512) {
    throw ConfigError(
        "config error at field 'space': geodesic_compare uses the dense Levi-Civita "
        "construction; use a space with at most 512 points");
  }

  std::vector<Density> mu0_slot;
  std::vector<TangentVector> v0_slot;
  if (!cfg.geodesic.rho0.empty()) {
    Eigen::Map<const Eigen::VectorXd> rho_raw(
        cfg.geodesic.rho0.data(), static_cast<Eigen::Index>(cfg.geodesic.rho0.size()));
    try {
      mu0_slot.emplace_back(sp, rho_raw);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config error at field 'geodesic.rho0': ") + e.what());
    }
    Eigen::Map<const Eigen::VectorXd> v_raw(
        cfg.geodesic.v0.data(), static_cast<Eigen::Index>(cfg.geodesic.v0.size()));
    const double drift = std::abs(v_raw.dot(sp->volumes()));
    const double scale = v_raw.cwiseAbs().dot(sp->volumes());
    if (scale > 0 && drift > 1e-8 * scale) {
      throw ConfigError("config error at field 'geodesic.v0': velocity must integrate to zero");
    }
    v0_slot.push_back(recenter_tangent(mu0_slot.front(), v_raw));
  } else {
    SplitMix64 rng(cfg.seed);
    mu0_slot.push_back(random_density(sp, rng));
    v0_slot.push_back(cone_safe_velocity(mu0_slot.front(), random_tangent(mu0_slot.front(), rng),
                                         0.4, cfg.geodesic.t_final));
  }
  const Density& mu0 = mu0_slot.front();
  const TangentVector& v0 = v0_slot.front();

  const auto model = make_model(cfg.metric, *sp);
  const ConnectionSpec alpha0 = ConnectionSpec::alpha_family(model, 0.0);
  const ConnectionSpec lc = ConnectionSpec::levi_civita(model);
  const auto ta = integrate_geodesic(alpha0, mu0, v0, cfg.geodesic.t_final, cfg.geodesic.steps);
  const auto tb = integrate_geodesic(lc, mu0, v0, cfg.geodesic.t_final, cfg.geodesic.steps);

  Table t;
  t.name = "geodesic_divergence";
  t.columns = {"time", "l1_distance"};
  double max_dist = 0.0, mass_worst = 0.0;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    const double d = (ta[i].mu.rho() - tb[i].mu.rho()).cwiseAbs().dot(sp->volumes());
    max_dist = std::max(max_dist, d);
    t.rows.push_back({Cell::of(ta[i].time), Cell::of(d)});
    mass_worst = std::max(mass_worst, std::abs(ta[i].mu.rho().dot(sp->volumes()) - 1.0));
    mass_worst = std::max(mass_worst, std::abs(tb[i].mu.rho().dot(sp->volumes()) - 1.0));
  }
  r.tables.push_back(std::move(t));

  r.checks.push_back(check_le("geodesic_compare/mass_conserved", mass_worst, 1e-12));
  if (cfg.metric == "otto") {
    r.checks.push_back(check_ge("geodesic_compare/alpha0_vs_lc_distinct", max_dist, 1e-4));
  } else {
    r.checks.push_back(check_le("geodesic_compare/alpha0_vs_lc_agree", max_dist, 1e-8));
  }
  std::sort(r.checks.begin(), r.checks.end(),
            [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
  return r;
}

}  // namespace detail

inline Report run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::Verify: return detail::run_verify(cfg);
    case ExperimentKind::TorsionScan: return detail::run_torsion_scan(cfg);
    case ExperimentKind::Convergence: return detail::run_convergence(cfg);
    case ExperimentKind::GeodesicCompare: return detail::run_geodesic_compare(cfg);
  }
  throw std::logic_error("run_experiment: unhandled experiment kind");
}

}  // namespace densgeo
