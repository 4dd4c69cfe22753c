#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "densgeo/densgeo.hpp"

namespace {

struct CliArgs {
  std::string config_path;
  std::string out_path;
  std::string csv_path;
  std::uint64_t seed = 0;
};

void add_common_options(CLI::App* sub, CliArgs& args) {
  sub->add_option("--config", args.config_path, "experiment configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", args.out_path, "report destination (default: config 'out' or stdout)");
  sub->add_option("--csv", args.csv_path, "tabular summary destination (default: config 'csv')");
  sub->add_option("--seed", args.seed, "seed override for the randomized draws");
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-sample density-manifold geometry harness"};
  app.require_subcommand(1);

  CliArgs args;
  const struct {
    const char* command;
    densgeo::ExperimentKind kind;
    const char* expected;
    const char* description;
  } subcommands[] = {
      {"verify", densgeo::ExperimentKind::Verify, "verify",
       "run the invariants-and-properties suite on the configured space"},
      {"torsion-scan", densgeo::ExperimentKind::TorsionScan, "torsion_scan",
       "tabulate alpha-connection torsion norms for both metrics"},
      {"convergence", densgeo::ExperimentKind::Convergence, "convergence",
       "grid refinement study of the definitional and closed tensor forms"},
      {"geodesic-compare", densgeo::ExperimentKind::GeodesicCompare, "geodesic_compare",
       "integrate the alpha=0 and Levi-Civita geodesics and report their gap"},
  };
  for (const auto& sc : subcommands) {
    add_common_options(app.add_subcommand(sc.command, sc.description), args);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const CLI::App* active = app.get_subcommands().front();
    std::optional<std::uint64_t> seed_override;
    if (active->count("--seed") > 0) seed_override = args.seed;

    densgeo::ExperimentConfig cfg = densgeo::load_config_file(args.config_path, seed_override);
    for (const auto& sc : subcommands) {
      if (active->get_name() == sc.command && cfg.experiment != sc.kind) {
        throw densgeo::ConfigError("config error at field 'experiment': config declares '" +
                                   cfg.experiment_name + "' but the subcommand is '" +
                                   std::string(sc.command) + "'");
      }
    }

    densgeo::Report report;
    try {
      report = densgeo::run_experiment(cfg);
    } catch (const densgeo::ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      std::cerr << "error: experiment failed: " << e.what() << "\n";
      return 1;
    }

    const std::string json = densgeo::render_report_json(report);
    const std::string out_path = !args.out_path.empty() ? args.out_path : cfg.out;
    if (out_path.empty()) {
      std::cout << json;
    } else if (!write_file(out_path, json)) {
      std::cerr << "error: cannot write report to '" << out_path << "'\n";
      return 2;
    }
    const std::string csv_path = !args.csv_path.empty() ? args.csv_path : cfg.csv;
    if (!csv_path.empty() && !write_file(csv_path, densgeo::render_report_csv(report))) {
      std::cerr << "error: cannot write csv to '" << csv_path << "'\n";
      return 2;
    }

    if (!densgeo::report_all_pass(report)) {
      std::cerr << "one or more checks failed\n";
      return 1;
    }
    return 0;
  } catch (const densgeo::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
