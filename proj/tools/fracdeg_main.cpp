// Command-line front end: one experiment per invocation, outputs as CSV/PGM
// plus a manifest with checksums.  Thread count defaults to 1; the quadrature
// reductions are order-fixed, so results are identical at any thread count.

#include <CLI11.hpp>
#include <cstdio>

#include "fracdeg/experiments.hpp"

using fracdeg::CantorMapSpec;
using fracdeg::ExperimentConfig;

namespace {

void add_map_options(CLI::App* cmd, ExperimentConfig& cfg, std::string& variant, double& alpha,
                     double& big_a, double& big_b, int& level) {
  cmd->add_option("--map", cfg.map_name,
                  "builtin map: id, scale2, reflect, square, cube, fold, angle-double, "
                  "lusin-n, orientation");
  cmd->add_option("--variant", variant, "construction variant: lusin-n or orientation");
  cmd->add_option("--alpha", alpha, "Hölder exponent of the construction");
  cmd->add_option("--A", big_a, "growth base (orientation; derived for lusin-n)");
  cmd->add_option("--B", big_b, "image growth exponent (orientation)");
  cmd->add_option("--level", level, "truncation level K");
}

void finalize_map(ExperimentConfig& cfg, const std::string& variant, double alpha, double big_a,
                  double big_b, int level) {
  std::string choice = variant.empty() ? cfg.map_name : variant;
  if (choice == "lusin-n") {
    cfg.cantor = CantorMapSpec::lusin_n(2, alpha, level);
    cfg.use_cantor = true;
    cfg.map_name = choice;
  } else if (choice == "orientation") {
    cfg.cantor = CantorMapSpec::orientation(2, alpha, big_a, big_b, level);
    cfg.use_cantor = true;
    cfg.map_name = choice;
  }
  cfg.cantor.seed = cfg.seed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracdeg: degree, distributional-Jacobian and fractional-seminorm experiments "
               "for nested-cube radial stretch maps"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string variant;
  double alpha = 0.5, big_a = 0.5, big_b = 0.2;
  int level = 6;

  app.add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
  app.add_option("--threads", cfg.threads, "worker threads (results identical for any count)")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();

  auto* construct = app.add_subcommand("construct", "build a construction map, emit level "
                                                    "measures and a raster");
  add_map_options(construct, cfg, variant, alpha, big_a, big_b, level);
  construct->add_option("--raster", cfg.raster, "PGM pixels per axis")->capture_default_str();

  auto* evaluate = app.add_subcommand("evaluate", "evaluate a map and its derivative data");
  add_map_options(evaluate, cfg, variant, alpha, big_a, big_b, level);
  evaluate->add_option("--x", cfg.point, "evaluation point")->expected(2);

  auto* seminorm = app.add_subcommand("seminorm", "Gagliardo seminorm with refinement history");
  add_map_options(seminorm, cfg, variant, alpha, big_a, big_b, level);
  seminorm->add_option("--s", cfg.s, "fractional order")->capture_default_str();
  seminorm->add_option("--p", cfg.p, "integrability exponent")->capture_default_str();
  seminorm->add_option("--method", cfg.method, "grid or mc")->capture_default_str();
  seminorm->add_option("--res", cfg.resolution, "base resolution x8")->capture_default_str();

  auto* degree = app.add_subcommand("degree", "topological degree at a target");
  add_map_options(degree, cfg, variant, alpha, big_a, big_b, level);
  degree->add_option("--y", cfg.target, "target point")->expected(2);
  degree->add_option("--res", cfg.resolution, "sampling grid")->capture_default_str();

  auto* cov = app.add_subcommand("cov-check", "change of variables through the degree");
  add_map_options(cov, cfg, variant, alpha, big_a, big_b, level);
  cov->add_option("--psi", cfg.psi, "test bump: center..., radius")->expected(3);
  cov->add_option("--res", cfg.resolution, "sampling grid")->capture_default_str();

  auto* cn = app.add_subcommand("verify-cn", "Ciarlet-Nečas verdict on a subcube");
  add_map_options(cn, cfg, variant, alpha, big_a, big_b, level);
  cn->add_option("--u", cfg.u_spec, "subcube: center..., radius")->expected(3);
  cn->add_option("--res", cfg.resolution, "sampling grid")->capture_default_str();

  auto* lusin = app.add_subcommand("verify-lusin", "Lusin (N) failure mass of the construction");
  add_map_options(lusin, cfg, variant, alpha, big_a, big_b, level);

  auto* orient = app.add_subcommand("verify-orientation",
                                    "positive pointwise Jacobian against degree -1");
  add_map_options(orient, cfg, variant, alpha, big_a, big_b, level);
  orient->add_option("--res", cfg.resolution, "sampling grid")->capture_default_str();

  auto* stability = app.add_subcommand("cn-stability", "per-level verdicts and image measures");
  add_map_options(stability, cfg, variant, alpha, big_a, big_b, level);
  stability->add_option("--levels", cfg.levels, "truncation levels")->expected(-1);
  stability->add_option("--u", cfg.u_spec, "subcube: center..., radius")->expected(3);
  stability->add_option("--res", cfg.resolution, "sampling grid")->capture_default_str();

  auto* preimages = app.add_subcommand("preimages", "grid components of a preimage ball");
  add_map_options(preimages, cfg, variant, alpha, big_a, big_b, level);
  preimages->add_option("--y", cfg.target, "target point")->expected(2);
  preimages->add_option("--eps", cfg.epsilon, "ball size")->capture_default_str();
  preimages->add_option("--res", cfg.resolution, "sampling grid")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    // defaults differ per command
    if (app.get_subcommand("verify-lusin")->parsed() && variant.empty()) variant = "lusin-n";
    if (app.get_subcommand("verify-orientation")->parsed() && variant.empty())
      variant = "orientation";
    if (app.get_subcommand("cn-stability")->parsed() && variant.empty()) variant = "lusin-n";
    if (app.get_subcommand("construct")->parsed() && variant.empty()) variant = "lusin-n";
    for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
    finalize_map(cfg, variant, alpha, big_a, big_b, level);
    return fracdeg::run_experiment(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
