#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "config.hpp"
#include "suites.hpp"

int main(int argc, char** argv) {
  using gwcli::RunConfig;
  CLI::App app{"Verification suites for the multiscale loop vertex expansion of the quartic matrix model"};
  app.require_subcommand(1);

  RunConfig flags;
  std::string config_path;
  int cutoff = 0;
  app.add_option("--config", config_path, "INI file with [model] [sampling] [tolerance] [output] sections")
      ->check(CLI::ExistingFile);
  auto* o_cutoff = app.add_option("--cutoff", cutoff, "matrix cutoff Λ (matrices are (Λ+1)x(Λ+1))");
  auto* o_lambda = app.add_option("--lambda", flags.lambdas, "coupling(s), comma separated")->delimiter(',');
  auto* o_bases = app.add_option("--scale-base", flags.scale_bases, "scale base(s) M")->delimiter(',');
  auto* o_rho = app.add_option("--rho", flags.rho, "cardioid radius / Q-kernel coupling scale");
  auto* o_order = app.add_option("--order", flags.order, "number of log Z coefficients");
  auto* o_jmax = app.add_option("--j-max", flags.j_max, "deepest slice for the slice bounds");
  auto* o_qj = app.add_option("--q-kernel-j-max", flags.q_kernel_j_max, "deepest slice for the Q-kernel bounds");
  auto* o_two = app.add_option("--count-two-level", flags.count_two_level, "count two-level trees on N vertices");
  auto* o_samples = app.add_option("--samples", flags.samples, "Monte Carlo samples");
  auto* o_s2 = app.add_option("--order2-samples", flags.order2_samples, "Monte Carlo samples for order 2");
  auto* o_rs = app.add_option("--resolvent-samples", flags.resolvent_samples, "σ samples for the resolvent bound");
  auto* o_seed = app.add_option("--seed", flags.seed, "random seed");
  auto* o_se = app.add_option("--se-multiplier", flags.se_multiplier, "standard errors allowed for MC comparisons");
  auto* o_qt = app.add_option("--quadrature-tolerance", flags.quadrature_tolerance, "quadrature agreement");
  auto* o_dt = app.add_option("--derivative-tolerance", flags.derivative_tolerance, "finite-difference agreement");
  auto* o_rt = app.add_option("--resum-tolerance", flags.resum_tolerance, "Borel-Padé agreement with log Z");
  auto* o_out = app.add_option("--output", flags.output_dir, "report directory");
  auto* o_cache = app.add_option("--cache-dir", flags.cache_dir, "coefficient cache directory");
  auto* o_verify = app.add_flag("--verify-cache", flags.verify_cache, "recompute cached coefficients and compare");
  auto* o_nocsv = app.add_flag("--no-csv", "skip CSV tables");
  auto* o_plots = app.add_flag("--plots", flags.plots, "render PNG plots from the CSV tables");

  std::string chosen;
  for (const auto& name : gwcli::suite_names())
    app.add_subcommand(name, "run the " + name + " suite")->fallthrough()->callback([&chosen, name] { chosen = name; });
  app.add_subcommand("all", "run every suite")->fallthrough()->callback([&chosen] { chosen = "all"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) gwcli::load_ini(config_path, cfg);
    if (o_cutoff->count()) cfg.cutoff = cutoff;
    if (o_lambda->count()) cfg.lambdas = flags.lambdas;
    if (o_bases->count()) cfg.scale_bases = flags.scale_bases;
    if (o_rho->count()) cfg.rho = flags.rho;
    if (o_order->count()) cfg.order = flags.order;
    if (o_jmax->count()) cfg.j_max = flags.j_max;
    if (o_qj->count()) cfg.q_kernel_j_max = flags.q_kernel_j_max;
    if (o_two->count()) cfg.count_two_level = flags.count_two_level;
    if (o_samples->count()) cfg.samples = flags.samples;
    if (o_s2->count()) cfg.order2_samples = flags.order2_samples;
    if (o_rs->count()) cfg.resolvent_samples = flags.resolvent_samples;
    if (o_seed->count()) cfg.seed = flags.seed;
    if (o_se->count()) cfg.se_multiplier = flags.se_multiplier;
    if (o_qt->count()) cfg.quadrature_tolerance = flags.quadrature_tolerance;
    if (o_dt->count()) cfg.derivative_tolerance = flags.derivative_tolerance;
    if (o_rt->count()) cfg.resum_tolerance = flags.resum_tolerance;
    if (o_out->count()) cfg.output_dir = flags.output_dir;
    if (o_cache->count()) cfg.cache_dir = flags.cache_dir;
    if (o_verify->count()) cfg.verify_cache = true;
    if (o_nocsv->count()) cfg.csv = false;
    if (o_plots->count()) cfg.plots = true;
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  }

  try {
    return gwcli::run(chosen, cfg);
  } catch (const std::exception& e) {
    std::cerr << "error in " << chosen << ": " << e.what() << '\n';
    return 1;
  }
}
