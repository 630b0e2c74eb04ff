#include <iostream>

#include <CLI11.hpp>

#include "czdo/commands.hpp"

int main(int argc, char** argv) {
  using namespace czdo::cli;

  CLI::App app{"Set-membership disturbance observer toolkit"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", opt.config_path, "JSON scenario config")->required();
    sub->add_option("--out", opt.out, "Output file (default: stdout)");
    sub->add_option("--tol-rank", opt.tol_rank, "Rank tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--tol-lp", opt.tol_lp, "LP feasibility/optimality tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--tol-contain", opt.tol_contain, "Containment audit tolerance")->check(CLI::PositiveNumber);
  };

  auto* check = app.add_subcommand("check", "Existence check for a bounded observer");
  add_common(check);

  auto* simulate = app.add_subcommand("simulate", "Single trace (run 0) as CSV");
  add_common(simulate);
  simulate->add_option("--delta", opt.delta, "Filtering interval")->check(CLI::PositiveNumber);
  simulate->add_option("--steps", opt.steps, "Horizon override")->check(CLI::NonNegativeNumber);
  simulate->add_option("--seed", opt.seed, "Seed override");

  auto* mc = app.add_subcommand("montecarlo", "Monte Carlo error statistics as CSV");
  add_common(mc);
  mc->add_option("--delta", opt.delta, "Single filtering interval (overrides delta_list)")
      ->check(CLI::PositiveNumber);
  mc->add_option("--steps", opt.steps, "Horizon override")->check(CLI::NonNegativeNumber);
  mc->add_option("--runs", opt.runs, "Number of runs")->check(CLI::PositiveNumber);
  mc->add_option("--seed", opt.seed, "Seed override");

  auto* cmp = app.add_subcommand("oracle-compare", "Observer hulls against the exact trajectory LP");
  add_common(cmp);
  cmp->add_option("--delta", opt.delta, "Filtering interval")->check(CLI::PositiveNumber);
  cmp->add_option("--steps", opt.steps, "Last step compared (must be below delta)")
      ->check(CLI::NonNegativeNumber);
  cmp->add_option("--seed", opt.seed, "Seed override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  if (check->parsed()) return cmd_check(opt, std::cout, std::cerr);
  if (simulate->parsed()) return cmd_simulate(opt, std::cout, std::cerr);
  if (mc->parsed()) return cmd_montecarlo(opt, std::cout, std::cerr);
  return cmd_oracle_compare(opt, std::cout, std::cerr);
}
