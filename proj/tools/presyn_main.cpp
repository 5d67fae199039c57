#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "presyn/cli/commands.hpp"

namespace cli = presyn::cli;

int main(int argc, char** argv) {
  CLI::App app{"Winning-set synthesis and safety control under preview"};
  app.require_subcommand(1);

  cli::Overrides ov;
  auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("--tol", ov.tol, "numeric tolerance override");
    cmd->add_option("--max-iters", ov.max_iters,
                    "fixed-point iteration cap override");
    cmd->add_option("--seed", ov.seed, "RNG seed override");
    cmd->add_option("--discretization", ov.discretization,
                    "discretization of continuous systems")
        ->check(CLI::IsMember({"euler", "zoh"}));
  };

  int rc = 0;
  std::string spec_path;
  std::string dir;

  CLI::App* validate =
      app.add_subcommand("validate", "parse and validate a problem spec");
  validate->add_option("spec", spec_path, "spec file")->required();
  add_overrides(validate);
  validate->callback(
      [&] { rc = cli::cmd_validate(spec_path, ov, std::cout); });

  CLI::App* synth = app.add_subcommand(
      "synth", "compute winning sets and write certificate artifacts");
  synth->add_option("spec", spec_path, "spec file")->required();
  synth->add_option("out", dir, "artifact directory")->required();
  add_overrides(synth);
  synth->callback([&] { rc = cli::cmd_synth(spec_path, dir, ov, std::cout); });

  CLI::App* compare = app.add_subcommand(
      "compare", "winning sets versus the preview-agnostic baseline");
  compare->add_option("spec", spec_path, "spec file")->required();
  add_overrides(compare);
  compare->callback([&] { rc = cli::cmd_compare(spec_path, ov, std::cout); });

  cli::SimulateArgs sim_args;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "seeded closed-loop runs against stored artifacts");
  simulate->add_option("spec", spec_path, "spec file")->required();
  simulate->add_option("cert", dir, "artifact directory from synth")
      ->required();
  simulate->add_option("--runs", sim_args.runs, "number of runs");
  simulate->add_option("--steps", sim_args.steps, "steps per run");
  simulate->add_flag("--allow-unsafe-start", sim_args.allow_unsafe_start,
                     "sample starts from the safety sets instead of the "
                     "winning sets and keep running on infeasible states");
  add_overrides(simulate);
  simulate->callback(
      [&] { rc = cli::cmd_simulate(spec_path, dir, sim_args, ov, std::cout); });

  cli::ExportArgs exp_args;
  CLI::App* exp = app.add_subcommand(
      "export", "emit stored winning sets for external plotting");
  exp->add_option("cert", dir, "artifact directory from synth")->required();
  exp->add_option("--project", exp_args.project,
                  "1-based coordinates to project onto (at most three)")
      ->delimiter(',');
  exp->add_option("--format", exp_args.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  exp->callback([&] { rc = cli::cmd_export(dir, exp_args, std::cout); });

  CLI11_PARSE(app, argc, argv);
  return rc;
}
