#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "splitkit/cli.hpp"

namespace {

struct Args {
  std::string scene;
  std::string out = ".";
  splitkit::CommandOverrides overrides;
};

void add_common(CLI::App* cmd, Args& args, std::optional<std::uint64_t>& seed,
                int& jobs) {
  cmd->add_option("--scene", args.scene, "Scene JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out, "Output directory (default: .)");
  cmd->add_option("--seed", seed, "Override the scene seed");
  cmd->add_option("--jobs", jobs,
                  "Worker threads (default: SPLITKIT_JOBS or 1)")
      ->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "splitkit: subspace decompositions, collision dynamics, and "
      "inequality verification from scene files"};
  app.require_subcommand(1);

  Args dec_args, sim_args, ver_args;
  std::optional<std::uint64_t> dec_seed, sim_seed, ver_seed;
  int dec_jobs = 0, sim_jobs = 0, ver_jobs = 0;

  auto* dec = app.add_subcommand(
      "decompose", "Independent/dependent decomposition of the scene's xi");
  add_common(dec, dec_args, dec_seed, dec_jobs);

  auto* sim = app.add_subcommand(
      "simulate", "Collision trajectories and closed-form moment flow");
  add_common(sim, sim_args, sim_seed, sim_jobs);
  std::optional<double> t_end;
  std::optional<int> paths;
  sim->add_option("--t-end", t_end, "Simulation horizon (default: 1.0)")
      ->check(CLI::PositiveNumber);
  sim->add_option("--paths", paths, "Number of particle paths (default: 1000)")
      ->check(CLI::PositiveNumber);

  auto* ver = app.add_subcommand(
      "verify", "Run the inequality manifest and write report.json");
  add_common(ver, ver_args, ver_seed, ver_jobs);
  std::string manifest;
  std::optional<double> tol;
  ver->add_option("--manifest", manifest,
                  "Manifest JSON (default: the scene's \"suite\")")
      ->check(CLI::ExistingFile);
  ver->add_option("--tol", tol, "Family-wise level for verdicts (default: 0.01)")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (dec->parsed()) {
    dec_args.overrides.seed = dec_seed;
    dec_args.overrides.jobs = dec_jobs;
    return splitkit::cmd_decompose(dec_args.scene, dec_args.out,
                                   dec_args.overrides, std::cout, std::cerr);
  }
  if (sim->parsed()) {
    sim_args.overrides.seed = sim_seed;
    sim_args.overrides.jobs = sim_jobs;
    sim_args.overrides.t_end = t_end;
    sim_args.overrides.paths = paths;
    return splitkit::cmd_simulate(sim_args.scene, sim_args.out,
                                  sim_args.overrides, std::cout, std::cerr);
  }
  ver_args.overrides.seed = ver_seed;
  ver_args.overrides.jobs = ver_jobs;
  if (!manifest.empty()) ver_args.overrides.manifest = manifest;
  ver_args.overrides.tol = tol;
  return splitkit::cmd_verify(ver_args.scene, ver_args.out, ver_args.overrides,
                              std::cout, std::cerr);
}
