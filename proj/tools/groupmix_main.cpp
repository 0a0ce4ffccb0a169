#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "groupmix/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"groupmix: mixing bounds for walks on finite groups and "
               "cokernel universality experiments"};
  app.require_subcommand(1);

  groupmix::cli::CliOptions opts;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out;

  CLI::App* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("--config", opts.config_path, "experiment config (JSON)")
      ->required();
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "override the config seed");
  CLI::Option* threads_opt =
      run->add_option("--threads", threads, "override the config thread count");
  CLI::Option* out_opt = run->add_option(
      "--out", out, "output base path (writes <out>.csv and <out>.json)");

  CLI::App* list =
      app.add_subcommand("list", "list the shipped experiment configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : groupmix::cli::kExitConfigInvalid;
  }

  if (list->parsed())
    return groupmix::cli::list_builtin_experiments(std::cout);

  if (seed_opt->count() > 0) opts.seed_override = seed;
  if (threads_opt->count() > 0) opts.threads_override = threads;
  if (out_opt->count() > 0) opts.out_override = out;
  return groupmix::cli::run_config(opts, std::cerr);
}
