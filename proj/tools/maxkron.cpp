// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include <CLI11.hpp>

#include "maxkron/error.hpp"
#include "maxkron/experiment.hpp"

int main(int argc, char **argv)
{
  CLI::App app{"Maxwell leapfrog experiments with tensor-product spline complexes"};
  app.require_subcommand(1);

  auto *run = app.add_subcommand("run", "run the experiment described by a JSON config");
  std::string config_path, out_dir, scheme;
  std::uint64_t seed = 0;
  run->add_option("config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  auto *out_opt = run->add_option("--out", out_dir, "output directory (overrides the config)");
  auto *scheme_opt = run->add_option("--scheme", scheme, "Hodge scheme")->check(CLI::IsMember({"mass", "kron", "dense"}));
  auto *seed_opt = run->add_option("--seed", seed, "seed for the CFL start vector");

  CLI11_PARSE(app, argc, argv);

  try
  {
    maxkron::ExperimentConfig cfg = maxkron::parse_config(config_path);
    if (*scheme_opt)
    {
      cfg.scheme = maxkron::hodge_scheme_from_string(scheme);
      cfg.schemes.clear();
    }
    if (*seed_opt)
    {
      cfg.seed = seed;
    }
    if (*out_opt)
    {
      cfg.output = out_dir;
    }
    maxkron::run_experiment(cfg, cfg.output,
                            [](const maxkron::RunMetrics &m)
                            {
                              std::cerr << maxkron::to_string(m.scheme) << " p=" << m.p << " n=" << m.n
                                        << " err_E=" << m.err_e << " err_H=" << m.err_h << '\n';
                            });
    std::cout << "wrote " << cfg.output << '\n';
  }
  catch (const maxkron::Error &e)
  {
    std::cerr << "error [" << maxkron::to_string(e.code()) << "]: " << e.what() << '\n';
    return 2;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
