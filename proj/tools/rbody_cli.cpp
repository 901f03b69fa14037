#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rbody/config.hpp"
#include "rbody/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"r-body beta-ensemble toolkit: equilibrium, 1/N expansion, partition function, Monte Carlo checks"};
  app.require_subcommand(1);
  rbody::PipelineSpec spec;
  double steps = -1.0;
  std::string kind;

  auto common = [&](CLI::App* s) {
    s->add_option("--config", spec.config_path, "model configuration (JSON)")->required();
    s->add_option("--out", spec.out_dir, "output directory")->capture_default_str();
    s->add_option("--seed", spec.seed, "random seed")->capture_default_str();
    s->add_option("--k0", spec.k0, "orders kept beyond the leading one")->capture_default_str();
    s->add_option("--nmax", spec.nmax, "highest correlator order (1 or 2)")->capture_default_str();
    s->add_option("--jobs", spec.jobs, "worker threads")->capture_default_str();
    s->add_option("--N", spec.N, "particle number (overrides the configuration)");
    s->add_option("--steps", steps, "Monte Carlo sweeps after burn-in");
    s->add_option("--chains", spec.chains, "Monte Carlo chains");
    s->add_option("--t-nodes", spec.t_nodes, "interpolation nodes for the free energy")->capture_default_str();
  };
  for (const char* name : {"eqsolve", "expand", "partition", "sample", "verify", "all"}) {
    auto* s = app.add_subcommand(name, name == std::string("all") ? std::string("run every stage in order")
                                                                 : std::string("run the ") + name + " stage");
    common(s);
  }
  auto* plot = app.add_subcommand("plot", "write CSV plot data from existing artifacts");
  plot->add_option("--out", spec.out_dir, "artifact directory")->capture_default_str();
  plot->add_option("--kind", kind, "density, w1 or charfn")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (plot->parsed()) {
    try {
      std::cout << rbody::emit_plot_data(spec.out_dir, kind) << "\n";
      return 0;
    } catch (const rbody::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return rbody::exit_code(e.kind());
    }
  }
  if (steps > 0) spec.steps = static_cast<long>(steps);
  for (auto* s : app.get_subcommands()) spec.stages.push_back(s->get_name());
  rbody::PipelineResult r = rbody::run_pipeline(spec);
  if (r.exit_code != 0) {
    std::cerr << "stage " << r.failed_stage << " failed (exit " << r.exit_code << "): " << r.message << "\n";
    return r.exit_code;
  }
  std::cout << "ok: " << spec.out_dir << "/manifest.json\n";
  return 0;
}
