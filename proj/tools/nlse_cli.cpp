// nlse: potentials, ground states, dynamics and table reproduction from the command line.
//
//   nlse potential        --config run.cfg [--out DIR] [--tol X] [--threads K]
//   nlse groundstate      --config run.cfg ...
//   nlse dynamics         --config run.cfg ... | --demo honeycomb [--full]
//   nlse reproduce-table  --id 7 [--full] | --config table.cfg
//
// Exact reference potentials are cached under $NLSE_NONLOCAL_CACHE when it is set.

#include <iostream>

#include "CLI11.hpp"
#include "nlse/fft.hpp"
#include "nlse/harness.hpp"

namespace {

struct Flags {
  std::string config, out, demo;
  double tol = 0.0;
  int threads = 0, id = 0;
  bool full = false;
};

void common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "Run configuration file")->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "Output directory (overrides the config)");
  sub->add_option("--tol", f.tol, "Potential solver tolerance (overrides the config)")->check(CLI::PositiveNumber);
  sub->add_option("--threads", f.threads, "FFTW threads")->check(CLI::PositiveNumber);
  sub->add_flag("--full", f.full, "Full-resolution parameter sets");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal NLSE solver: potentials, ground states, dynamics, accuracy tables"};
  app.set_version_flag("--version", nlse::library_version());
  app.require_subcommand(1);
  Flags f;
  auto* pot = app.add_subcommand("potential", "Potential of a Gaussian density");
  auto* gs = app.add_subcommand("groundstate", "Ground state by the normalized gradient flow");
  auto* dyn = app.add_subcommand("dynamics", "Time-splitting dynamics");
  auto* tab = app.add_subcommand("reproduce-table", "Regenerate an accuracy/energy table as CSV");
  for (auto* s : {pot, gs, dyn, tab}) common(s, f);
  dyn->add_option("--demo", f.demo, "Built-in demo instead of a config")->check(CLI::IsMember({"honeycomb"}));
  tab->add_option("id,--id", f.id, "Table id (1..15; 6 is the timing run)")->check(CLI::Range(1, 15));
  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* sub = app.get_subcommands().front();
    const nlse::Command cmd = nlse::parse_command(sub->get_name());
    nlse::RunConfig cfg;
    if (!f.config.empty()) {
      cfg = nlse::load_config(f.config, cmd);
    } else if (cmd == nlse::Command::ReproduceTable && f.id) {
      cfg.command = cmd;
      cfg.table.id = f.id;
    } else if (cmd == nlse::Command::Dynamics && !f.demo.empty()) {
      cfg.command = cmd;
    } else {
      std::cerr << "error: --config is required"
                << (cmd == nlse::Command::ReproduceTable ? " (or give a table id)"
                    : cmd == nlse::Command::Dynamics     ? " (or --demo honeycomb)"
                                                         : "")
                << '\n';
      return 2;
    }
    if (!f.demo.empty()) cfg.demo = f.demo;
    if (f.id) cfg.table.id = f.id;
    if (!f.out.empty()) cfg.out = f.out;
    if (f.tol > 0) cfg.tol = f.tol;
    if (f.full) cfg.full = true;
    if (f.threads > 0) nlse::fft_set_threads(f.threads);

    const auto rep = nlse::run(cfg, std::cout);
    std::cout << "wrote " << rep.files.size() << " files to " << cfg.out << " in " << rep.seconds << " s\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nlse::exit_code_for(e);
  }
}
