// Command-line front end. Talks to the library exclusively through the C API
// so the shared-library boundary gets exercised on every run.
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "qsieve/qsieve.h"

namespace {

int fail(qsieve_status status) {
  std::fprintf(stderr, "error: %s\n", qsieve_last_error());
  return static_cast<int>(status);
}

int run_experiment(const std::string& experiment, const std::string& config_path,
                   const std::string& out_dir, bool strict) {
  qsieve_config* config = nullptr;
  qsieve_status status = config_path.empty()
                             ? qsieve_config_default(experiment.c_str(), &config)
                             : qsieve_config_load(config_path.c_str(), &config);
  if (status != QSIEVE_OK) return fail(status);

  status = qsieve_config_set(config, "run.experiment", experiment.c_str());
  if (status != QSIEVE_OK) {
    qsieve_config_free(config);
    return fail(status);
  }

  status = qsieve_run(config, out_dir.empty() ? nullptr : out_dir.c_str(), strict ? 1 : 0);
  qsieve_config_free(config);
  if (status != QSIEVE_OK) return fail(status);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decoherence toolkit: density-matrix propagation, generator averaging, "
               "complete-positivity certification and the predictability sieve"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qsieve_version()));

  std::string config_path, out_dir;
  bool strict = false;

  auto add_run_command = [&](const std::string& name, const std::string& desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->add_option("--config", config_path, "Config file (key = value sections)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "Output directory (overrides the config)");
    cmd->add_flag("--strict", strict, "Turn numeric degradation flags into exit code 3");
    return cmd;
  };

  add_run_command("propagate", "Propagate a density matrix and record observables");
  add_run_command("sieve", "Scan the squeeze family for minimal entropy production");
  add_run_command("average-check",
                  "Average the Caldeira-Leggett generator over one period and fit the "
                  "quantum optical form");
  add_run_command("cp-check", "Certify conditional complete positivity of a generator");

  CLI::App* plot = app.add_subcommand("plotdata", "Regenerate .dat files from run artifacts");
  std::string run_dir;
  plot->add_option("--out", run_dir, "Run directory holding the artifacts")->required();

  CLI11_PARSE(app, argc, argv);

  if (plot->parsed()) {
    qsieve_status status = qsieve_emit_plotdata(run_dir.c_str());
    return status == QSIEVE_OK ? 0 : fail(status);
  }
  const std::string name = app.get_subcommands().front()->get_name();
  return run_experiment(name, config_path, out_dir, strict);
}
