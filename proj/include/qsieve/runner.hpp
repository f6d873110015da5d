#pragma once

#include <string>
#include <vector>

#include "qsieve/environments.hpp"
#include "qsieve/sieve.hpp"

namespace qsieve {

enum class ExperimentKind { Propagate, Sieve, AverageCheck, CpCheck };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

/// Fully resolved run configuration. Loaded from flat-sectioned key = value
/// text (grammar documented in the README); every field is validated against
/// the module preconditions before any compute starts, unknown keys are
/// rejected, and defaults are echoed back into the run metadata.
struct RunConfig {
  // [run]
  ExperimentKind experiment = ExperimentKind::Sieve;
  unsigned seed = 0;  // reserved; the implemented experiments are deterministic

  // [oscillator]
  OscillatorParams osc;

  // [model]
  std::string model_type = "cl";  // cl | correlated | qome
  double gamma = 0.01;
  double kT = 5.0;
  bool weak_dissipation = true;
  double lambda = 1.0;
  double sigma = 1.0;
  double Gamma = 0.05;
  double N = 1.0;

  // [state]
  std::string state_kind = "gaussian";  // gaussian | coherent
  double s = 1.0;
  double x0 = 0.0;
  double p0 = 0.0;
  double alpha_re = 1.0;
  double alpha_im = 0.0;

  // [grid]
  int grid_n = 256;
  double grid_half_span = 10.0;

  // [fock]
  int n_max = 30;

  // [integrator]
  int steps_per_period_grid = 1000;
  int steps_per_period_fock = 2000;
  double periods = 1.0;

  // [sieve]
  double s_min = 0.25;
  double s_max = 4.0;
  int s_points = 33;
  std::string sieve_measure = "period-averaged";  // period-averaged | rate
  std::string sieve_path = "analytic";            // analytic | numeric

  // [cpcheck]
  std::string cp_target = "cl-full";  // cl-full | cl-averaged | qome
  int cp_dim = 12;

  // [average]
  int avg_dim = 12;
  int avg_samples = 64;
  int avg_samples_check = 8;

  // [output]
  std::string out_dir = "out";

  EnvironmentModel environment() const;
  void validate() const;
};

/// Parses and validates a config file. Parse errors carry the line number;
/// validation errors name the violated module precondition.
RunConfig load_config(const std::string& path);

/// Same grammar, parsed from an in-memory string.
RunConfig load_config_text(const std::string& text);

/// Serializes a fully resolved config; load(emit(c)) == c, byte for byte.
std::string emit_config(const RunConfig& config);

/// Runs the configured experiment and writes metadata, numeric series and
/// plot-data files into out_dir. Returns the exit status (0 success, 3 when
/// degradation flags are raised and strict is set).
int run(const RunConfig& config, const std::string& out_dir, bool strict);

/// Rewrites the gnuplot-compatible .dat files from the result files already
/// present in run_dir. Throws IoError when expected artifacts are missing.
void emit_plotdata(const std::string& run_dir);

}  // namespace qsieve
