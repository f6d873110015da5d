#include "qsieve/runner.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "qsieve/dynamics.hpp"

namespace fs = std::filesystem;

namespace qsieve {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw ValidationError("expected a number, got '" + text + "'");
  }
  return v;
}

long parse_int(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0') {
    throw ValidationError("expected an integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ValidationError("expected true or false, got '" + text + "'");
}

struct Field {
  std::string section, key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

const std::vector<Field>& fields() {
  auto d = [](std::string sec, std::string key, double RunConfig::* member) {
    return Field{std::move(sec), std::move(key),
                 [member](const RunConfig& c) { return fmt17(c.*member); },
                 [member](RunConfig& c, const std::string& v) { c.*member = parse_double(v); }};
  };
  auto i = [](std::string sec, std::string key, int RunConfig::* member) {
    return Field{std::move(sec), std::move(key),
                 [member](const RunConfig& c) { return std::to_string(c.*member); },
                 [member](RunConfig& c, const std::string& v) {
                   c.*member = static_cast<int>(parse_int(v));
                 }};
  };
  auto b = [](std::string sec, std::string key, bool RunConfig::* member) {
    return Field{std::move(sec), std::move(key),
                 [member](const RunConfig& c) { return (c.*member) ? "true" : "false"; },
                 [member](RunConfig& c, const std::string& v) { c.*member = parse_bool(v); }};
  };
  auto s = [](std::string sec, std::string key, std::string RunConfig::* member) {
    return Field{std::move(sec), std::move(key),
                 [member](const RunConfig& c) { return c.*member; },
                 [member](RunConfig& c, const std::string& v) { c.*member = v; }};
  };
  static const std::vector<Field> table = {
      Field{"run", "experiment",
            [](const RunConfig& c) { return to_string(c.experiment); },
            [](RunConfig& c, const std::string& v) { c.experiment = experiment_from_string(v); }},
      Field{"run", "seed",
            [](const RunConfig& c) { return std::to_string(c.seed); },
            [](RunConfig& c, const std::string& v) {
              long raw = parse_int(v);
              if (raw < 0) throw ValidationError("seed must be non-negative");
              c.seed = static_cast<unsigned>(raw);
            }},
      Field{"oscillator", "m",
            [](const RunConfig& c) { return fmt17(c.osc.m); },
            [](RunConfig& c, const std::string& v) { c.osc.m = parse_double(v); }},
      Field{"oscillator", "omega",
            [](const RunConfig& c) { return fmt17(c.osc.omega); },
            [](RunConfig& c, const std::string& v) { c.osc.omega = parse_double(v); }},
      Field{"oscillator", "hbar",
            [](const RunConfig& c) { return fmt17(c.osc.hbar); },
            [](RunConfig& c, const std::string& v) { c.osc.hbar = parse_double(v); }},
      s("model", "model_type", &RunConfig::model_type),
      d("model", "gamma", &RunConfig::gamma),
      d("model", "kT", &RunConfig::kT),
      b("model", "weak_dissipation", &RunConfig::weak_dissipation),
      d("model", "lambda", &RunConfig::lambda),
      d("model", "sigma", &RunConfig::sigma),
      d("model", "Gamma", &RunConfig::Gamma),
      d("model", "N", &RunConfig::N),
      s("state", "state_kind", &RunConfig::state_kind),
      d("state", "s", &RunConfig::s),
      d("state", "x0", &RunConfig::x0),
      d("state", "p0", &RunConfig::p0),
      d("state", "alpha_re", &RunConfig::alpha_re),
      d("state", "alpha_im", &RunConfig::alpha_im),
      i("grid", "grid_n", &RunConfig::grid_n),
      d("grid", "grid_half_span", &RunConfig::grid_half_span),
      i("fock", "n_max", &RunConfig::n_max),
      i("integrator", "steps_per_period_grid", &RunConfig::steps_per_period_grid),
      i("integrator", "steps_per_period_fock", &RunConfig::steps_per_period_fock),
      d("integrator", "periods", &RunConfig::periods),
      d("sieve", "s_min", &RunConfig::s_min),
      d("sieve", "s_max", &RunConfig::s_max),
      i("sieve", "s_points", &RunConfig::s_points),
      s("sieve", "sieve_measure", &RunConfig::sieve_measure),
      s("sieve", "sieve_path", &RunConfig::sieve_path),
      s("cpcheck", "cp_target", &RunConfig::cp_target),
      i("cpcheck", "cp_dim", &RunConfig::cp_dim),
      i("average", "avg_dim", &RunConfig::avg_dim),
      i("average", "avg_samples", &RunConfig::avg_samples),
      i("average", "avg_samples_check", &RunConfig::avg_samples_check),
      s("output", "out_dir", &RunConfig::out_dir),
  };
  return table;
}

std::string trim(const std::string& text) {
  size_t a = text.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = text.find_last_not_of(" \t\r");
  return text.substr(a, b - a + 1);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw IoError("write failed on " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("missing artifact: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string join_warnings_block(const std::vector<std::string>& warnings) {
  std::ostringstream out;
  out << "[warnings]\ncount = " << warnings.size() << "\n";
  for (size_t i = 0; i < warnings.size(); ++i) {
    out << "warning_" << i << " = " << warnings[i] << "\n";
  }
  return out.str();
}

// Two-column .dat extraction from a tab-separated result file; tokens are
// copied verbatim so plot data stays bit-identical to the source of truth.
void tsv_to_dat(const fs::path& tsv, const fs::path& dat, const std::string& header) {
  std::istringstream in(read_file(tsv));
  std::ostringstream out;
  out << "# " << header << "\n";
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields_in(line);
    std::string c0, c1;
    if (fields_in >> c0 >> c1) out << c0 << " " << c1 << "\n";
  }
  write_file(dat, out.str());
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Propagate: return "propagate";
    case ExperimentKind::Sieve: return "sieve";
    case ExperimentKind::AverageCheck: return "average-check";
    case ExperimentKind::CpCheck: return "cp-check";
  }
  throw ValidationError("unknown experiment kind");
}

ExperimentKind experiment_from_string(const std::string& name) {
  if (name == "propagate") return ExperimentKind::Propagate;
  if (name == "sieve") return ExperimentKind::Sieve;
  if (name == "average-check") return ExperimentKind::AverageCheck;
  if (name == "cp-check") return ExperimentKind::CpCheck;
  throw ValidationError("unknown experiment '" + name +
                        "' (expected propagate | sieve | average-check | cp-check)");
}

EnvironmentModel RunConfig::environment() const {
  if (model_type == "cl") {
    return CaldeiraLeggettParams{gamma, kT, osc, weak_dissipation};
  }
  if (model_type == "correlated") {
    return CorrelatedNoiseParams{lambda, sigma};
  }
  if (model_type == "qome") {
    return QOMEParams{Gamma, N, osc};
  }
  throw ValidationError("unknown model_type '" + model_type +
                        "' (expected cl | correlated | qome)");
}

void RunConfig::validate() const {
  osc.validate();
  std::visit([](const auto& p) { p.validate(); }, environment());
  if (state_kind != "gaussian" && state_kind != "coherent") {
    throw ValidationError("state_kind must be gaussian or coherent");
  }
  if (!(s > 0.0)) throw ValidationError("state squeeze s must be strictly positive");
  if (!(grid_half_span > 0.0)) throw ValidationError("grid_half_span must be positive");
  PositionGrid::symmetric(grid_half_span, grid_n).validate();
  if (n_max < 2) throw ValidationError("n_max must be at least 2");
  if (steps_per_period_grid < 1 || steps_per_period_fock < 1) {
    throw ValidationError("integrator step counts must be positive");
  }
  if (!(periods > 0.0)) throw ValidationError("periods must be positive");
  if (sieve_measure != "period-averaged" && sieve_measure != "rate") {
    throw ValidationError("sieve_measure must be period-averaged or rate");
  }
  if (sieve_path != "analytic" && sieve_path != "numeric") {
    throw ValidationError("sieve_path must be analytic or numeric");
  }
  if (!(s_min > 0.0) || !(s_max > s_min) || s_points < 2) {
    throw ValidationError("sieve grid needs 0 < s_min < s_max and s_points >= 2");
  }
  if (cp_target != "cl-full" && cp_target != "cl-averaged" && cp_target != "qome") {
    throw ValidationError("cp_target must be cl-full, cl-averaged or qome");
  }
  if (cp_dim < 2 || avg_dim < 2) throw ValidationError("cp_dim and avg_dim must be at least 2");
  if (avg_samples < 1 || avg_samples_check < 1) {
    throw ValidationError("averaging sample counts must be positive");
  }
  if (out_dir.empty()) throw ValidationError("out_dir must not be empty");
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_config_text(buf.str());
}

RunConfig load_config_text(const std::string& text_in) {
  std::istringstream in(text_in);
  RunConfig config;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string text = trim(line);
    if (text.empty() || text[0] == '#' || text[0] == ';') continue;
    if (text.front() == '[') {
      if (text.back() != ']' || text.size() < 3) {
        throw ValidationError("parse error at line " + std::to_string(line_no) +
                              ": malformed section header");
      }
      section = trim(text.substr(1, text.size() - 2));
      continue;
    }
    size_t eq = text.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("parse error at line " + std::to_string(line_no) +
                            ": expected key = value");
    }
    if (section.empty()) {
      throw ValidationError("parse error at line " + std::to_string(line_no) +
                            ": key outside any [section]");
    }
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    const Field* field = nullptr;
    for (const auto& f : fields()) {
      if (f.section == section && f.key == key) {
        field = &f;
        break;
      }
    }
    if (field == nullptr) {
      throw ValidationError("unknown key '" + section + "." + key + "' at line " +
                            std::to_string(line_no));
    }
    try {
      field->set(config, value);
    } catch (const ValidationError& e) {
      throw ValidationError("parse error at line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

std::string emit_config(const RunConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) out << "\n";
      section = f.section;
      out << "[" << section << "]\n";
    }
    out << f.key << " = " << f.get(config) << "\n";
  }
  return out.str();
}

namespace {

PropagationResult run_propagate(const RunConfig& config, const fs::path& dir) {
  EnvironmentModel model = config.environment();
  PropagationResult result;
  if (std::holds_alternative<QOMEParams>(model)) {
    const auto& q = std::get<QOMEParams>(model);
    FockDensityMatrix rho0 = [&] {
      if (config.state_kind == "coherent") {
        return make_coherent_fock(Complex(config.alpha_re, config.alpha_im), config.n_max);
      }
      if (config.x0 != 0.0 || config.p0 != 0.0) {
        throw ValidationError("displaced Gaussian initial states are grid-only; "
                              "use state_kind = coherent for the QOME");
      }
      return make_squeezed_fock(config.s, config.n_max);
    }();
    double dt = config.osc.period() / config.steps_per_period_fock;
    int n_steps = static_cast<int>(std::lround(config.periods * config.steps_per_period_fock));
    result = propagate_fock(rho0, q, dt, n_steps);
  } else {
    GaussianPureState state{config.x0, config.p0, config.s};
    if (config.state_kind == "coherent") {
      Complex alpha(config.alpha_re, config.alpha_im);
      state.x0 = std::sqrt(2.0 * config.osc.hbar / (config.osc.m * config.osc.omega)) *
                 alpha.real();
      state.p0 = std::sqrt(2.0 * config.osc.m * config.osc.omega * config.osc.hbar) *
                 alpha.imag();
      state.s = 1.0;
    }
    PositionGrid grid = PositionGrid::symmetric(config.grid_half_span, config.grid_n);
    ComplexVector psi = make_gaussian_wavefunction(state, grid, config.osc);
    GridDensityMatrix rho0 = GridDensityMatrix::from_wavefunction(psi, grid);
    double mw2 = config.osc.m * config.osc.omega * config.osc.omega;
    auto potential = [mw2](double x) { return 0.5 * mw2 * x * x; };
    double dt = config.osc.period() / config.steps_per_period_grid;
    int n_steps = static_cast<int>(std::lround(config.periods * config.steps_per_period_grid));
    result = propagate_grid(rho0, model, potential, dt, n_steps, config.osc);
  }

  std::ostringstream tsv;
  tsv << "# time\tlinear_entropy\tpurity\tmean_x\tmean_p\tvar_x\tvar_p\ttrace_drift\n";
  for (size_t i = 0; i < result.times.size(); ++i) {
    tsv << fmt17(result.times[i]) << "\t" << fmt17(result.linear_entropy[i]) << "\t"
        << fmt17(result.purity[i]) << "\t" << fmt17(result.mean_x[i]) << "\t"
        << fmt17(result.mean_p[i]) << "\t" << fmt17(result.var_x[i]) << "\t"
        << fmt17(result.var_p[i]) << "\t" << fmt17(result.trace_drift[i]) << "\n";
  }
  write_file(dir / "series.tsv", tsv.str());
  return result;
}

SieveResult run_sieve_experiment(const RunConfig& config, const fs::path& dir) {
  std::vector<double> s_grid = log_spaced(config.s_min, config.s_max, config.s_points);
  EntropyMeasure measure = (config.sieve_measure == "rate") ? EntropyMeasure::InstantaneousRate
                                                            : EntropyMeasure::PeriodAveraged;
  SievePath path = (config.sieve_path == "numeric") ? SievePath::Numeric : SievePath::Analytic;
  SieveResult result = run_sieve(s_grid, config.environment(), measure, config.osc, path);

  std::ostringstream tsv;
  tsv << "# s\tmeasure\n";
  for (size_t i = 0; i < result.s_grid.size(); ++i) {
    tsv << fmt17(result.s_grid[i]) << "\t" << fmt17(result.measure[i]) << "\n";
  }
  write_file(dir / "landscape.tsv", tsv.str());

  std::ostringstream summary;
  summary << "[sieve]\n"
          << "model = " << result.model << "\n"
          << "measure = " << config.sieve_measure << "\n"
          << "path = " << config.sieve_path << "\n"
          << "argmin_index = " << result.argmin_index << "\n"
          << "argmin_s = " << fmt17(result.s_grid[result.argmin_index]) << "\n"
          << "argmin_value = " << fmt17(result.measure[result.argmin_index]) << "\n"
          << "flat = " << (result.flat ? "true" : "false") << "\n"
          << "tie = " << (result.tie ? "true" : "false") << "\n\n"
          << join_warnings_block(result.warnings);
  write_file(dir / "summary.ini", summary.str());
  return result;
}

Superoperator cp_target_generator(const RunConfig& config) {
  int n_max = config.cp_dim - 1;
  if (config.cp_target == "qome") {
    return qome_generator(QOMEParams{config.Gamma, config.N, config.osc}, n_max);
  }
  CaldeiraLeggettParams cl{config.gamma, config.kT, config.osc, /*weak_dissipation=*/false};
  if (config.cp_target == "cl-full") {
    return caldeira_leggett_generator(cl, n_max, /*include_hamiltonian=*/true);
  }
  Superoperator delta = caldeira_leggett_generator(cl, n_max, /*include_hamiltonian=*/false);
  ComplexMatrix h = FockOperators::make(n_max, config.osc).h;
  return average_generator(delta, h, config.osc.omega, config.avg_samples, config.osc.hbar);
}

void write_spectrum(const fs::path& dir, const Eigen::VectorXd& spectrum) {
  std::ostringstream tsv;
  tsv << "# index\teigenvalue\n";
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    tsv << i << "\t" << fmt17(spectrum[i]) << "\n";
  }
  write_file(dir / "spectrum.tsv", tsv.str());
}

void run_cp_check(const RunConfig& config, const fs::path& dir) {
  CpCheckResult cp = cp_check(cp_target_generator(config));
  std::ostringstream verdict;
  verdict << "[cpcheck]\n"
          << "target = " << config.cp_target << "\n"
          << "dim = " << config.cp_dim << "\n"
          << "min_eigenvalue = " << fmt17(cp.min_eigenvalue) << "\n"
          << "choi_norm = " << fmt17(cp.choi_norm) << "\n"
          << "tolerance = " << fmt17(1e-8 * cp.choi_norm) << "\n"
          << "is_gksl = " << (cp.is_gksl ? "true" : "false") << "\n";
  write_file(dir / "verdict.ini", verdict.str());
  write_spectrum(dir, cp.spectrum);
}

void run_average_check(const RunConfig& config, const fs::path& dir) {
  int n_max = config.avg_dim - 1;
  CaldeiraLeggettParams cl{config.gamma, config.kT, config.osc, /*weak_dissipation=*/false};
  Superoperator delta = caldeira_leggett_generator(cl, n_max, /*include_hamiltonian=*/false);
  ComplexMatrix h = FockOperators::make(n_max, config.osc).h;
  Superoperator avg_main =
      average_generator(delta, h, config.osc.omega, config.avg_samples, config.osc.hbar);
  Superoperator avg_check =
      average_generator(delta, h, config.osc.omega, config.avg_samples_check, config.osc.hbar);
  double m_invariance = (avg_main.matrix() - avg_check.matrix()).cwiseAbs().maxCoeff();
  QomeFit fit = fit_qome_form(avg_main, config.osc);
  CpCheckResult cp = cp_check(avg_main);

  double hw = config.osc.hbar * config.osc.omega;
  std::ostringstream result;
  result << "[average]\n"
         << "dim = " << config.avg_dim << "\n"
         << "samples = " << config.avg_samples << "\n"
         << "samples_check = " << config.avg_samples_check << "\n"
         << "Gamma_fit = " << fmt17(fit.Gamma) << "\n"
         << "N_fit = " << fmt17(fit.N) << "\n"
         << "Gamma_expected = " << fmt17(2.0 * config.gamma) << "\n"
         << "N_expected = " << fmt17(config.kT / hw - 0.5) << "\n"
         << "residual = " << fmt17(fit.residual) << "\n"
         << "m_invariance = " << fmt17(m_invariance) << "\n"
         << "min_eigenvalue = " << fmt17(cp.min_eigenvalue) << "\n"
         << "is_gksl = " << (cp.is_gksl ? "true" : "false") << "\n";
  write_file(dir / "result.ini", result.str());
  write_spectrum(dir, cp.spectrum);
}

}  // namespace

int run(const RunConfig& config, const std::string& out_dir, bool strict) {
  config.validate();
  fs::path dir = out_dir.empty() ? fs::path(config.out_dir) : fs::path(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());

  bool degraded = false;
  std::vector<std::string> warnings;
  switch (config.experiment) {
    case ExperimentKind::Propagate: {
      PropagationResult r = run_propagate(config, dir);
      degraded = r.degraded;
      warnings = r.warnings;
      break;
    }
    case ExperimentKind::Sieve: {
      SieveResult r = run_sieve_experiment(config, dir);
      warnings = r.warnings;
      break;
    }
    case ExperimentKind::CpCheck:
      run_cp_check(config, dir);
      break;
    case ExperimentKind::AverageCheck:
      run_average_check(config, dir);
      break;
  }

  std::ostringstream meta;
  meta << emit_config(config) << "\n[meta]\n"
       << "format_version = 1\n"
       << "degraded = " << (degraded ? "true" : "false") << "\n\n"
       << join_warnings_block(warnings);
  write_file(dir / "metadata.ini", meta.str());
  emit_plotdata(dir.string());

  return (degraded && strict) ? 3 : 0;
}

void emit_plotdata(const std::string& run_dir) {
  fs::path dir(run_dir);
  std::istringstream meta(read_file(dir / "metadata.ini"));
  std::string line, experiment;
  while (std::getline(meta, line)) {
    std::string text = trim(line);
    if (text.rfind("experiment", 0) == 0) {
      size_t eq = text.find('=');
      if (eq != std::string::npos) experiment = trim(text.substr(eq + 1));
      break;
    }
  }
  if (experiment.empty()) throw IoError("metadata.ini lacks an experiment entry");

  switch (experiment_from_string(experiment)) {
    case ExperimentKind::Propagate:
      tsv_to_dat(dir / "series.tsv", dir / "propagate_entropy.dat", "time linear_entropy");
      break;
    case ExperimentKind::Sieve:
      tsv_to_dat(dir / "landscape.tsv", dir / "sieve_landscape.dat", "s measure");
      break;
    case ExperimentKind::CpCheck:
      tsv_to_dat(dir / "spectrum.tsv", dir / "cp_spectrum.dat", "index eigenvalue");
      break;
    case ExperimentKind::AverageCheck:
      tsv_to_dat(dir / "spectrum.tsv", dir / "average_spectrum.dat", "index eigenvalue");
      break;
  }
}

}  // namespace qsieve
