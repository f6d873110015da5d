#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "qsieve/runner.hpp"

using namespace qsieve;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "qsieve_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("config round trip is byte exact") {
  RunConfig config;
  config.experiment = ExperimentKind::Propagate;
  config.gamma = 0.123456789012345678;
  config.s = std::sqrt(2.0);
  config.grid_n = 128;
  config.model_type = "correlated";
  std::string emitted = emit_config(config);
  RunConfig reloaded = load_config_text(emitted);
  CHECK(emit_config(reloaded) == emitted);
}

TEST_CASE("parser reports line numbers and rejects unknown keys") {
  CHECK_THROWS_WITH_AS(load_config_text("[model]\ngamma == 0.1\n"),
                       doctest::Contains("line 2"), ValidationError);
  CHECK_THROWS_WITH_AS(load_config_text("[model]\nbogus = 1\n"),
                       doctest::Contains("model.bogus"), ValidationError);
  CHECK_THROWS_WITH_AS(load_config_text("gamma = 0.1\n"),
                       doctest::Contains("outside any [section]"), ValidationError);
  CHECK_THROWS_WITH_AS(load_config_text("[model]\ngamma = zero\n"),
                       doctest::Contains("line 2"), ValidationError);
  CHECK_THROWS_AS(load_config(" /no/such/file.ini"), IoError);
}

TEST_CASE("validation rejects inconsistent configs") {
  RunConfig config;
  config.model_type = "mystery";
  CHECK_THROWS_AS(config.validate(), ValidationError);

  RunConfig bad_grid;
  bad_grid.grid_n = 100;  // not a power of two
  CHECK_THROWS_AS(bad_grid.validate(), ValidationError);

  RunConfig bad_sieve;
  bad_sieve.sieve_measure = "entropy";
  CHECK_THROWS_AS(bad_sieve.validate(), ValidationError);
}

TEST_CASE("comments and blank lines are accepted") {
  RunConfig config = load_config_text(
      "# comment\n\n[model]\n; another comment\ngamma = 0.5\n[run]\nexperiment = cp-check\n");
  CHECK(config.gamma == 0.5);
  CHECK(config.experiment == ExperimentKind::CpCheck);
}

TEST_CASE("sieve run writes its artifacts and plot data") {
  fs::path dir = scratch_dir("sieve_run");
  RunConfig config;
  config.experiment = ExperimentKind::Sieve;
  int code = run(config, dir.string(), /*strict=*/false);
  CHECK(code == 0);
  for (const char* name : {"metadata.ini", "landscape.tsv", "summary.ini",
                           "sieve_landscape.dat"}) {
    CHECK(fs::exists(dir / name));
  }
  CHECK(slurp(dir / "summary.ini").find("argmin_s = 1\n") != std::string::npos);
}

TEST_CASE("plot data can be regenerated and requires artifacts") {
  fs::path dir = scratch_dir("plotdata");
  RunConfig config;
  config.experiment = ExperimentKind::AverageCheck;
  REQUIRE(run(config, dir.string(), false) == 0);
  std::string before = slurp(dir / "average_spectrum.dat");
  fs::remove(dir / "average_spectrum.dat");
  emit_plotdata(dir.string());
  CHECK(slurp(dir / "average_spectrum.dat") == before);

  fs::path empty = scratch_dir("plotdata_empty");
  CHECK_THROWS_AS(emit_plotdata(empty.string()), IoError);
}

TEST_CASE("strict mode surfaces degradation as exit code 3") {
  // A short propagation with a healthy setup must not be degraded.
  fs::path dir = scratch_dir("strict_run");
  RunConfig config;
  config.experiment = ExperimentKind::Propagate;
  config.periods = 0.05;
  config.grid_n = 128;
  config.steps_per_period_grid = 700;
  CHECK(run(config, dir.string(), /*strict=*/true) == 0);
}

TEST_CASE("experiment names round trip") {
  for (ExperimentKind kind : {ExperimentKind::Propagate, ExperimentKind::Sieve,
                              ExperimentKind::AverageCheck, ExperimentKind::CpCheck}) {
    CHECK(experiment_from_string(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(experiment_from_string("fold"), ValidationError);
}
