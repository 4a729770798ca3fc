#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "qtorus/config.hpp"
#include "qtorus/error.hpp"

using namespace qtorus;

namespace {

const char* kMinimal =
    "# shear example\n"
    "H = [[[1,0],1,0],[[-1,0],1,0]]\n"
    "f = [[[0,1],1,0]]   # observable\n"
    "t_grid = [0.5, 0.25]\n";

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

struct EnvGuard {
  EnvGuard() { unsetenv("QTORUS_OUTPUT_DIR"); }
  ~EnvGuard() { unsetenv("QTORUS_OUTPUT_DIR"); }
};

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("minimal config takes defaults") {
    EnvGuard env;
    const auto cfg = parse(kMinimal);
    CHECK(cfg.H.size() == 2);
    CHECK(cfg.f.coeff(mode(0, 1)) == complex(1.0));
    CHECK(cfg.t_grid == std::vector<double>{0.5, 0.25});
    CHECK(cfg.hbar_grid == std::vector<double>{0.1, 0.05, 0.025, 0.0125});
    CHECK(cfg.ode_step == 1e-3);
    CHECK(cfg.trunc_radius == 32);
    CHECK(cfg.norm_window == 32);
    CHECK(cfg.norm_method == NormMethod::lanczos);
    CHECK(cfg.thresholds.ratio_min == 0.35);
    CHECK(cfg.output_dir == ".");
    CHECK(cfg.plot_prefix.empty());
  }

  TEST_CASE("every key is accepted") {
    EnvGuard env;
    const auto cfg = parse(std::string(kMinimal) +
                           "J = [[0,-1],[1,0]]\n"
                           "hbar_grid = [0.2, 0.1, 0.05]\n"
                           "ode_step = 5e-4\n"
                           "trunc_radius = 16\n"
                           "norm_window = 24\n"
                           "series_tol = 1e-10\n"
                           "alias_tol = 1e-5\n"
                           "norm_tol = 1e-9\n"
                           "norm_method = power\n"
                           "ratio_min = 0.2\n"
                           "ratio_max = 0.3\n"
                           "min_order = 1.5\n"
                           "max_discarded = 1e-4\n"
                           "output_dir = \"out dir\"\n"
                           "csv_path = r.csv\n"
                           "summary_path = s.json\n"
                           "plot_prefix = plot\n");
    CHECK(cfg.J(0, 1) == -1.0);
    CHECK(cfg.hbar_grid.size() == 3);
    CHECK(cfg.ode_step == 5e-4);
    CHECK(cfg.trunc_radius == 16);
    CHECK(cfg.norm_window == 24);
    CHECK(cfg.tolerances.series_tol == 1e-10);
    CHECK(cfg.tolerances.alias_tol == 1e-5);
    CHECK(cfg.tolerances.norm_tol == 1e-9);
    CHECK(cfg.norm_method == NormMethod::power);
    CHECK(cfg.thresholds.ratio_min == 0.2);
    CHECK(cfg.thresholds.ratio_max == 0.3);
    CHECK(cfg.thresholds.min_order == 1.5);
    CHECK(cfg.thresholds.max_discarded == 1e-4);
    CHECK(cfg.output_dir == "out dir");
    CHECK(cfg.csv_path == "r.csv");
    CHECK(cfg.summary_path == "s.json");
    CHECK(cfg.plot_prefix == "plot");
    CHECK(output_path(cfg, cfg.csv_path) == "out dir/r.csv");
  }

  TEST_CASE("environment overrides the output directory") {
    EnvGuard env;
    setenv("QTORUS_OUTPUT_DIR", "/tmp/qtorus-env", 1);
    CHECK(parse(std::string(kMinimal) + "output_dir = elsewhere\n").output_dir == "/tmp/qtorus-env");
  }

  TEST_CASE("output paths") {
    ExperimentConfig cfg;
    cfg.output_dir = "results";
    CHECK(output_path(cfg, "a.csv") == "results/a.csv");
    CHECK(output_path(cfg, "/abs/a.csv") == "/abs/a.csv");
  }

  TEST_CASE("invalid configurations") {
    EnvGuard env;
    const std::string base(kMinimal);
    CHECK_THROWS_AS(parse(base + "bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse(base + "t_grid = [1]\n"), ConfigError);
    CHECK_THROWS_AS(parse(base + "no equals sign\n"), ConfigError);
    CHECK_THROWS_AS(parse("f = [[[0,1],1,0]]\nt_grid=[1]\n"), ConfigError);
    CHECK_THROWS_AS(parse("H = [[[1,0],1,0],[[-1,0],1,0]]\nt_grid=[1]\n"), ConfigError);
    CHECK_THROWS_AS(parse("H = [[[1,0],1,0],[[-1,0],1,0]]\nf = [[[0,1],1,0]]\nt_grid = []\n"), ConfigError);
    CHECK_THROWS_AS(parse(base + "hbar_grid = [0.1, 0]\n"), ConfigError);
    CHECK_THROWS_AS(parse(base + "hbar_grid = [1.5]\n"), ConfigError);
    CHECK_THROWS_AS(parse(base + "hbar_grid = []\n"), ConfigError);
    CHECK_THROWS_AS(parse("H = [[[1,0],1,0]]\nf = [[[0,1],1,0]]\nt_grid = [1]\n"), ConfigError);
    CHECK_THROWS_AS(parse(base + "J = [[0,1],[1,0]]\n"), ConfigError);
    CHECK_THROWS_AS(parse(base + "J = [[0,1,0],[-1,0,0],[0,0,0]]\n"), ConfigError);
    CHECK_THROWS_AS(parse(base + "ode_step = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse(base + "trunc_radius = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse(base + "norm_window = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse(base + "norm_tol = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse(base + "norm_method = svd\n"), ConfigError);
    CHECK_THROWS_AS(parse(base + "ratio_min = 0.9\n"), ConfigError);
    CHECK_THROWS_AS(parse(base + "f = [[[0,1],1]]\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/qtorus.cfg"), ConfigError);
  }

  TEST_CASE("symplectic literal") {
    const auto J = parse_symplectic("[[0,2],[-2,0]]");
    CHECK(J(0, 1) == 2.0);
    CHECK_THROWS_AS(parse_symplectic("[[0,1],[1,0]]"), ConfigError);
    CHECK_THROWS_AS(parse_symplectic("[0,1"), ConfigError);
  }
}
