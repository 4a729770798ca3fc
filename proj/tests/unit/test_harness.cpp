#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qtorus/config.hpp"
#include "qtorus/error.hpp"
#include "qtorus/harness.hpp"

using namespace qtorus;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.H = parse_element("[[[1,0],1,0],[[-1,0],1,0]]");
  cfg.f = FourierElement::character(mode(0, 1));
  cfg.hbar_grid = {0.1, 0.05, 0.025};
  cfg.t_grid = {0.05};
  cfg.trunc_radius = 16;
  cfg.norm_window = 24;
  return cfg;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("order fit on synthetic data") {
    for (double slope : {0.0, 1.0, 2.0}) {
      std::vector<std::pair<double, double>> s;
      for (double h : {0.1, 0.05, 0.025, 0.0125}) s.push_back({h, 3.0 * std::pow(h, slope)});
      const auto fit = fit_order(s);
      CHECK(fit.slope == doctest::Approx(slope).epsilon(1e-12));
      CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
      CHECK(fit.used == 4);
      if (slope != 0.0) CHECK(fit.r2 == doctest::Approx(1.0));
    }
  }

  TEST_CASE("order fit skips non-positive errors and needs three samples") {
    std::vector<std::pair<double, double>> s{{0.1, 0.01}, {0.05, 0.0025}, {0.025, 0.0}, {-0.0125, 1.5625e-4}};
    const auto fit = fit_order(s);
    CHECK(fit.used == 3);
    CHECK(fit.slope == doctest::Approx(2.0));
    s.pop_back();
    CHECK_THROWS_AS(fit_order(s), InsufficientData);
  }

  TEST_CASE("the Hamiltonian itself is conserved on both sides") {
    auto cfg = small_config();
    cfg.f = cfg.H;
    const auto r = egorov_error(cfg.f, cfg.H, 0.1, 0.5, cfg.J, cfg);
    CHECK(r.valid);
    CHECK(r.err.op_lower < 1e-9);
  }

  TEST_CASE("zero time gives zero error") {
    auto cfg = small_config();
    const auto r = egorov_error(cfg.f, cfg.H, 0.1, 0.0, cfg.J, cfg);
    CHECK(r.valid);
    CHECK(r.err.op_lower < 1e-12);
    CHECK(r.err.upper_l1 < 1e-12);
  }

  TEST_CASE("Egorov error on the shear is bounded and shrinks with hbar") {
    auto cfg = small_config();
    const auto a = egorov_error(cfg.f, cfg.H, 0.1, 0.05, cfg.J, cfg);
    const auto b = egorov_error(cfg.f, cfg.H, 0.05, 0.05, cfg.J, cfg);
    CHECK(a.valid);
    CHECK(b.valid);
    CHECK(a.err.lower_l2 <= a.err.op_lower * (1.0 + 1e-9));
    CHECK(a.err.op_lower <= a.err.upper_l1 * (1.0 + 1e-9));
    CHECK(b.err.op_lower < a.err.op_lower);
  }

  TEST_CASE("underresolved classical side marks the record invalid") {
    auto cfg = small_config();
    cfg.tolerances.alias_tol = 1e-30;
    const auto side = classical_side(cfg.f, cfg.H, 1.0, cfg.J, cfg);
    CHECK_FALSE(side.error.empty());
    const auto r = egorov_error(cfg.f, cfg.H, 0.1, side, cfg.J, cfg);
    CHECK_FALSE(r.valid);
    CHECK_FALSE(r.note.empty());
  }

  TEST_CASE("commutator scans") {
    const auto H = parse_element("[[[1,0],1,0],[[-1,0],1,0]]");
    const std::vector<double> grid{0.1, 0.05, 0.025, 0.0125};
    const auto J = SymplecticStructure::standard(2);
    const auto anti = commutator_limit_scan(H, FourierElement::character(mode(0, 1)), grid, J);
    REQUIRE(anti.fit.has_value());
    CHECK(anti.fit->slope == doctest::Approx(2.0).epsilon(0.02));
    CHECK_FALSE(anti.degenerate);

    const auto trivial = commutator_limit_scan(H, FourierElement::unit(2), grid, J);
    CHECK(trivial.degenerate);
    CHECK_FALSE(trivial.fit.has_value());

    const std::vector<double> two{0.1, 0.05};
    CHECK_THROWS_AS(commutator_limit_scan(H, FourierElement::unit(2), two, J), InsufficientData);

    const auto j = to_json(anti);
    CHECK(j["kind"] == "antisymmetric");
    CHECK(j["rows"].size() == 4);
    CHECK(to_string(ResidualKind::one_sided) == "one-sided");
  }

  TEST_CASE("scan with a single pair is insufficient for a fit") {
    auto cfg = small_config();
    cfg.hbar_grid = {0.1};
    const auto r = scan(cfg);
    CHECK(r.records.size() == 1);
    CHECK(r.verdict == "insufficient-for-fit");
    CHECK(r.status == ScanStatus::clean);
  }

  TEST_CASE("scan output is sorted by hbar then t regardless of grid order") {
    auto cfg = small_config();
    cfg.hbar_grid = {0.025, 0.1, 0.05};
    cfg.t_grid = {0.05, 0.0};
    const auto r = scan(cfg);
    REQUIRE(r.records.size() == 6);
    for (std::size_t i = 1; i < r.records.size(); ++i) {
      const auto& a = r.records[i - 1];
      const auto& b = r.records[i];
      CHECK((a.hbar < b.hbar || (a.hbar == b.hbar && a.t < b.t)));
    }
    CHECK(r.records[0].err.op_lower < 1e-12);
    CHECK(r.summary["records"] == 6);
    CHECK(r.summary["per_t"].size() == 2);
    CHECK(r.summary.contains("uniform_in_t"));
  }

  TEST_CASE("scan outputs on disk") {
    auto cfg = small_config();
    const auto dir = temp_dir("qtorus-harness-test");
    cfg.output_dir = dir.string();
    cfg.plot_prefix = "plot";
    const auto r = scan(cfg, false);
    write_scan_outputs(cfg, r);
    std::ifstream csv(dir / "records.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "hbar,t,lower_l2,op_lower,upper_l1,window,iterations,residual,converged,discarded_mass,radius,valid");
    int rows = 0;
    for (std::string line; std::getline(csv, line);) ++rows;
    CHECK(rows == 3);
    CHECK(std::filesystem::exists(dir / "summary.json"));
    CHECK(std::filesystem::exists(dir / "plot_t0.05.dat"));
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("serial and parallel scans write identical CSV") {
    auto cfg = small_config();
    std::ostringstream a, b;
    write_records_csv(a, scan(cfg, true).records);
    write_records_csv(b, scan(cfg, false).records);
    CHECK(a.str() == b.str());
  }
}
