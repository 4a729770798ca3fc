// qtorus: command-line front end for the deformed-torus library.
//
// Exit codes: 0 clean, 1 partial or runtime failure, 2 invalid input/config.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtorus/classical_flow.hpp"
#include "qtorus/config.hpp"
#include "qtorus/cstar_norm.hpp"
#include "qtorus/deformed_product.hpp"
#include "qtorus/error.hpp"
#include "qtorus/fourier_element.hpp"
#include "qtorus/harness.hpp"
#include "qtorus/kernels.hpp"
#include "qtorus/lattice_algebra.hpp"
#include "qtorus/quantum_flow.hpp"

namespace {

using namespace qtorus;
using nlohmann::json;

constexpr int kExitClean = 0;
constexpr int kExitPartial = 1;
constexpr int kExitInvalid = 2;

struct Common {
  std::string J;
  int dim = 2;
  int threads = 0;
  std::string out;
};

SymplecticStructure structure(const Common& c) {
  return c.J.empty() ? SymplecticStructure::standard(c.dim) : parse_symplectic(c.J);
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw Error("cannot write " + c.out);
  f << text << '\n';
}

json element_json(const FourierElement& f) { return json::parse(format_element(f)); }

std::vector<Point> parse_points(const std::string& text, int dim) {
  const json j = json::parse(text);
  std::vector<Point> pts;
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<int>(row.size()) != dim) throw InvalidArgument("point has wrong dimension");
    Point p{};
    for (int a = 0; a < dim; ++a) p[static_cast<std::size_t>(a)] = row[static_cast<std::size_t>(a)].get<double>();
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strict deformation quantization of the torus: products, flows, norms and Egorov scans"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--threads", common.threads, "OpenMP threads (0 keeps the runtime default)");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--J", common.J, "skew matrix as JSON rows (default: standard symplectic)");
    sub->add_option("--dim", common.dim, "torus dimension")->check(CLI::Range(1, kMaxDim));
    sub->add_option("-o,--out", common.out, "output file (default stdout)");
  };

  // product
  std::string f_text, g_text, h_text;
  double hbar = 0.0;
  int cap = kDefaultModeCap;
  auto* product = app.add_subcommand("product", "deformed product f x_hbar g (pointwise at hbar = 0)");
  product->add_option("f", f_text, "element literal")->required();
  product->add_option("g", g_text, "element literal")->required();
  product->add_option("--hbar", hbar, "deformation parameter");
  product->add_option("--cap", cap, "mode cap");
  add_common(product);

  // bracket
  bool as_commutator = false;
  auto* bracket = app.add_subcommand("bracket", "Poisson bracket {f, g}, or [f, g]_hbar with --commutator");
  bracket->add_option("f", f_text, "element literal")->required();
  bracket->add_option("g", g_text, "element literal")->required();
  bracket->add_flag("--commutator", as_commutator, "deformed commutator instead of the bracket");
  bracket->add_option("--hbar", hbar, "deformation parameter for --commutator");
  bracket->add_option("--cap", cap, "mode cap");
  add_common(bracket);

  // flow
  double t = 0.0, ode_step = 1e-3;
  std::string points_text;
  int random_points = 0;
  unsigned seed = 1;
  bool with_jac = false;
  auto* flow = app.add_subcommand("flow", "integrate the Hamiltonian flow of H on sample points (CSV)");
  flow->add_option("H", h_text, "Hamiltonian literal")->required();
  flow->add_option("--t", t, "flow time")->required();
  flow->add_option("--points", points_text, "JSON list of points");
  flow->add_option("--random", random_points, "number of uniform random points");
  flow->add_option("--seed", seed, "random seed");
  flow->add_option("--ode-step", ode_step, "RK4 step");
  flow->add_flag("--jacobian", with_jac, "co-integrate the Jacobian");
  add_common(flow);

  // evolve-quantum
  std::string method = "heisenberg";
  int radius = 32;
  double series_tol = 1e-12;
  auto* evq = app.add_subcommand("evolve-quantum", "quantum Heisenberg evolution beta^hbar_t f (JSON)");
  evq->add_option("H", h_text, "Hamiltonian literal")->required();
  evq->add_option("f", f_text, "observable literal")->required();
  evq->add_option("--hbar", hbar, "deformation parameter")->required();
  evq->add_option("--t", t, "time")->required();
  evq->add_option("--method", method, "heisenberg or series")->check(CLI::IsMember({"heisenberg", "series"}));
  evq->add_option("--radius", radius, "base truncation radius");
  evq->add_option("--ode-step", ode_step, "RK4 step");
  evq->add_option("--series-tol", series_tol, "exponential series tolerance");
  add_common(evq);

  // evolve-classical
  int grid = 0;
  double alias_tol = 1e-6;
  auto* evc = app.add_subcommand("evolve-classical", "classical pullback f o beta_t (JSON)");
  evc->add_option("H", h_text, "Hamiltonian literal")->required();
  evc->add_option("f", f_text, "observable literal")->required();
  evc->add_option("--t", t, "time")->required();
  evc->add_option("--radius", radius, "base truncation radius");
  evc->add_option("--grid", grid, "sampling grid per axis (0: automatic)");
  evc->add_option("--ode-step", ode_step, "RK4 step");
  evc->add_option("--alias-tol", alias_tol, "maximum discarded l1 mass");
  add_common(evc);

  // norm
  int window = 0;
  double norm_tol = 1e-8;
  std::string norm_method = "lanczos";
  auto* norm = app.add_subcommand("norm", "C*-norm sandwich of f in the deformed algebra (JSON)");
  norm->add_option("f", f_text, "element literal")->required();
  norm->add_option("--hbar", hbar, "deformation parameter");
  norm->add_option("--window", window, "window half-width (0: automatic)");
  norm->add_option("--tol", norm_tol, "relative residual tolerance");
  norm->add_option("--method", norm_method, "lanczos or power")->check(CLI::IsMember({"lanczos", "power"}));
  add_common(norm);

  // scan
  std::string config_path;
  bool serial = false;
  auto* scan_cmd = app.add_subcommand("scan", "Egorov error over an (hbar, t) grid from a config file");
  scan_cmd->add_option("config", config_path, "config file")->required();
  scan_cmd->add_flag("--serial", serial, "run hbar pipelines one after another");

  // commutator-scan
  std::string grid_text = "[0.1,0.05,0.025,0.0125]", kind = "antisymmetric";
  auto* cscan = app.add_subcommand("commutator-scan", "commutator-to-bracket residual versus hbar (JSON)");
  cscan->add_option("H", h_text, "Hamiltonian literal")->required();
  cscan->add_option("g", g_text, "observable literal")->required();
  cscan->add_option("--hbar-grid", grid_text, "JSON list of hbar values");
  cscan->add_option("--kind", kind, "antisymmetric or one-sided")
      ->check(CLI::IsMember({"antisymmetric", "one-sided"}));
  add_common(cscan);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitClean : kExitInvalid;
  }
  if (common.threads > 0) kernels::set_threads(common.threads);

  try {
    if (*product) {
      const auto J = structure(common);
      const auto f = parse_element(f_text, J.dim()), g = parse_element(g_text, J.dim());
      const auto r = hbar == 0.0 ? pointwise_mul(f, g, cap) : deformed_mul(f, g, PlanckParam(hbar), J, cap);
      emit(common, format_element(r));
    } else if (*bracket) {
      const auto J = structure(common);
      const auto f = parse_element(f_text, J.dim()), g = parse_element(g_text, J.dim());
      const auto r = as_commutator ? commutator(f, g, PlanckParam(hbar), J, cap) : poisson_bracket(f, g, J, cap);
      emit(common, format_element(r));
    } else if (*flow) {
      const auto J = structure(common);
      const auto H = parse_element(h_text, J.dim());
      std::vector<Point> pts;
      if (!points_text.empty()) pts = parse_points(points_text, J.dim());
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int i = 0; i < random_points; ++i) {
        Point p{};
        for (int a = 0; a < J.dim(); ++a) p[static_cast<std::size_t>(a)] = u(rng);
        pts.push_back(p);
      }
      if (pts.empty()) throw InvalidArgument("no points given (use --points or --random)");
      const auto r = flow_points(hamiltonian_vector_field(H, J), pts, t, steps_for(t, ode_step), with_jac);
      std::ostringstream os;
      write_flow_csv(os, r);
      std::string text = os.str();
      if (!text.empty() && text.back() == '\n') text.pop_back();
      emit(common, text);
    } else if (*evq) {
      const auto J = structure(common);
      const auto H = parse_element(h_text, J.dim()), f = parse_element(f_text, J.dim());
      const QuantumHamiltonian qh(H, PlanckParam(hbar));
      const int n = evolve_radius(H, J, t, radius);
      EvolutionResult r;
      if (method == "heisenberg") {
        r = heisenberg_evolve(f, qh, t, J, steps_for(t, ode_step), n);
      } else {
        SeriesOptions so;
        so.tol = series_tol;
        so.radius = n;
        r = conjugation_evolve(f, qh, t, J, so);
      }
      json j{{"element", element_json(r.element)}, {"discarded_l1", r.discarded_l1}, {"radius", n},
             {"method", method},          {"substeps", r.substeps},        {"terms", r.terms},
             {"steps", r.steps}};
      emit(common, j.dump());
    } else if (*evc) {
      const auto J = structure(common);
      const auto H = parse_element(h_text, J.dim()), f = parse_element(f_text, J.dim());
      PullbackOptions opt;
      opt.radius = evolve_radius(H, J, t, radius);
      opt.grid = grid;
      opt.ode_step = ode_step;
      opt.alias_tol = alias_tol;
      const auto r = pullback(f, hamiltonian_vector_field(H, J), t, opt);
      json j{{"element", element_json(r.element)}, {"discarded_l1", r.discarded_l1}, {"grid", r.grid},
             {"radius", r.radius}, {"steps", r.steps}};
      emit(common, j.dump());
    } else if (*norm) {
      const auto J = structure(common);
      const auto f = parse_element(f_text, J.dim());
      NormOptions opt;
      opt.window = window;
      opt.tol = norm_tol;
      opt.method = parse_norm_method(norm_method);
      emit(common, to_json(op_norm_estimate(f, PlanckParam(hbar), J, opt)).dump());
    } else if (*scan_cmd) {
      const ExperimentConfig cfg = load_config(config_path);
      const ScanResult r = scan(cfg, !serial);
      write_scan_outputs(cfg, r);
      std::printf("verdict: %s (%s), records: %zu, csv: %s\n", r.verdict.c_str(),
                  r.summary["status"].get<std::string>().c_str(), r.records.size(),
                  output_path(cfg, cfg.csv_path).c_str());
      return r.status == ScanStatus::clean ? kExitClean : kExitPartial;
    } else if (*cscan) {
      const auto J = structure(common);
      const auto H = parse_element(h_text, J.dim()), g = parse_element(g_text, J.dim());
      const std::vector<double> hs = json::parse(grid_text).get<std::vector<double>>();
      const auto r = commutator_limit_scan(H, g, hs, J,
                                           kind == "one-sided" ? ResidualKind::one_sided : ResidualKind::antisymmetric);
      emit(common, to_json(r).dump(2));
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "invalid config: %s\n", e.what());
    return kExitInvalid;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return kExitInvalid;
  } catch (const DimensionMismatch& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return kExitInvalid;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "invalid JSON: %s\n", e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitPartial;
  }
  return kExitClean;
}
