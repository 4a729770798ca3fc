#include "qtorus/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include "qtorus/classical_flow.hpp"
#include "qtorus/error.hpp"
#include "qtorus/lattice_algebra.hpp"
#include "qtorus/quantum_flow.hpp"

namespace qtorus {

using nlohmann::json;

OrderFit fit_order(std::span<const std::pair<double, double>> samples) {
  std::vector<std::pair<double, double>> logs;
  for (const auto& [h, e] : samples) {
    if (e > 0.0 && h != 0.0 && std::isfinite(e)) logs.emplace_back(std::log(std::abs(h)), std::log(e));
  }
  if (logs.size() < 3) throw InsufficientData("order fit needs at least 3 positive errors");
  const double n = static_cast<double>(logs.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : logs) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : logs) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0.0) throw InsufficientData("order fit needs distinct hbar values");
  OrderFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (const auto& [x, y] : logs) {
    const double r = y - (fit.intercept + fit.slope * x);
    ss_res += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.used = static_cast<int>(logs.size());
  return fit;
}

ClassicalSide classical_side(const FourierElement& f, const FourierElement& H, double t,
                             const SymplecticStructure& J, const ExperimentConfig& cfg) {
  ClassicalSide out;
  out.t = t;
  out.element = FourierElement(f.dim());
  out.radius = evolve_radius(H, J, t, cfg.trunc_radius);
  out.steps = steps_for(t, cfg.ode_step);
  try {
    const VectorField phi = hamiltonian_vector_field(H, J);
    PullbackOptions opt;
    opt.radius = out.radius;
    opt.steps = out.steps;
    opt.alias_tol = cfg.tolerances.alias_tol;
    PullbackResult pb = pullback(f, phi, t, opt);
    out.element = std::move(pb.element);
    out.discarded_l1 = pb.discarded_l1;
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

ErrorRecord egorov_error(const FourierElement& f, const FourierElement& H, double hbar,
                         const ClassicalSide& classical, const SymplecticStructure& J,
                         const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ErrorRecord rec;
  rec.hbar = hbar;
  rec.t = classical.t;
  rec.radius = classical.radius;
  rec.discarded_mass = classical.discarded_l1;
  if (!classical.error.empty()) {
    rec.valid = false;
    rec.note = "classical: " + classical.error;
  } else {
    try {
      const QuantumHamiltonian qh(H, PlanckParam(hbar));
      const EvolutionResult q = heisenberg_evolve(f, qh, classical.t, J, classical.steps, classical.radius);
      rec.discarded_mass += q.discarded_l1;
      const FourierElement diff = subtract(q.element, classical.element);
      NormOptions norm;
      norm.window = std::max(cfg.norm_window, diff.radius() + 1);
      norm.tol = cfg.tolerances.norm_tol;
      norm.method = cfg.norm_method;
      rec.err = op_norm_estimate(diff, PlanckParam(hbar), J, norm);
      if (rec.discarded_mass > cfg.thresholds.max_discarded) {
        rec.valid = false;
        rec.note = "discarded mass above threshold";
      } else if (!rec.err.converged) {
        rec.valid = false;
        rec.note = "norm estimate did not converge";
      }
    } catch (const Error& e) {
      rec.valid = false;
      rec.note = e.what();
    }
  }
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

ErrorRecord egorov_error(const FourierElement& f, const FourierElement& H, double hbar, double t,
                         const SymplecticStructure& J, const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const ClassicalSide c = classical_side(f, H, t, J, cfg);
  ErrorRecord rec = egorov_error(f, H, hbar, c, J, cfg);
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

CommutatorScan commutator_limit_scan(const FourierElement& H, const FourierElement& g,
                                     std::span<const double> hbar_grid, const SymplecticStructure& J,
                                     ResidualKind kind, const NormOptions& norm) {
  if (hbar_grid.size() < 3) throw InsufficientData("commutator scan needs at least 3 hbar values");
  CommutatorScan out;
  out.kind = kind;
  std::vector<std::pair<double, double>> pairs;
  for (double h : hbar_grid) {
    const PlanckParam hbar(h);
    const FourierElement r = kind == ResidualKind::antisymmetric ? scaled_commutator_residual(H, g, hbar, J)
                                                                 : one_sided_residual(H, g, hbar, J);
    NormOptions opt = norm;
    opt.window = std::max({opt.window, default_window(r), r.radius() + 1});
    out.rows.push_back({h, op_norm_estimate(r, hbar, J, opt)});
    pairs.emplace_back(h, out.rows.back().err.op_lower);
  }
  out.degenerate = std::all_of(out.rows.begin(), out.rows.end(),
                               [](const CommutatorRow& row) { return row.err.upper_l1 == 0.0; });
  if (!out.degenerate) {
    try {
      out.fit = fit_order(pairs);
    } catch (const InsufficientData&) {
      out.fit.reset();
    }
  }
  return out;
}

namespace {

json records_for_t(const std::vector<const ErrorRecord*>& rows, const Thresholds& th, bool& pass_out,
                   bool& fittable_out, std::optional<OrderFit>& fit_out) {
  json j;
  std::vector<std::pair<double, double>> pairs;
  json errs = json::array(), ratios = json::array(), proxies = json::array();
  bool decreasing = true, in_band = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double e = rows[i]->err.op_lower;
    pairs.emplace_back(rows[i]->hbar, e);
    errs.push_back(e);
    proxies.push_back(e / std::abs(rows[i]->hbar));
    if (i > 0) {
      const double prev = rows[i - 1]->err.op_lower;
      const double ratio = prev > 0.0 ? e / prev : 0.0;
      ratios.push_back(ratio);
      if (!(e < prev)) decreasing = false;
      if (ratio < th.ratio_min || ratio > th.ratio_max) in_band = false;
    }
  }
  j["hbar"] = json::array();
  for (const auto* r : rows) j["hbar"].push_back(r->hbar);
  j["err"] = errs;
  j["err_over_hbar"] = proxies;
  j["ratios"] = ratios;
  j["strictly_decreasing"] = decreasing;
  j["ratios_in_band"] = in_band;
  fittable_out = true;
  try {
    fit_out = fit_order(pairs);
    j["fit"] = to_json(*fit_out);
    j["order_ok"] = fit_out->slope >= th.min_order;
  } catch (const InsufficientData&) {
    fit_out.reset();
    fittable_out = false;
    j["fit"] = nullptr;
    j["order_ok"] = false;
  }
  pass_out = decreasing && in_band && fit_out && fit_out->slope >= th.min_order;
  return j;
}

}  // namespace

ScanResult scan(const ExperimentConfig& cfg, bool parallel) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  std::vector<double> hbars = cfg.hbar_grid;
  std::vector<double> ts = cfg.t_grid;
  std::sort(hbars.begin(), hbars.end());
  hbars.erase(std::unique(hbars.begin(), hbars.end()), hbars.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  std::vector<ClassicalSide> classical;
  classical.reserve(ts.size());
  for (double t : ts) classical.push_back(classical_side(cfg.f, cfg.H, t, cfg.J, cfg));

  const std::size_t nh = hbars.size(), nt = ts.size();
  std::vector<ErrorRecord> records(nh * nt);
  const long long jobs = static_cast<long long>(nh);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (long long i = 0; i < jobs; ++i) {
    const auto hi = static_cast<std::size_t>(i);
    for (std::size_t ti = 0; ti < nt; ++ti) {
      records[hi * nt + ti] = egorov_error(cfg.f, cfg.H, hbars[hi], classical[ti], cfg.J, cfg);
    }
  }

  ScanResult out;
  out.records = std::move(records);
  const Thresholds& th = cfg.thresholds;
  double max_discarded = 0.0;
  int invalid = 0;
  for (const auto& r : out.records) {
    max_discarded = std::max(max_discarded, r.discarded_mass);
    if (!r.valid) ++invalid;
  }
  out.status = invalid > 0 ? ScanStatus::partial : ScanStatus::clean;

  json summary;
  summary["records"] = out.records.size();
  summary["invalid_records"] = invalid;
  summary["max_discarded"] = max_discarded;
  summary["thresholds"] = {{"ratio_min", th.ratio_min},
                           {"ratio_max", th.ratio_max},
                           {"min_order", th.min_order},
                           {"max_discarded", th.max_discarded}};

  // Per-t analysis along decreasing |hbar|.
  std::vector<std::size_t> order(nh);
  for (std::size_t i = 0; i < nh; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(hbars[a]) > std::abs(hbars[b]); });

  bool all_pass = true, fittable = nh >= 3;
  std::vector<double> slopes;
  json per_t = json::array();
  for (std::size_t ti = 0; ti < nt; ++ti) {
    std::vector<const ErrorRecord*> rows;
    for (std::size_t hi : order) {
      const ErrorRecord& r = out.records[hi * nt + ti];
      if (r.valid) rows.push_back(&r);
    }
    bool pass = false, can_fit = false;
    std::optional<OrderFit> fit;
    json j = records_for_t(rows, th, pass, can_fit, fit);
    j["t"] = ts[ti];
    j["radius"] = classical[ti].radius;
    if (fit) slopes.push_back(fit->slope);
    if (!can_fit) fittable = false;
    all_pass = all_pass && pass;
    per_t.push_back(std::move(j));
  }
  summary["per_t"] = per_t;

  // Uniformity: the max over t at each hbar.
  std::vector<std::pair<double, double>> sup_pairs;
  for (std::size_t hi : order) {
    double m = 0.0;
    bool ok = true;
    for (std::size_t ti = 0; ti < nt; ++ti) {
      const ErrorRecord& r = out.records[hi * nt + ti];
      ok = ok && r.valid;
      m = std::max(m, r.err.op_lower);
    }
    if (ok) sup_pairs.emplace_back(hbars[hi], m);
  }
  json uniform;
  try {
    const OrderFit fit = fit_order(sup_pairs);
    uniform["fit"] = to_json(fit);
    bool close = true;
    for (double s : slopes) close = close && std::abs(s - fit.slope) <= 0.2;
    uniform["matches_each_t"] = close;
    all_pass = all_pass && fit.slope >= th.min_order;
  } catch (const InsufficientData&) {
    uniform["fit"] = nullptr;
    uniform["matches_each_t"] = false;
  }
  summary["uniform_in_t"] = uniform;

  if (!fittable) {
    out.verdict = "insufficient-for-fit";
  } else {
    const bool ok = all_pass && invalid == 0 && max_discarded <= th.max_discarded;
    out.verdict = ok ? "pass" : "fail";
  }
  summary["status"] = out.status == ScanStatus::clean ? "clean" : "partial";
  summary["verdict"] = out.verdict;
  json times = json::array();
  for (const auto& r : out.records) times.push_back(r.wall_time);
  summary["record_wall_time"] = times;
  summary["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.summary = std::move(summary);
  return out;
}

void write_records_csv(std::ostream& out, std::span<const ErrorRecord> records) {
  out << "hbar,t,lower_l2,op_lower,upper_l1,window,iterations,residual,converged,discarded_mass,radius,valid\n";
  char buf[512];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%.17g,%d,%.17g,%d,%d\n", r.hbar, r.t,
                  r.err.lower_l2, r.err.op_lower, r.err.upper_l1, r.err.window, r.err.iterations, r.err.residual,
                  r.err.converged ? 1 : 0, r.discarded_mass, r.radius, r.valid ? 1 : 0);
    out << buf;
  }
}

void write_scan_outputs(const ExperimentConfig& cfg, const ScanResult& result) {
  std::filesystem::create_directories(cfg.output_dir);
  {
    std::ofstream csv(output_path(cfg, cfg.csv_path));
    if (!csv) throw Error("cannot write " + output_path(cfg, cfg.csv_path));
    write_records_csv(csv, result.records);
  }
  {
    std::ofstream js(output_path(cfg, cfg.summary_path));
    if (!js) throw Error("cannot write " + output_path(cfg, cfg.summary_path));
    js << result.summary.dump(2) << '\n';
  }
  if (cfg.plot_prefix.empty()) return;
  std::map<double, std::vector<const ErrorRecord*>> by_t;
  for (const auto& r : result.records) by_t[r.t].push_back(&r);
  for (const auto& [t, rows] : by_t) {
    char name[64];
    std::snprintf(name, sizeof name, "_t%g.dat", t);
    std::ofstream dat(output_path(cfg, cfg.plot_prefix + name));
    dat << "# hbar err\n";
    char line[96];
    for (const auto* r : rows) {
      std::snprintf(line, sizeof line, "%.17g %.17g\n", r->hbar, r->err.op_lower);
      dat << line;
    }
  }
}

json to_json(const OrderFit& fit) {
  return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}, {"used", fit.used}};
}

std::string to_string(ResidualKind kind) {
  return kind == ResidualKind::antisymmetric ? "antisymmetric" : "one-sided";
}

json to_json(const CommutatorScan& s) {
  json rows = json::array();
  for (const auto& r : s.rows) rows.push_back({{"hbar", r.hbar}, {"err", to_json(r.err)}});
  json j{{"kind", to_string(s.kind)}, {"rows", rows}, {"degenerate", s.degenerate}};
  j["fit"] = s.fit ? to_json(*s.fit) : json(nullptr);
  return j;
}

}  // namespace qtorus
