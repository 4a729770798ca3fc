#include "qtorus/config.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <set>

#include <json.hpp>

#include "qtorus/error.hpp"
#include "qtorus/lattice_algebra.hpp"

namespace qtorus {
namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

json parse_value(const std::string& key, const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return json(text);  // bare string
  }
  (void)key;
}

double as_double(const std::string& key, const json& v) {
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  return v.get<double>();
}

int as_int(const std::string& key, const json& v) {
  if (!v.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  return v.get<int>();
}

std::vector<double> as_list(const std::string& key, const json& v) {
  if (!v.is_array()) throw ConfigError("'" + key + "' must be a list of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_double(key, x));
  return out;
}

std::string as_string(const std::string& key, const json& v) {
  if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
  return v.get<std::string>();
}

SymplecticStructure symplectic_from_json(const json& v) {
  if (!v.is_array() || v.empty()) throw ConfigError("'J' must be a square array of rows");
  const int d = static_cast<int>(v.size());
  std::vector<double> entries;
  for (const auto& row : v) {
    if (!row.is_array() || static_cast<int>(row.size()) != d) throw ConfigError("'J' must be square");
    for (const auto& x : row) entries.push_back(as_double("J", x));
  }
  try {
    return SymplecticStructure(d, entries);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("'J': ") + e.what());
  }
}

}  // namespace

SymplecticStructure parse_symplectic(const std::string& json_text) {
  try {
    return symplectic_from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("'J' is not valid JSON: ") + e.what());
  }
}

void ExperimentConfig::validate() const {
  if (H.dim() != J.dim() || f.dim() != J.dim()) throw ConfigError("H, f and J dimensions differ");
  if (!is_real(H, 1e-12 * (1.0 + l1_norm(H)))) throw ConfigError("H is not real-valued");
  if (hbar_grid.empty()) throw ConfigError("hbar_grid is empty");
  if (t_grid.empty()) throw ConfigError("t_grid is empty");
  for (double h : hbar_grid) {
    if (!std::isfinite(h) || h == 0.0 || std::abs(h) > 1.0) {
      throw ConfigError("hbar values must be nonzero and lie in [-1, 1]");
    }
  }
  for (double t : t_grid) {
    if (!std::isfinite(t)) throw ConfigError("t values must be finite");
  }
  if (!(ode_step > 0.0)) throw ConfigError("ode_step must be positive");
  if (trunc_radius < 0) throw ConfigError("trunc_radius must be nonnegative");
  if (norm_window < 1) throw ConfigError("norm_window must be positive");
  if (!(tolerances.series_tol > 0.0) || !(tolerances.alias_tol > 0.0) || !(tolerances.norm_tol > 0.0)) {
    throw ConfigError("tolerances must be positive");
  }
  if (thresholds.ratio_min > thresholds.ratio_max) throw ConfigError("ratio_min exceeds ratio_max");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string h_text, f_text;
  json j_value;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string text = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'");
    const json v = parse_value(key, text);

    if (key == "H") {
      h_text = v.dump();
    } else if (key == "f") {
      f_text = v.dump();
    } else if (key == "J") {
      j_value = v;
    } else if (key == "hbar_grid") {
      cfg.hbar_grid = as_list(key, v);
    } else if (key == "t_grid") {
      cfg.t_grid = as_list(key, v);
    } else if (key == "ode_step") {
      cfg.ode_step = as_double(key, v);
    } else if (key == "trunc_radius") {
      cfg.trunc_radius = as_int(key, v);
    } else if (key == "norm_window") {
      cfg.norm_window = as_int(key, v);
    } else if (key == "series_tol") {
      cfg.tolerances.series_tol = as_double(key, v);
    } else if (key == "alias_tol") {
      cfg.tolerances.alias_tol = as_double(key, v);
    } else if (key == "norm_tol") {
      cfg.tolerances.norm_tol = as_double(key, v);
    } else if (key == "norm_method") {
      try {
        cfg.norm_method = parse_norm_method(as_string(key, v));
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "ratio_min") {
      cfg.thresholds.ratio_min = as_double(key, v);
    } else if (key == "ratio_max") {
      cfg.thresholds.ratio_max = as_double(key, v);
    } else if (key == "min_order") {
      cfg.thresholds.min_order = as_double(key, v);
    } else if (key == "max_discarded") {
      cfg.thresholds.max_discarded = as_double(key, v);
    } else if (key == "output_dir") {
      cfg.output_dir = as_string(key, v);
    } else if (key == "csv_path") {
      cfg.csv_path = as_string(key, v);
    } else if (key == "summary_path") {
      cfg.summary_path = as_string(key, v);
    } else if (key == "plot_prefix") {
      cfg.plot_prefix = as_string(key, v);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }

  if (!j_value.is_null()) cfg.J = symplectic_from_json(j_value);
  const int dim = cfg.J.dim();
  try {
    if (h_text.empty()) throw ConfigError("missing required key 'H'");
    if (f_text.empty()) throw ConfigError("missing required key 'f'");
    cfg.H = parse_element(h_text, dim);
    cfg.f = parse_element(f_text, dim);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("element literal: ") + e.what());
  }
  if (const char* dir = std::getenv("QTORUS_OUTPUT_DIR"); dir && *dir) cfg.output_dir = dir;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string output_path(const ExperimentConfig& cfg, const std::string& file) {
  const std::filesystem::path p(file);
  if (p.is_absolute()) return p.string();
  return (std::filesystem::path(cfg.output_dir) / p).string();
}

}  // namespace qtorus
