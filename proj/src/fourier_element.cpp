#include "qtorus/fourier_element.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "qtorus/error.hpp"

namespace qtorus {

double Mode::euclidean_norm() const {
  double s = 0.0;
  for (int x : c) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

double Mode::dot(const Point& x) const {
  double s = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) s += c[j] * x[j];
  return s;
}

complex unit_phase(double t) {
  const double frac = t - std::round(t);
  return {std::cos(kTwoPi * frac), std::sin(kTwoPi * frac)};
}

FourierElement::FourierElement(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw InvalidArgument("dimension must lie in [1, " + std::to_string(kMaxDim) + "]");
  }
}

FourierElement FourierElement::from_terms(int dim, std::vector<Term> terms) {
  FourierElement out(dim);
  for (const auto& t : terms) {
    for (int j = dim; j < kMaxDim; ++j) {
      if (t.mode[j] != 0) throw InvalidArgument("mode has components beyond the element dimension");
    }
  }
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Term& a, const Term& b) { return a.mode < b.mode; });
  out.terms_.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size();) {
    complex sum = 0.0;
    std::size_t j = i;
    for (; j < terms.size() && terms[j].mode == terms[i].mode; ++j) sum += terms[j].coeff;
    if (std::abs(sum) >= kPruneTol) out.terms_.push_back({terms[i].mode, sum});
    i = j;
  }
  return out;
}

FourierElement FourierElement::unit(int dim) { return character(Mode{}, dim, 1.0); }

FourierElement FourierElement::character(const Mode& p, int dim, complex c) {
  return from_terms(dim, {{p, c}});
}

complex FourierElement::coeff(const Mode& p) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), p,
                             [](const Term& t, const Mode& m) { return t.mode < m; });
  if (it != terms_.end() && it->mode == p) return it->coeff;
  return 0.0;
}

int FourierElement::radius() const {
  int r = 0;
  for (const auto& t : terms_) r = std::max(r, t.mode.max_norm());
  return r;
}

FourierElement parse_element(std::string_view text, int dim) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("element literal is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw InvalidArgument("element literal must be a JSON array");
  std::vector<FourierElement::Term> terms;
  int seen_dim = -1;
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 3 || !entry[0].is_array() ||
        !entry[1].is_number() || !entry[2].is_number()) {
      throw InvalidArgument("element literal entries must be [[p1,...,pd], re, im]");
    }
    const auto& p = entry[0];
    const int d = static_cast<int>(p.size());
    if (d < 1 || d > kMaxDim) throw InvalidArgument("mode dimension out of range");
    if (seen_dim >= 0 && d != seen_dim) throw DimensionMismatch("mixed mode dimensions in literal");
    seen_dim = d;
    Mode m;
    for (int k = 0; k < d; ++k) {
      if (!p[static_cast<std::size_t>(k)].is_number_integer()) {
        throw InvalidArgument("mode components must be integers");
      }
      m[k] = p[static_cast<std::size_t>(k)].get<int>();
    }
    terms.push_back({m, complex(entry[1].get<double>(), entry[2].get<double>())});
  }
  if (seen_dim >= 0 && seen_dim != dim) {
    throw DimensionMismatch("literal has dimension " + std::to_string(seen_dim) + ", expected " +
                            std::to_string(dim));
  }
  return FourierElement::from_terms(dim, std::move(terms));
}

std::string format_element(const FourierElement& f) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : f.terms()) {
    nlohmann::json p = nlohmann::json::array();
    for (int k = 0; k < f.dim(); ++k) p.push_back(t.mode[k]);
    arr.push_back({p, t.coeff.real(), t.coeff.imag()});
  }
  return arr.dump();
}

}  // namespace qtorus
