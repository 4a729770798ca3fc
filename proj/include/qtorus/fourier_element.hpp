#pragma once

// Truncated Fourier series on the torus T^d = R^d / Z^d.
//
// A FourierElement is a finitely supported map from the mode lattice Z^d to
// complex coefficients, i.e. the trigonometric polynomial
//
//     f(m) = sum_p c_p e(p . m),     e(t) = exp(2 pi i t).
//
// Terms are kept sorted by mode with no duplicates and no coefficient below
// the prune tolerance, so two equal elements compare equal term by term.

#include <algorithm>
#include <cmath>
#include <array>
#include <compare>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qtorus {

using complex = std::complex<double>;

inline constexpr int kMaxDim = 4;
inline constexpr double kPruneTol = 1e-14;
inline constexpr int kDefaultModeCap = 64;
inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.141592653589793238462643383279;

/// Point of T^d (or its tangent space); components past dim are zero.
using Point = std::array<double, kMaxDim>;

/// Fourier frequency p in Z^d. Components past the owning element's
/// dimension are always zero, which makes comparison dimension-agnostic.
struct Mode {
  std::array<int, kMaxDim> c{};

  constexpr int& operator[](int j) { return c[static_cast<std::size_t>(j)]; }
  constexpr int operator[](int j) const { return c[static_cast<std::size_t>(j)]; }

  friend constexpr auto operator<=>(const Mode&, const Mode&) = default;

  friend constexpr Mode operator+(Mode a, const Mode& b) {
    for (std::size_t j = 0; j < a.c.size(); ++j) a.c[j] += b.c[j];
    return a;
  }
  friend constexpr Mode operator-(Mode a, const Mode& b) {
    for (std::size_t j = 0; j < a.c.size(); ++j) a.c[j] -= b.c[j];
    return a;
  }
  constexpr Mode operator-() const {
    Mode r = *this;
    for (auto& x : r.c) x = -x;
    return r;
  }

  /// Max-norm |p|_inf.
  constexpr int max_norm() const {
    int r = 0;
    for (int x : c) r = std::max(r, x < 0 ? -x : x);
    return r;
  }
  double euclidean_norm() const;
  double dot(const Point& x) const;
};

/// Convenience constructor for the common two-dimensional case.
constexpr Mode mode(int p1, int p2 = 0, int p3 = 0, int p4 = 0) {
  return Mode{{p1, p2, p3, p4}};
}

/// e(t) = exp(2 pi i t), with t reduced mod 1 first.
complex unit_phase(double t);

/// (a * n) mod 1 with the rounding error of the product carried separately,
/// so large lattice pairings keep full phase accuracy.
inline double frac_product(double a, double n) {
  const double hi = a * n;
  const double lo = std::fma(a, n, -hi);
  return (hi - std::round(hi)) + lo;
}

class FourierElement {
 public:
  struct Term {
    Mode mode;
    complex coeff;
    friend bool operator==(const Term&, const Term&) = default;
  };

  explicit FourierElement(int dim = 2);

  /// Builds an element from arbitrary terms: duplicates are summed, tiny
  /// coefficients pruned. Throws InvalidArgument if a mode uses components
  /// past dim.
  static FourierElement from_terms(int dim, std::vector<Term> terms);
  static FourierElement zero(int dim = 2) { return FourierElement(dim); }
  static FourierElement unit(int dim = 2);
  static FourierElement character(const Mode& p, int dim = 2, complex c = 1.0);

  int dim() const { return dim_; }
  std::span<const Term> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// Coefficient at p, zero when p is outside the support.
  complex coeff(const Mode& p) const;

  /// Largest max-norm over the support (0 for the zero element).
  int radius() const;

  friend bool operator==(const FourierElement&, const FourierElement&) = default;

 private:
  int dim_;
  std::vector<Term> terms_;
};

/// Parses the canonical literal: a JSON array of [[p1,...,pd], re, im].
/// An empty array denotes the zero element of dimension `dim`.
FourierElement parse_element(std::string_view text, int dim = 2);
std::string format_element(const FourierElement& f);

}  // namespace qtorus
