#pragma once

// Data-parallel inner loops. Every kernel has a straightforward serial
// reference in qtorus::kernels::serial and an OpenMP version in
// qtorus::kernels::parallel. The parallel versions are gather-formulated:
// each output entry is owned by exactly one thread and summed in a fixed
// order, so results do not depend on the thread count.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "qtorus/fourier_element.hpp"

namespace qtorus::kernels {

/// Cocycle exponent matrix K: the twisted product of characters is
///   e_p x e_q = e(p^T K q) e_{p+q}.
/// The deformed product uses K = -hbar J; the pointwise product K = 0.
struct Twist {
  int dim = 2;
  std::array<double, kMaxDim * kMaxDim> k{};

  static Twist none(int dim) { return Twist{dim, {}}; }
  double exponent(const Mode& p, const Mode& q) const;
  bool trivial() const;
};

struct ConvolutionResult {
  FourierElement product;
  double discarded_l1 = 0.0;
};

using Jacobian = std::array<double, kMaxDim * kMaxDim>;

/// Real vector field with trigonometric-polynomial components, compiled for
/// fast repeated evaluation of the field and its Jacobian.
class FieldEvaluator {
 public:
  explicit FieldEvaluator(std::span<const FourierElement> components);

  int dim() const { return dim_; }
  /// value[k] = Phi_k(m); when jac is non-null, (*jac)[k*kMaxDim + j] = d_j Phi_k(m).
  void evaluate(const Point& m, Point& value, Jacobian* jac) const;

 private:
  struct Entry {
    Mode mode;
    int component;
    complex coeff;
  };
  int dim_;
  std::vector<Entry> entries_;
};

/// Advances every point (and, when jacobians is non-empty, the tangent map
/// solving dJ/dt = DPhi(m(t)) J with J(0) = I) by fixed-step RK4, wrapping
/// coordinates into [0,1) after each step.
void rk4_point(const FieldEvaluator& field, Point& m, Jacobian* jac, double t, int steps);

namespace serial {

/// Scatter form: every pair (p, q) of the supports adds into p+q. Modes
/// outside |r|_inf <= radius are dropped and their l1 mass reported.
ConvolutionResult twisted_convolution(const FourierElement& f, const FourierElement& g,
                                      const Twist& twist, int radius);

std::vector<complex> evaluate_points(const FourierElement& f, std::span<const Point> points);

void flow_batch(const FieldEvaluator& field, std::span<Point> points,
                std::span<Jacobian> jacobians, double t, int steps);

/// Compression of left multiplication by f to the window |q|_inf <= W, acting
/// on coefficient vectors indexed in row-major order over [-W, W]^d.
/// Entries are (L)_{r, r-p} = c_p e(p^T K (r-p)); every phase is recomputed.
class WindowOperator {
 public:
  WindowOperator(const FourierElement& f, const Twist& twist, int window);
  std::size_t size() const { return size_; }
  int window() const { return window_; }
  void apply(std::span<const complex> x, std::span<complex> y) const;
  void apply_adjoint(std::span<const complex> y, std::span<complex> x) const;

 private:
  std::vector<FourierElement::Term> terms_;
  Twist twist_;
  int dim_;
  int window_;
  std::size_t size_;
};

}  // namespace serial

namespace parallel {

/// Gather form over the output box; the inner loop runs over the smaller
/// support and looks the other operand up in a dense box.
ConvolutionResult twisted_convolution(const FourierElement& f, const FourierElement& g,
                                      const Twist& twist, int radius);

std::vector<complex> evaluate_points(const FourierElement& f, std::span<const Point> points);

void flow_batch(const FieldEvaluator& field, std::span<Point> points,
                std::span<Jacobian> jacobians, double t, int steps);

/// Same operator as serial::WindowOperator. The phase e(p^T K (r-p)) equals
/// e(w_p . r) with w_p = K^T p (skewness kills p^T K p), so it factors per
/// axis; phases are tabulated once and lines along the last axis are owned
/// by single threads.
class WindowOperator {
 public:
  WindowOperator(const FourierElement& f, const Twist& twist, int window);
  std::size_t size() const { return size_; }
  int window() const { return window_; }
  void apply(std::span<const complex> x, std::span<complex> y) const;
  void apply_adjoint(std::span<const complex> y, std::span<complex> x) const;

 private:
  struct Shift {
    Mode mode;
    complex coeff;
    std::ptrdiff_t offset;  // flat-index displacement of the mode
  };
  // phase(term, axis, r_axis) at [(term * dim + axis) * side + r_axis + W]
  complex phase(std::size_t term, int axis, int r) const {
    return phases_[(term * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(axis)) * side_ +
                   static_cast<std::size_t>(r + window_)];
  }
  std::vector<Shift> shifts_;
  std::vector<complex> phases_;
  int dim_;
  int window_;
  std::size_t side_;
  std::size_t size_;
};

}  // namespace parallel

/// Number of OpenMP threads the parallel kernels will use.
int max_threads();
void set_threads(int n);

}  // namespace qtorus::kernels
