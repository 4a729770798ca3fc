#include <algorithm>
#include <cmath>

#include "qtorus/error.hpp"
#include "qtorus/kernels.hpp"

namespace qtorus::kernels {

double Twist::exponent(const Mode& p, const Mode& q) const {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) {
    if (p[a] == 0) continue;
    for (int b = 0; b < dim; ++b) {
      const double kab = k[static_cast<std::size_t>(a * kMaxDim + b)];
      if (kab != 0.0) s += frac_product(kab, static_cast<double>(static_cast<long long>(p[a]) * q[b]));
    }
  }
  return s;
}

bool Twist::trivial() const {
  return std::all_of(k.begin(), k.end(), [](double x) { return x == 0.0; });
}

FieldEvaluator::FieldEvaluator(std::span<const FourierElement> components)
    : dim_(static_cast<int>(components.size())) {
  if (dim_ < 1 || dim_ > kMaxDim) throw InvalidArgument("vector field dimension out of range");
  for (int k = 0; k < dim_; ++k) {
    const auto& c = components[static_cast<std::size_t>(k)];
    if (c.dim() != dim_) throw DimensionMismatch("field component dimension differs from field dimension");
    for (const auto& t : c.terms()) entries_.push_back({t.mode, k, t.coeff});
  }
}

void FieldEvaluator::evaluate(const Point& m, Point& value, Jacobian* jac) const {
  value.fill(0.0);
  if (jac) jac->fill(0.0);
  for (const auto& e : entries_) {
    const complex z = e.coeff * unit_phase(e.mode.dot(m));
    value[static_cast<std::size_t>(e.component)] += z.real();
    if (jac) {
      // Re(2 pi i p_j z) = -2 pi p_j Im z
      const double dz = -kTwoPi * z.imag();
      for (int j = 0; j < dim_; ++j) {
        (*jac)[static_cast<std::size_t>(e.component * kMaxDim + j)] += dz * e.mode[j];
      }
    }
  }
}

namespace {

struct State {
  Point m{};
  Jacobian jac{};
};

void derivative(const FieldEvaluator& field, const State& s, bool with_jac, State& out) {
  const int d = field.dim();
  if (!with_jac) {
    field.evaluate(s.m, out.m, nullptr);
    return;
  }
  Jacobian dphi;
  field.evaluate(s.m, out.m, &dphi);
  out.jac.fill(0.0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int l = 0; l < d; ++l) {
        acc += dphi[static_cast<std::size_t>(i * kMaxDim + l)] * s.jac[static_cast<std::size_t>(l * kMaxDim + j)];
      }
      out.jac[static_cast<std::size_t>(i * kMaxDim + j)] = acc;
    }
  }
}

void axpy(const State& base, double h, const State& k, State& out) {
  for (std::size_t i = 0; i < base.m.size(); ++i) out.m[i] = base.m[i] + h * k.m[i];
  for (std::size_t i = 0; i < base.jac.size(); ++i) out.jac[i] = base.jac[i] + h * k.jac[i];
}

}  // namespace

void rk4_point(const FieldEvaluator& field, Point& m, Jacobian* jac, double t, int steps) {
  if (steps < 1) throw InvalidArgument("steps must be >= 1");
  const int d = field.dim();
  const bool with_jac = jac != nullptr;
  State s;
  s.m = m;
  if (with_jac) {
    for (int i = 0; i < d; ++i) s.jac[static_cast<std::size_t>(i * kMaxDim + i)] = 1.0;
  }
  const double h = t / steps;
  State k1, k2, k3, k4, tmp;
  for (int n = 0; n < steps; ++n) {
    derivative(field, s, with_jac, k1);
    axpy(s, 0.5 * h, k1, tmp);
    derivative(field, tmp, with_jac, k2);
    axpy(s, 0.5 * h, k2, tmp);
    derivative(field, tmp, with_jac, k3);
    axpy(s, h, k3, tmp);
    derivative(field, tmp, with_jac, k4);
    for (int i = 0; i < d; ++i) {
      const auto u = static_cast<std::size_t>(i);
      double x = s.m[u] + h / 6.0 * (k1.m[u] + 2.0 * k2.m[u] + 2.0 * k3.m[u] + k4.m[u]);
      s.m[u] = x - std::floor(x);
    }
    if (with_jac) {
      for (std::size_t i = 0; i < s.jac.size(); ++i) {
        s.jac[i] += h / 6.0 * (k1.jac[i] + 2.0 * k2.jac[i] + 2.0 * k3.jac[i] + k4.jac[i]);
      }
    }
  }
  m = s.m;
  if (with_jac) *jac = s.jac;
}

namespace serial {

ConvolutionResult twisted_convolution(const FourierElement& f, const FourierElement& g,
                                      const Twist& twist, int radius) {
  if (f.dim() != g.dim()) throw DimensionMismatch("operands have different dimensions");
  std::vector<FourierElement::Term> raw;
  raw.reserve(f.size() * g.size());
  const bool plain = twist.trivial();
  for (const auto& a : f.terms()) {
    for (const auto& b : g.terms()) {
      complex v = a.coeff * b.coeff;
      if (!plain) v *= unit_phase(twist.exponent(a.mode, b.mode));
      raw.push_back({a.mode + b.mode, v});
    }
  }
  std::stable_sort(raw.begin(), raw.end(),
                   [](const auto& x, const auto& y) { return x.mode < y.mode; });
  ConvolutionResult out{FourierElement(f.dim()), 0.0};
  std::vector<FourierElement::Term> kept;
  for (std::size_t i = 0; i < raw.size();) {
    complex sum = 0.0;
    std::size_t j = i;
    for (; j < raw.size() && raw[j].mode == raw[i].mode; ++j) sum += raw[j].coeff;
    if (raw[i].mode.max_norm() <= radius) {
      kept.push_back({raw[i].mode, sum});
    } else {
      out.discarded_l1 += std::abs(sum);
    }
    i = j;
  }
  out.product = FourierElement::from_terms(f.dim(), std::move(kept));
  return out;
}

std::vector<complex> evaluate_points(const FourierElement& f, std::span<const Point> points) {
  std::vector<complex> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    complex acc = 0.0;
    for (const auto& t : f.terms()) acc += t.coeff * unit_phase(t.mode.dot(points[i]));
    out[i] = acc;
  }
  return out;
}

void flow_batch(const FieldEvaluator& field, std::span<Point> points,
                std::span<Jacobian> jacobians, double t, int steps) {
  const bool with_jac = !jacobians.empty();
  if (with_jac && jacobians.size() != points.size()) {
    throw InvalidArgument("jacobian buffer size differs from point count");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    rk4_point(field, points[i], with_jac ? &jacobians[i] : nullptr, t, steps);
  }
}

namespace {

std::size_t window_size(int dim, int window) {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(2 * window + 1);
  return n;
}

Mode decode(std::size_t idx, int dim, int window) {
  const auto side = static_cast<std::size_t>(2 * window + 1);
  Mode r;
  for (int a = dim - 1; a >= 0; --a) {
    r[a] = static_cast<int>(idx % side) - window;
    idx /= side;
  }
  return r;
}

std::ptrdiff_t encode(const Mode& r, int dim, int window) {
  const auto side = static_cast<std::ptrdiff_t>(2 * window + 1);
  std::ptrdiff_t idx = 0;
  for (int a = 0; a < dim; ++a) {
    if (r[a] < -window || r[a] > window) return -1;
    idx = idx * side + (r[a] + window);
  }
  return idx;
}

}  // namespace

WindowOperator::WindowOperator(const FourierElement& f, const Twist& twist, int window)
    : terms_(f.terms().begin(), f.terms().end()),
      twist_(twist),
      dim_(f.dim()),
      window_(window),
      size_(window_size(f.dim(), window)) {
  if (window < 0) throw InvalidArgument("window must be nonnegative");
}

void WindowOperator::apply(std::span<const complex> x, std::span<complex> y) const {
  for (std::size_t r = 0; r < size_; ++r) {
    const Mode rm = decode(r, dim_, window_);
    complex acc = 0.0;
    for (const auto& t : terms_) {
      const Mode q = rm - t.mode;
      const auto qi = encode(q, dim_, window_);
      if (qi < 0) continue;
      acc += t.coeff * unit_phase(twist_.exponent(t.mode, q)) * x[static_cast<std::size_t>(qi)];
    }
    y[r] = acc;
  }
}

void WindowOperator::apply_adjoint(std::span<const complex> y, std::span<complex> x) const {
  for (std::size_t q = 0; q < size_; ++q) {
    const Mode qm = decode(q, dim_, window_);
    complex acc = 0.0;
    for (const auto& t : terms_) {
      const auto ri = encode(qm + t.mode, dim_, window_);
      if (ri < 0) continue;
      acc += std::conj(t.coeff * unit_phase(twist_.exponent(t.mode, qm))) * y[static_cast<std::size_t>(ri)];
    }
    x[q] = acc;
  }
}

}  // namespace serial
}  // namespace qtorus::kernels
