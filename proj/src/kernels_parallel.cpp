#include <omp.h>

#include <algorithm>
#include <cstdint>

#include "qtorus/error.hpp"
#include "qtorus/kernels.hpp"

namespace qtorus::kernels {

int max_threads() { return omp_get_max_threads(); }
void set_threads(int n) { omp_set_num_threads(std::max(1, n)); }

namespace parallel {
namespace {

// Axis-aligned integer box [lo, hi] in Z^d with row-major flat indexing.
struct Box {
  int dim = 0;
  Mode lo, hi;
  std::array<std::int64_t, kMaxDim> extent{};
  std::int64_t total = 0;

  Box(int d, const Mode& l, const Mode& h) : dim(std::clamp(d, 1, kMaxDim)), lo(l), hi(h) {
    total = 1;
    for (int a = 0; a < dim; ++a) {
      extent[static_cast<std::size_t>(a)] = hi[a] - lo[a] + 1;
      total *= extent[static_cast<std::size_t>(a)];
    }
  }

  std::int64_t index(const Mode& r) const {
    std::int64_t idx = 0;
    for (int a = 0; a < dim; ++a) {
      if (r[a] < lo[a] || r[a] > hi[a]) return -1;
      idx = idx * extent[static_cast<std::size_t>(a)] + (r[a] - lo[a]);
    }
    return idx;
  }

  Mode decode(std::int64_t idx) const {
    Mode r;
    for (int a = dim - 1; a >= 0; --a) {
      const auto e = extent[static_cast<std::size_t>(a)];
      r[a] = static_cast<int>(idx % e) + lo[a];
      idx /= e;
    }
    return r;
  }
};

Box bounding_box(const FourierElement& f) {
  Mode lo, hi;
  for (int a = 0; a < f.dim(); ++a) {
    lo[a] = f.terms().front().mode[a];
    hi[a] = lo[a];
  }
  for (const auto& t : f.terms()) {
    for (int a = 0; a < f.dim(); ++a) {
      lo[a] = std::min(lo[a], t.mode[a]);
      hi[a] = std::max(hi[a], t.mode[a]);
    }
  }
  return Box(f.dim(), lo, hi);
}

}  // namespace

ConvolutionResult twisted_convolution(const FourierElement& f, const FourierElement& g,
                                      const Twist& twist, int radius) {
  if (f.dim() != g.dim()) throw DimensionMismatch("operands have different dimensions");
  ConvolutionResult out{FourierElement(f.dim()), 0.0};
  if (f.empty() || g.empty()) return out;

  const bool f_small = f.size() <= g.size();
  const FourierElement& small = f_small ? f : g;
  const FourierElement& big = f_small ? g : f;

  const Box big_box = bounding_box(big);
  std::vector<complex> dense(static_cast<std::size_t>(big_box.total), complex(0.0));
  for (const auto& t : big.terms()) dense[static_cast<std::size_t>(big_box.index(t.mode))] = t.coeff;

  const Box fb = bounding_box(f);
  const Box gb = bounding_box(g);
  const Box out_box(f.dim(), fb.lo + gb.lo, fb.hi + gb.hi);

  const bool plain = twist.trivial();
  const auto small_terms = small.terms();
  std::vector<complex> acc(static_cast<std::size_t>(out_box.total));

#pragma omp parallel for schedule(static)
  for (std::int64_t idx = 0; idx < out_box.total; ++idx) {
    const Mode r = out_box.decode(idx);
    complex s = 0.0;
    for (const auto& t : small_terms) {
      const Mode other = r - t.mode;
      const auto bi = big_box.index(other);
      if (bi < 0) continue;
      const complex b = dense[static_cast<std::size_t>(bi)];
      if (b == complex(0.0)) continue;
      complex v = t.coeff * b;
      if (!plain) {
        v *= f_small ? unit_phase(twist.exponent(t.mode, other))
                     : unit_phase(twist.exponent(other, t.mode));
      }
      s += v;
    }
    acc[static_cast<std::size_t>(idx)] = s;
  }

  std::vector<FourierElement::Term> kept;
  for (std::int64_t idx = 0; idx < out_box.total; ++idx) {
    const complex v = acc[static_cast<std::size_t>(idx)];
    if (v == complex(0.0)) continue;
    const Mode r = out_box.decode(idx);
    if (r.max_norm() <= radius) {
      kept.push_back({r, v});
    } else {
      out.discarded_l1 += std::abs(v);
    }
  }
  out.product = FourierElement::from_terms(f.dim(), std::move(kept));
  return out;
}

std::vector<complex> evaluate_points(const FourierElement& f, std::span<const Point> points) {
  std::vector<complex> out(points.size());
  const auto terms = f.terms();
  const auto n = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const Point& m = points[static_cast<std::size_t>(i)];
    complex acc = 0.0;
    for (const auto& t : terms) acc += t.coeff * unit_phase(t.mode.dot(m));
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

void flow_batch(const FieldEvaluator& field, std::span<Point> points,
                std::span<Jacobian> jacobians, double t, int steps) {
  const bool with_jac = !jacobians.empty();
  if (with_jac && jacobians.size() != points.size()) {
    throw InvalidArgument("jacobian buffer size differs from point count");
  }
  if (steps < 1) throw InvalidArgument("steps must be >= 1");
  const auto n = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    rk4_point(field, points[u], with_jac ? &jacobians[u] : nullptr, t, steps);
  }
}

WindowOperator::WindowOperator(const FourierElement& f, const Twist& twist, int window)
    : dim_(f.dim()), window_(window), side_(static_cast<std::size_t>(2 * window + 1)) {
  if (window < 0) throw InvalidArgument("window must be nonnegative");
  size_ = 1;
  for (int a = 0; a < dim_; ++a) size_ *= side_;

  for (const auto& t : f.terms()) {
    // Modes that cannot connect two window sites contribute nothing.
    if (t.mode.max_norm() > 2 * window) continue;
    std::ptrdiff_t offset = 0;
    for (int a = 0; a < dim_; ++a) offset = offset * static_cast<std::ptrdiff_t>(side_) + t.mode[a];
    shifts_.push_back({t.mode, t.coeff, offset});
  }
  phases_.resize(shifts_.size() * static_cast<std::size_t>(dim_) * side_);
  for (std::size_t i = 0; i < shifts_.size(); ++i) {
    const Mode& p = shifts_[i].mode;
    for (int a = 0; a < dim_; ++a) {
      double w = 0.0;  // (K^T p)_a
      for (int b = 0; b < dim_; ++b) w += p[b] * twist.k[static_cast<std::size_t>(b * kMaxDim + a)];
      for (int r = -window; r <= window; ++r) {
        phases_[(i * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(a)) * side_ +
                static_cast<std::size_t>(r + window)] = unit_phase(w * r);
      }
    }
  }
}

void WindowOperator::apply(std::span<const complex> x, std::span<complex> y) const {
  const int last = dim_ - 1;
  const auto lines = static_cast<std::int64_t>(size_ / side_);
  const int w = window_;
#pragma omp parallel for schedule(static)
  for (std::int64_t line = 0; line < lines; ++line) {
    Mode lead;
    {
      auto rem = static_cast<std::size_t>(line);
      for (int a = last - 1; a >= 0; --a) {
        lead[a] = static_cast<int>(rem % side_) - w;
        rem /= side_;
      }
    }
    const std::size_t base = static_cast<std::size_t>(line) * side_;
    complex* yl = y.data() + base;
    std::fill(yl, yl + side_, complex(0.0));
    for (std::size_t i = 0; i < shifts_.size(); ++i) {
      const auto& s = shifts_[i];
      complex line_factor = s.coeff;
      bool inside = true;
      for (int a = 0; a < last; ++a) {
        const int q = lead[a] - s.mode[a];
        if (q < -w || q > w) {
          inside = false;
          break;
        }
        line_factor *= phase(i, a, lead[a]);
      }
      if (!inside) continue;
      const int plast = s.mode[last];
      const int lo = std::max(-w, -w + plast);
      const int hi = std::min(w, w + plast);
      const complex* ph = &phases_[(i * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(last)) * side_ +
                                   static_cast<std::size_t>(w)];
      const std::ptrdiff_t xoff = static_cast<std::ptrdiff_t>(base) - s.offset + w;
      complex* yo = yl + w;
      for (int r = lo; r <= hi; ++r) yo[r] += line_factor * ph[r] * x.data()[xoff + r];
    }
  }
}

void WindowOperator::apply_adjoint(std::span<const complex> y, std::span<complex> x) const {
  const int last = dim_ - 1;
  const auto lines = static_cast<std::int64_t>(size_ / side_);
  const int w = window_;
#pragma omp parallel for schedule(static)
  for (std::int64_t line = 0; line < lines; ++line) {
    Mode lead;
    {
      auto rem = static_cast<std::size_t>(line);
      for (int a = last - 1; a >= 0; --a) {
        lead[a] = static_cast<int>(rem % side_) - w;
        rem /= side_;
      }
    }
    const std::size_t base = static_cast<std::size_t>(line) * side_;
    complex* xl = x.data() + base;
    std::fill(xl, xl + side_, complex(0.0));
    for (std::size_t i = 0; i < shifts_.size(); ++i) {
      const auto& s = shifts_[i];
      complex line_factor = s.coeff;
      bool inside = true;
      for (int a = 0; a < last; ++a) {
        const int r = lead[a] + s.mode[a];
        if (r < -w || r > w) {
          inside = false;
          break;
        }
        line_factor *= phase(i, a, lead[a]);
      }
      if (!inside) continue;
      line_factor = std::conj(line_factor);
      const int plast = s.mode[last];
      const int lo = std::max(-w, -w - plast);
      const int hi = std::min(w, w - plast);
      const complex* ph = &phases_[(i * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(last)) * side_ +
                                   static_cast<std::size_t>(w)];
      const std::ptrdiff_t yoff = static_cast<std::ptrdiff_t>(base) + s.offset + w;
      complex* xo = xl + w;
      for (int q = lo; q <= hi; ++q) xo[q] += line_factor * std::conj(ph[q]) * y.data()[yoff + q];
    }
  }
}

}  // namespace parallel
}  // namespace qtorus::kernels
