#include "qtorus/lattice_algebra.hpp"

#include <cmath>
#include <cstdint>
#include <random>

#include "qtorus/error.hpp"
#include "qtorus/kernels.hpp"

namespace qtorus {
namespace {

void require_same_dim(const FourierElement& f, const FourierElement& g) {
  if (f.dim() != g.dim()) {
    throw DimensionMismatch("dimension mismatch: " + std::to_string(f.dim()) + " vs " +
                            std::to_string(g.dim()));
  }
}

FourierElement merge(const FourierElement& f, const FourierElement& g, double sign) {
  require_same_dim(f, g);
  std::vector<FourierElement::Term> out;
  out.reserve(f.size() + g.size());
  auto a = f.terms().begin();
  auto b = g.terms().begin();
  while (a != f.terms().end() || b != g.terms().end()) {
    if (b == g.terms().end() || (a != f.terms().end() && a->mode < b->mode)) {
      out.push_back(*a++);
    } else if (a == f.terms().end() || b->mode < a->mode) {
      out.push_back({b->mode, sign * b->coeff});
      ++b;
    } else {
      out.push_back({a->mode, a->coeff + sign * b->coeff});
      ++a;
      ++b;
    }
  }
  return FourierElement::from_terms(f.dim(), std::move(out));
}

}  // namespace

FourierElement add(const FourierElement& f, const FourierElement& g) { return merge(f, g, 1.0); }

FourierElement subtract(const FourierElement& f, const FourierElement& g) { return merge(f, g, -1.0); }

FourierElement scale(const FourierElement& f, complex s) {
  std::vector<FourierElement::Term> out(f.terms().begin(), f.terms().end());
  for (auto& t : out) t.coeff *= s;
  return FourierElement::from_terms(f.dim(), std::move(out));
}

FourierElement involution(const FourierElement& f) {
  std::vector<FourierElement::Term> out;
  out.reserve(f.size());
  for (const auto& t : f.terms()) out.push_back({-t.mode, std::conj(t.coeff)});
  return FourierElement::from_terms(f.dim(), std::move(out));
}

FourierElement pointwise_mul(const FourierElement& f, const FourierElement& g, int mode_cap) {
  require_same_dim(f, g);
  auto r = kernels::parallel::twisted_convolution(f, g, kernels::Twist::none(f.dim()), mode_cap);
  if (r.discarded_l1 >= kPruneTol) {
    throw TruncationOverflow("product support exceeds mode cap " + std::to_string(mode_cap));
  }
  return std::move(r.product);
}

FourierElement partial_derivative(const FourierElement& f, int axis) {
  if (axis < 0 || axis >= f.dim()) {
    throw AxisOutOfRange("axis " + std::to_string(axis) + " outside [0, " + std::to_string(f.dim()) + ")");
  }
  std::vector<FourierElement::Term> out;
  out.reserve(f.size());
  for (const auto& t : f.terms()) {
    if (t.mode[axis] == 0) continue;
    out.push_back({t.mode, complex(0.0, kTwoPi * t.mode[axis]) * t.coeff});
  }
  return FourierElement::from_terms(f.dim(), std::move(out));
}

FourierElement truncate(const FourierElement& f, int radius, double* discarded_l1) {
  std::vector<FourierElement::Term> out;
  double dropped = 0.0;
  for (const auto& t : f.terms()) {
    if (t.mode.max_norm() <= radius) {
      out.push_back(t);
    } else {
      dropped += std::abs(t.coeff);
    }
  }
  if (discarded_l1) *discarded_l1 = dropped;
  return FourierElement::from_terms(f.dim(), std::move(out));
}

std::vector<complex> eval_at(const FourierElement& f, std::span<const Point> points) {
  return kernels::parallel::evaluate_points(f, points);
}

complex eval_at(const FourierElement& f, const Point& point) {
  return kernels::serial::evaluate_points(f, std::span<const Point>(&point, 1)).front();
}

double l1_norm(const FourierElement& f) {
  double s = 0.0;
  for (const auto& t : f.terms()) s += std::abs(t.coeff);
  return s;
}

double l2_norm(const FourierElement& f) {
  double s = 0.0;
  for (const auto& t : f.terms()) s += std::norm(t.coeff);
  return std::sqrt(s);
}

double l1_distance(const FourierElement& f, const FourierElement& g) {
  require_same_dim(f, g);
  double s = 0.0;
  auto a = f.terms().begin();
  auto b = g.terms().begin();
  while (a != f.terms().end() || b != g.terms().end()) {
    if (b == g.terms().end() || (a != f.terms().end() && a->mode < b->mode)) {
      s += std::abs((a++)->coeff);
    } else if (a == f.terms().end() || b->mode < a->mode) {
      s += std::abs((b++)->coeff);
    } else {
      s += std::abs((a++)->coeff - (b++)->coeff);
    }
  }
  return s;
}

bool is_real(const FourierElement& f, double tol) {
  for (const auto& t : f.terms()) {
    if (std::abs(t.coeff - std::conj(f.coeff(-t.mode))) > tol) return false;
  }
  return true;
}

int default_seminorm_grid(int radius) { return std::max(64, 4 * (2 * radius + 1)); }

namespace {

// Unit directions over which the norm of a symmetric k-form is maximized;
// for symmetric forms the sup over the diagonal x = X_1 = ... = X_k equals
// the multilinear operator norm.
std::vector<Point> sample_directions(int dim, int order) {
  std::vector<Point> dirs;
  if (dim == 1) {
    dirs.push_back(Point{1.0, 0.0, 0.0, 0.0});
    return dirs;
  }
  if (dim == 2) {
    const int count = 64 * order;
    for (int j = 0; j < count; ++j) {
      const double phi = kPi * j / count;
      dirs.push_back(Point{std::cos(phi), std::sin(phi), 0.0, 0.0});
    }
    return dirs;
  }
  for (int a = 0; a < dim; ++a) {
    Point e{};
    e[static_cast<std::size_t>(a)] = 1.0;
    dirs.push_back(e);
  }
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  for (int j = 0; j < 256; ++j) {
    Point x{};
    double n = 0.0;
    for (int a = 0; a < dim; ++a) {
      x[static_cast<std::size_t>(a)] = normal(rng);
      n += x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
    }
    n = std::sqrt(n);
    for (auto& v : x) v /= n;
    dirs.push_back(x);
  }
  return dirs;
}

// Largest singular value of the real 2 x d matrix [Re v; Im v].
double complex_covector_norm(std::span<const complex> v) {
  double aa = 0.0, bb = 0.0, ab = 0.0;
  for (const auto& z : v) {
    aa += z.real() * z.real();
    bb += z.imag() * z.imag();
    ab += z.real() * z.imag();
  }
  const double mean = 0.5 * (aa + bb);
  const double half_gap = std::sqrt(0.25 * (aa - bb) * (aa - bb) + ab * ab);
  return std::sqrt(std::max(0.0, mean + half_gap));
}

}  // namespace

SeminormPair seminorm(const FourierElement& f, int order, int grid) {
  if (order < 0) throw InvalidArgument("seminorm order must be nonnegative");
  if (grid < 2 * f.radius() + 1) {
    throw UnderResolvedGrid("grid " + std::to_string(grid) + " below anti-aliasing minimum " +
                            std::to_string(2 * f.radius() + 1));
  }
  SeminormPair out;
  out.grid_sup = {order, 0.0, SeminormMethod::grid_sup};
  out.l1_majorant = {order, 0.0, SeminormMethod::l1_majorant};

  const auto terms = f.terms();
  const std::size_t nt = terms.size();
  const complex ik = std::pow(complex(0.0, kTwoPi), order);
  std::vector<complex> weighted(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    weighted[i] = ik * terms[i].coeff;
    out.l1_majorant.value += std::abs(terms[i].coeff) * std::pow(kTwoPi * terms[i].mode.euclidean_norm(), order);
  }
  if (nt == 0) return out;

  const int d = f.dim();
  std::vector<complex> table(static_cast<std::size_t>(grid));
  for (int j = 0; j < grid; ++j) table[static_cast<std::size_t>(j)] = unit_phase(static_cast<double>(j) / grid);

  const std::vector<Point> dirs = order >= 2 ? sample_directions(d, order) : std::vector<Point>{};
  // projections[i * ndirs + j] = (p_i . x_j)^order
  std::vector<double> projections(nt * dirs.size());
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      projections[i * dirs.size() + j] = std::pow(terms[i].mode.dot(dirs[j]), order);
    }
  }

  std::int64_t total = 1;
  for (int a = 0; a < d; ++a) total *= grid;

  double sup = 0.0;
#pragma omp parallel
  {
    std::vector<complex> z(nt);
    std::vector<complex> grad(static_cast<std::size_t>(d));
#pragma omp for schedule(static) reduction(max : sup)
    for (std::int64_t idx = 0; idx < total; ++idx) {
      std::array<int, kMaxDim> site{};
      auto rem = idx;
      for (int a = d - 1; a >= 0; --a) {
        site[static_cast<std::size_t>(a)] = static_cast<int>(rem % grid);
        rem /= grid;
      }
      for (std::size_t i = 0; i < nt; ++i) {
        complex e = 1.0;
        for (int a = 0; a < d; ++a) {
          const auto prod = static_cast<std::int64_t>(terms[i].mode[a]) * site[static_cast<std::size_t>(a)];
          const auto k = ((prod % grid) + grid) % grid;
          e *= table[static_cast<std::size_t>(k)];
        }
        z[i] = weighted[i] * e;
      }
      double value = 0.0;
      if (order == 0) {
        complex s = 0.0;
        for (const auto& v : z) s += v;
        value = std::abs(s);
      } else if (order == 1) {
        std::fill(grad.begin(), grad.end(), complex(0.0));
        for (std::size_t i = 0; i < nt; ++i) {
          for (int a = 0; a < d; ++a) grad[static_cast<std::size_t>(a)] += z[i] * static_cast<double>(terms[i].mode[a]);
        }
        value = complex_covector_norm(grad);
      } else {
        for (std::size_t j = 0; j < dirs.size(); ++j) {
          complex s = 0.0;
          for (std::size_t i = 0; i < nt; ++i) s += z[i] * projections[i * dirs.size() + j];
          value = std::max(value, std::abs(s));
        }
      }
      sup = std::max(sup, value);
    }
  }
  out.grid_sup.value = sup;
  return out;
}

}  // namespace qtorus
