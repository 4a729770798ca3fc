#include "qtorus/classical_flow.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <mutex>
#include <ostream>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "qtorus/error.hpp"
#include "qtorus/lattice_algebra.hpp"

namespace qtorus {
namespace {

double reality_tol(const FourierElement& f) { return 1e-12 * (1.0 + l1_norm(f)); }

// FFTW's planner is not thread-safe.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

VectorField::VectorField(std::vector<FourierElement> components) : components_(std::move(components)) {
  if (components_.empty() || components_.size() > static_cast<std::size_t>(kMaxDim)) {
    throw InvalidArgument("vector field needs 1..4 components");
  }
  for (const auto& c : components_) {
    if (c.dim() != dim()) throw DimensionMismatch("field component dimension differs from field dimension");
    if (!is_real(c, reality_tol(c))) throw InvalidArgument("vector field component is not real-valued");
  }
}

VectorField VectorField::zero(int dim) {
  return VectorField(std::vector<FourierElement>(static_cast<std::size_t>(dim), FourierElement(dim)));
}

VectorField VectorField::constant(const Point& x, int dim) {
  std::vector<FourierElement> c;
  for (int k = 0; k < dim; ++k) c.push_back(FourierElement::character(Mode{}, dim, x[static_cast<std::size_t>(k)]));
  return VectorField(std::move(c));
}

int VectorField::radius() const {
  int r = 0;
  for (const auto& c : components_) r = std::max(r, c.radius());
  return r;
}

VectorField hamiltonian_vector_field(const FourierElement& H, const SymplecticStructure& J) {
  if (H.dim() != J.dim()) throw DimensionMismatch("Hamiltonian and J dimensions differ");
  if (!is_real(H, reality_tol(H))) throw InvalidArgument("Hamiltonian is not real-valued");
  std::vector<FourierElement> comps(static_cast<std::size_t>(J.dim()), FourierElement(J.dim()));
  for (int j = 0; j < J.dim(); ++j) {
    const FourierElement dj = partial_derivative(H, j);
    for (int k = 0; k < J.dim(); ++k) {
      if (J(j, k) == 0.0) continue;
      comps[static_cast<std::size_t>(k)] = add(comps[static_cast<std::size_t>(k)], scale(dj, J(j, k)));
    }
  }
  return VectorField(std::move(comps));
}

FourierElement delta_phi(const FourierElement& f, const VectorField& phi, int mode_cap) {
  if (f.dim() != phi.dim()) throw DimensionMismatch("element and field dimensions differ");
  FourierElement out(f.dim());
  for (int j = 0; j < phi.dim(); ++j) {
    out = add(out, pointwise_mul(phi[j], partial_derivative(f, j), mode_cap));
  }
  return out;
}

FourierElement divergence(const VectorField& phi) {
  FourierElement out(phi.dim());
  for (int k = 0; k < phi.dim(); ++k) out = add(out, partial_derivative(phi[k], k));
  return out;
}

FlowResult flow_points(const VectorField& phi, std::span<const Point> points, double t, int steps,
                       bool with_jacobians) {
  if (steps < 1) throw InvalidArgument("steps must be >= 1");
  FlowResult r;
  r.dim = phi.dim();
  r.t = t;
  r.steps = steps;
  r.initial.assign(points.begin(), points.end());
  r.points = r.initial;
  if (with_jacobians) r.jacobians.resize(points.size());
  const kernels::FieldEvaluator field(phi.components());
  kernels::parallel::flow_batch(field, r.points, r.jacobians, t, steps);
  return r;
}

int steps_for(double t, double h) {
  if (!(h > 0.0)) throw InvalidArgument("ode step must be positive");
  return std::max(1, static_cast<int>(std::ceil(std::abs(t) / h - 1e-9)));
}

PullbackResult pullback(const FourierElement& f, const VectorField& phi, double t,
                        const PullbackOptions& options) {
  if (f.dim() != phi.dim()) throw DimensionMismatch("element and field dimensions differ");
  const int d = f.dim();
  const int n_radius = options.radius;
  if (n_radius < 0) throw InvalidArgument("truncation radius must be nonnegative");
  const int grid = options.grid > 0 ? options.grid : 4 * n_radius + 4;
  if (grid < 2 * n_radius + 2) {
    throw UnderResolvedGrid("pullback grid " + std::to_string(grid) + " below 2N+2 = " +
                            std::to_string(2 * n_radius + 2));
  }
  const int steps = options.steps > 0 ? options.steps : steps_for(t, options.ode_step);

  std::int64_t total = 1;
  for (int a = 0; a < d; ++a) total *= grid;
  std::vector<Point> pts(static_cast<std::size_t>(total));
  for (std::int64_t idx = 0; idx < total; ++idx) {
    Point m{};
    auto rem = idx;
    for (int a = d - 1; a >= 0; --a) {
      m[static_cast<std::size_t>(a)] = static_cast<double>(rem % grid) / grid;
      rem /= grid;
    }
    pts[static_cast<std::size_t>(idx)] = m;
  }
  if (t != 0.0) {
    const kernels::FieldEvaluator field(phi.components());
    kernels::parallel::flow_batch(field, pts, {}, t, steps);
  }
  const std::vector<complex> values = kernels::parallel::evaluate_points(f, pts);

  std::vector<complex> spectrum(values.size());
  {
    std::array<int, kMaxDim> dims{};
    for (int a = 0; a < d; ++a) dims[static_cast<std::size_t>(a)] = grid;
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      plan = fftw_plan_dft(d, dims.data(),
                           reinterpret_cast<fftw_complex*>(const_cast<complex*>(values.data())),
                           reinterpret_cast<fftw_complex*>(spectrum.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  PullbackResult out{FourierElement(d), 0.0, grid, n_radius, steps};
  const double norm = 1.0 / static_cast<double>(total);
  std::vector<FourierElement::Term> kept;
  for (std::int64_t idx = 0; idx < total; ++idx) {
    Mode p;
    auto rem = idx;
    bool inside = true;
    for (int a = d - 1; a >= 0; --a) {
      int k = static_cast<int>(rem % grid);
      rem /= grid;
      if (2 * k > grid) k -= grid;
      p[a] = k;
      if (std::abs(k) > n_radius || 2 * std::abs(k) == grid) inside = false;
    }
    const complex c = spectrum[static_cast<std::size_t>(idx)] * norm;
    if (inside) {
      kept.push_back({p, c});
    } else {
      out.discarded_l1 += std::abs(c);
    }
  }
  out.element = FourierElement::from_terms(d, std::move(kept));
  if (out.discarded_l1 > options.alias_tol) {
    throw SpectralUnderresolution("pullback discarded l1 mass " + std::to_string(out.discarded_l1) +
                                  " exceeds alias tolerance");
  }
  return out;
}

namespace {

double spectral_norm(const Jacobian& jac, int d) {
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = jac[static_cast<std::size_t>(i * kMaxDim + j)];
  }
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

// Partial Bell polynomial B_{n,m}(x_1, ..., x_{n-m+1}); x is 1-based.
double partial_bell(int n, int m, const std::vector<double>& x) {
  std::vector<std::vector<double>> b(static_cast<std::size_t>(n + 1),
                                     std::vector<double>(static_cast<std::size_t>(m + 1), 0.0));
  b[0][0] = 1.0;
  auto binom = [](int a, int c) {
    double r = 1.0;
    for (int i = 1; i <= c; ++i) r = r * (a - c + i) / i;
    return r;
  };
  for (int nn = 1; nn <= n; ++nn) {
    for (int mm = 1; mm <= std::min(nn, m); ++mm) {
      double s = 0.0;
      for (int i = 1; i <= nn - mm + 1; ++i) {
        s += binom(nn - 1, i - 1) * x[static_cast<std::size_t>(i)] *
             b[static_cast<std::size_t>(nn - i)][static_cast<std::size_t>(mm - 1)];
      }
      b[static_cast<std::size_t>(nn)][static_cast<std::size_t>(mm)] = s;
    }
  }
  return b[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)];
}

}  // namespace

double jacobian_sup_norm(const VectorField& phi, int grid) {
  const int d = phi.dim();
  if (grid <= 0) grid = default_seminorm_grid(phi.radius());
  if (grid < 2 * phi.radius() + 1) throw UnderResolvedGrid("jacobian grid below anti-aliasing minimum");
  const kernels::FieldEvaluator field(phi.components());
  std::int64_t total = 1;
  for (int a = 0; a < d; ++a) total *= grid;
  double sup = 0.0;
#pragma omp parallel for schedule(static) reduction(max : sup)
  for (std::int64_t idx = 0; idx < total; ++idx) {
    Point m{};
    auto rem = idx;
    for (int a = d - 1; a >= 0; --a) {
      m[static_cast<std::size_t>(a)] = static_cast<double>(rem % grid) / grid;
      rem /= grid;
    }
    Point value;
    Jacobian jac;
    field.evaluate(m, value, &jac);
    sup = std::max(sup, spectral_norm(jac, d));
  }
  return sup;
}

double gronwall_bound(const VectorField& phi, double t, int order) {
  if (order < 1) throw InvalidArgument("derivative order must be >= 1");
  if (t < 0.0) throw InvalidArgument("gronwall bound needs t >= 0");
  const double lambda = jacobian_sup_norm(phi);
  const double growth = std::exp(t * lambda);
  if (order == 1) return growth;

  const int grid = default_seminorm_grid(phi.radius());
  // dphi[m] bounds ||D^m Phi||_inf via the component seminorms.
  std::vector<double> dphi(static_cast<std::size_t>(order + 1), 0.0);
  for (int m = 2; m <= order; ++m) {
    double s = 0.0;
    for (int k = 0; k < phi.dim(); ++k) {
      const double v = seminorm(phi[k], m, grid).grid_sup.value;
      s += v * v;
    }
    dphi[static_cast<std::size_t>(m)] = std::sqrt(s);
  }
  std::vector<double> bound(static_cast<std::size_t>(order + 1), 0.0);
  bound[1] = growth;
  for (int k = 2; k <= order; ++k) {
    double lk = 0.0;
    for (int m = 2; m <= k; ++m) lk += dphi[static_cast<std::size_t>(m)] * partial_bell(k, m, bound);
    bound[static_cast<std::size_t>(k)] = t * lk * growth;
  }
  return bound[static_cast<std::size_t>(order)];
}

double torus_distance(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int j = 0; j < dim; ++j) {
    double dx = std::abs(a[static_cast<std::size_t>(j)] - b[static_cast<std::size_t>(j)]);
    dx -= std::floor(dx);
    dx = std::min(dx, 1.0 - dx);
    s += dx * dx;
  }
  return std::sqrt(s);
}

LipschitzReport lipschitz_check(const VectorField& phi, double t,
                                std::span<const std::pair<Point, Point>> pairs, int steps) {
  LipschitzReport r;
  r.bound = std::exp(std::abs(t) * jacobian_sup_norm(phi));
  r.pairs = static_cast<int>(pairs.size());
  std::vector<Point> pts;
  pts.reserve(2 * pairs.size());
  for (const auto& [x, y] : pairs) {
    pts.push_back(x);
    pts.push_back(y);
  }
  const FlowResult fr = flow_points(phi, pts, t, steps);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double before = torus_distance(pairs[i].first, pairs[i].second, phi.dim());
    if (before == 0.0) continue;
    const double after = torus_distance(fr.points[2 * i], fr.points[2 * i + 1], phi.dim());
    const double ratio = after / before;
    r.max_ratio = std::max(r.max_ratio, ratio);
    if (ratio > r.bound * (1.0 + 1e-6)) ++r.violations;
  }
  return r;
}

double determinant(const Jacobian& jac, int dim) {
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) m(i, j) = jac[static_cast<std::size_t>(i * kMaxDim + j)];
  }
  return m.determinant();
}

void write_flow_csv(std::ostream& out, const FlowResult& result) {
  const int d = result.dim;
  const bool jac = !result.jacobians.empty();
  out << "index";
  for (int a = 0; a < d; ++a) out << ",x0_" << a + 1;
  for (int a = 0; a < d; ++a) out << ",x_" << a + 1;
  if (jac) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) out << ",J_" << i + 1 << j + 1;
    }
    out << ",det";
  }
  out << '\n';
  char buf[32];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << ',' << buf;
  };
  for (std::size_t n = 0; n < result.points.size(); ++n) {
    out << n;
    for (int a = 0; a < d; ++a) num(result.initial[n][static_cast<std::size_t>(a)]);
    for (int a = 0; a < d; ++a) num(result.points[n][static_cast<std::size_t>(a)]);
    if (jac) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) num(result.jacobians[n][static_cast<std::size_t>(i * kMaxDim + j)]);
      }
      num(determinant(result.jacobians[n], d));
    }
    out << '\n';
  }
}

}  // namespace qtorus
