#include "qtorus/cstar_norm.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <random>
#include <vector>


#include "qtorus/error.hpp"
#include "qtorus/kernels.hpp"
#include "qtorus/lattice_algebra.hpp"

namespace qtorus {

double l1_upper(const FourierElement& f) { return l1_norm(f); }
double l2_lower(const FourierElement& f) { return l2_norm(f); }

int default_window(const FourierElement& f) { return std::max(32, 4 * f.radius()); }

namespace {

using Vec = std::vector<complex>;

double norm(const Vec& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

complex dot(const Vec& a, const Vec& b) {
  complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

void scale_in_place(Vec& v, double s) {
  for (auto& z : v) z *= s;
}

// Gram operator L*L of a window compression.
template <class Op>
struct Gram {
  const Op& op;
  mutable Vec tmp;
  explicit Gram(const Op& o) : op(o), tmp(o.size()) {}
  void operator()(const Vec& x, Vec& y) const {
    op.apply(x, tmp);
    op.apply_adjoint(tmp, y);
  }
};

Vec random_vector(std::size_t size) {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal;
  Vec v(size);
  for (auto& z : v) z = complex(normal(rng), normal(rng));
  scale_in_place(v, 1.0 / norm(v));
  return v;
}

// e_0 plus a small seeded random component: sparse elements leave lattice
// cosets invariant, and e_0 alone would only see its own coset.
Vec start_vector(std::size_t size, int dim, int window) {
  Vec v = random_vector(size);
  scale_in_place(v, 0.1);
  std::size_t idx = 0;
  for (int a = 0; a < dim; ++a) idx = idx * static_cast<std::size_t>(2 * window + 1) + static_cast<std::size_t>(window);
  v[idx] += 1.0;
  scale_in_place(v, 1.0 / norm(v));
  return v;
}

struct Spectral {
  double top = 0.0;  // largest eigenvalue estimate of L*L
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

template <class Op>
Spectral power_iteration(const Op& op, int dim, int window, double tol, int cap) {
  Gram<Op> gram(op);
  Vec x = start_vector(op.size(), dim, window);
  Vec y(op.size());
  Spectral out;
  bool restarted = false;
  for (int it = 1; it <= cap; ++it) {
    gram(x, y);
    const double rho = dot(x, y).real();
    out.iterations = it;
    if (rho <= 0.0) {
      if (restarted) {
        out.converged = true;  // L vanishes on the window
        return out;
      }
      restarted = true;
      x = random_vector(op.size());
      continue;
    }
    double r2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) r2 += std::norm(y[i] - rho * x[i]);
    out.top = std::max(out.top, rho);
    out.residual = std::sqrt(r2) / rho;
    if (out.residual <= tol) {
      out.converged = true;
      return out;
    }
    x.swap(y);
    scale_in_place(x, 1.0 / norm(x));
  }
  return out;
}

// Number of eigenvalues of the tridiagonal (alpha, beta) below x (Sturm count).
int count_below(const std::vector<double>& alpha, const std::vector<double>& beta, double x) {
  int count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double b2 = i > 0 ? beta[i - 1] * beta[i - 1] : 0.0;
    d = (alpha[i] - x) - (i > 0 ? b2 / d : 0.0);
    if (d == 0.0) d = -1e-300;
    if (d < 0.0) ++count;
  }
  return count;
}

// Eigenvalue number `rank` (0 = largest) of the tridiagonal by bisection
// inside the Gershgorin interval.
double ritz_value(const std::vector<double>& alpha, const std::vector<double>& beta, int rank) {
  const std::size_t m = alpha.size();
  double lo = alpha[0], hi = alpha[0];
  for (std::size_t i = 0; i < m; ++i) {
    const double r = (i > 0 ? std::abs(beta[i - 1]) : 0.0) + (i + 1 < m ? std::abs(beta[i]) : 0.0);
    lo = std::min(lo, alpha[i] - r);
    hi = std::max(hi, alpha[i] + r);
  }
  const int n = static_cast<int>(m) - rank;
  for (int it = 0; it < 200 && hi - lo > 4e-16 * std::max(std::abs(lo), std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(alpha, beta, mid) >= n) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Largest Ritz value and the last component of its eigenvector by inverse
// iteration with a shift just above it (the shifted matrix is definite, so
// the LDL^T solve needs no pivoting).
std::pair<double, double> top_ritz(const std::vector<double>& alpha, const std::vector<double>& beta) {
  const std::size_t m = alpha.size();
  const double theta = ritz_value(alpha, beta, 0);
  if (m == 1) return {theta, 1.0};

  const double sigma = theta + 1e-10 * std::max(1.0, std::abs(theta));
  std::vector<double> d(m), l(m), x(m, 1.0);
  d[0] = alpha[0] - sigma;
  for (std::size_t i = 1; i < m; ++i) {
    l[i] = beta[i - 1] / d[i - 1];
    d[i] = (alpha[i] - sigma) - l[i] * beta[i - 1];
  }
  for (int pass = 0; pass < 3; ++pass) {
    for (std::size_t i = 1; i < m; ++i) x[i] -= l[i] * x[i - 1];
    for (std::size_t i = 0; i < m; ++i) x[i] /= d[i];
    for (std::size_t i = m - 1; i-- > 0;) x[i] -= l[i + 1] * x[i + 1];
    double nx = 0.0;
    for (double v : x) nx = std::max(nx, std::abs(v));
    for (double& v : x) v /= nx;
  }
  double n2 = 0.0;
  for (double v : x) n2 += v * v;
  return {theta, std::abs(x[m - 1]) / std::sqrt(n2)};
}

template <class Op>
Spectral lanczos(const Op& op, int dim, int window, double tol, int cap) {
  Gram<Op> gram(op);
  const std::size_t n = op.size();
  Vec v = start_vector(n, dim, window);
  Vec v_prev(n, complex(0.0));
  Vec w(n);
  std::vector<double> alpha, beta;  // beta[k] couples v_k and v_{k+1}
  Spectral out;
  bool restarted = false;
  int confirm_at = -1;
  double confirmed = 0.0;

  for (int k = 0; k < cap; ++k) {
    gram(v, w);
    const double a = dot(v, w).real();
    if (k == 0 && a <= 0.0) {
      if (restarted) {
        out.converged = true;
        out.iterations = 1;
        return out;
      }
      restarted = true;
      v = random_vector(n);
      --k;
      continue;
    }
    const double b_prev = beta.empty() ? 0.0 : beta.back();
    for (std::size_t i = 0; i < n; ++i) w[i] -= a * v[i] + b_prev * v_prev[i];
    // one local reorthogonalization step against v keeps alpha accurate
    const complex c = dot(v, w);
    for (std::size_t i = 0; i < n; ++i) w[i] -= c * v[i];
    alpha.push_back(a + c.real());
    const double b = norm(w);
    out.iterations = k + 1;

    const bool last = (k + 1 == cap);
    const bool breakdown = b <= 1e-14 * std::max(1.0, out.top);
    const int stride = std::max(5, k / 32);
    if (k < 40 || k % stride == 0 || last || breakdown) {
      const auto [theta, s_last] = top_ritz(alpha, beta);
      out.top = std::max(out.top, theta);
      out.residual = theta > 0.0 ? b * s_last / theta : 0.0;
      out.converged = out.residual <= tol;
      // Without full reorthogonalization a converged Ritz value reappears as
      // a ghost copy, and the copies share the eigenvector weight.
      if (!out.converged && alpha.size() > 1 && theta > 0.0) {
        const double gap = (theta - ritz_value(alpha, beta, 1)) / theta;
        if (gap <= tol) {
          out.residual = gap;
          out.converged = true;
        }
      }
      if (breakdown) {
        out.converged = true;
        return out;
      }
      // A converged Ritz pair may belong to the second member of a tight
      // cluster; keep going until the top value holds for a further stretch.
      if (out.converged) {
        if (confirm_at < 0 || out.top > confirmed * (1.0 + tol)) {
          confirm_at = k + std::max(10, k / 4);
          confirmed = out.top;
        } else if (k >= confirm_at) {
          return out;
        }
      }
    }
    if (last) break;
    beta.push_back(b);
    v_prev.swap(v);
    v = w;
    scale_in_place(v, 1.0 / b);
  }
  return out;
}

template <class Op>
Spectral run(const Op& op, int dim, int window, const NormOptions& o) {
  const int cap = 10 * window * window;
  return o.method == NormMethod::power ? power_iteration(op, dim, window, o.tol, std::max(cap, 1))
                                       : lanczos(op, dim, window, o.tol, std::max(cap, 1));
}

}  // namespace

NormEstimate op_norm_estimate(const FourierElement& f, PlanckParam hbar, const SymplecticStructure& J,
                              const NormOptions& options) {
  if (f.dim() != J.dim()) throw DimensionMismatch("element and J dimensions differ");
  const int window = options.window > 0 ? options.window : default_window(f);
  if (window < f.radius() + 1) {
    throw InvalidArgument("window " + std::to_string(window) + " below radius + 1 = " +
                          std::to_string(f.radius() + 1));
  }
  NormEstimate e;
  e.lower_l2 = l2_lower(f);
  e.upper_l1 = l1_upper(f);
  e.window = window;
  if (f.empty()) return e;

  const kernels::Twist twist = make_twist(hbar, J);
  Spectral s;
  if (options.parallel) {
    s = run(kernels::parallel::WindowOperator(f, twist, window), f.dim(), window, options);
  } else {
    s = run(kernels::serial::WindowOperator(f, twist, window), f.dim(), window, options);
  }
  e.op_lower = std::sqrt(std::max(0.0, s.top));
  e.iterations = s.iterations;
  e.residual = s.residual;
  e.converged = s.converged;
  return e;
}

nlohmann::json to_json(const NormEstimate& e) {
  return {{"lower_l2", e.lower_l2}, {"upper_l1", e.upper_l1}, {"op_lower", e.op_lower},
          {"window", e.window},     {"iterations", e.iterations}, {"residual", e.residual},
          {"converged", e.converged}};
}

std::string to_string(NormMethod m) { return m == NormMethod::power ? "power" : "lanczos"; }

NormMethod parse_norm_method(const std::string& name) {
  if (name == "power") return NormMethod::power;
  if (name == "lanczos") return NormMethod::lanczos;
  throw InvalidArgument("unknown norm method '" + name + "'");
}

}  // namespace qtorus
