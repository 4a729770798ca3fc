#include "qtorus/deformed_product.hpp"

#include <cmath>

#include "qtorus/error.hpp"
#include "qtorus/lattice_algebra.hpp"

namespace qtorus {

SymplecticStructure::SymplecticStructure(int dim, std::array<double, kMaxDim * kMaxDim> entries)
    : dim_(dim), j_(entries) {}

SymplecticStructure::SymplecticStructure(int dim, std::span<const double> row_major) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("J dimension out of range");
  if (row_major.size() != static_cast<std::size_t>(dim * dim)) {
    throw InvalidArgument("J needs " + std::to_string(dim * dim) + " entries");
  }
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      const double x = row_major[static_cast<std::size_t>(a * dim + b)];
      const double y = row_major[static_cast<std::size_t>(b * dim + a)];
      if (!std::isfinite(x)) throw InvalidArgument("J has a non-finite entry");
      if (std::abs(x + y) > 1e-12) throw InvalidArgument("J is not skew-symmetric");
      j_[static_cast<std::size_t>(a * kMaxDim + b)] = 0.5 * (x - y);
    }
  }
}

SymplecticStructure SymplecticStructure::standard(int dim) {
  if (dim < 2 || dim > kMaxDim || dim % 2 != 0) throw InvalidArgument("standard J needs even dimension");
  std::array<double, kMaxDim * kMaxDim> e{};
  for (int a = 0; a < dim; a += 2) {
    e[static_cast<std::size_t>(a * kMaxDim + a + 1)] = 1.0;
    e[static_cast<std::size_t>((a + 1) * kMaxDim + a)] = -1.0;
  }
  return SymplecticStructure(dim, e);
}

SymplecticStructure SymplecticStructure::zero(int dim) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("J dimension out of range");
  return SymplecticStructure(dim, std::array<double, kMaxDim * kMaxDim>{});
}

double SymplecticStructure::pairing(const Mode& p, const Mode& q) const {
  double s = 0.0;
  for (int a = 0; a < dim_; ++a) {
    for (int b = 0; b < dim_; ++b) s += p[a] * (*this)(a, b) * q[b];
  }
  return s;
}

PlanckParam::PlanckParam(double hbar) : hbar_(hbar) {
  if (!std::isfinite(hbar)) throw InvalidArgument("hbar must be finite");
}

kernels::Twist make_twist(PlanckParam hbar, const SymplecticStructure& J) {
  kernels::Twist t{J.dim(), {}};
  for (int a = 0; a < J.dim(); ++a) {
    for (int b = 0; b < J.dim(); ++b) t.k[static_cast<std::size_t>(a * kMaxDim + b)] = -hbar.value() * J(a, b);
  }
  return t;
}

complex cocycle(const Mode& p, const Mode& q, PlanckParam hbar, const SymplecticStructure& J) {
  return unit_phase(make_twist(hbar, J).exponent(p, q));
}

namespace {

void require_dims(const FourierElement& f, const FourierElement& g, const SymplecticStructure& J) {
  if (f.dim() != g.dim() || f.dim() != J.dim()) throw DimensionMismatch("element and J dimensions differ");
}

}  // namespace

FourierElement deformed_mul(const FourierElement& f, const FourierElement& g, PlanckParam hbar,
                            const SymplecticStructure& J, int mode_cap) {
  require_dims(f, g, J);
  auto r = kernels::parallel::twisted_convolution(f, g, make_twist(hbar, J), mode_cap);
  if (r.discarded_l1 >= kPruneTol) {
    throw TruncationOverflow("deformed product support exceeds mode cap " + std::to_string(mode_cap));
  }
  return std::move(r.product);
}

FourierElement commutator(const FourierElement& f, const FourierElement& g, PlanckParam hbar,
                          const SymplecticStructure& J, int mode_cap) {
  return subtract(deformed_mul(f, g, hbar, J, mode_cap), deformed_mul(g, f, hbar, J, mode_cap));
}

FourierElement poisson_bracket(const FourierElement& f, const FourierElement& g,
                               const SymplecticStructure& J, int mode_cap) {
  require_dims(f, g, J);
  FourierElement out(f.dim());
  for (int j = 0; j < J.dim(); ++j) {
    const FourierElement dj = partial_derivative(f, j);
    for (int k = 0; k < J.dim(); ++k) {
      if (J(j, k) == 0.0) continue;
      out = add(out, scale(pointwise_mul(dj, partial_derivative(g, k), mode_cap), J(j, k)));
    }
  }
  return out;
}

FourierElement scaled_commutator_residual(const FourierElement& H, const FourierElement& g,
                                          PlanckParam hbar, const SymplecticStructure& J,
                                          int mode_cap) {
  if (hbar.value() == 0.0) throw InvalidArgument("scaled commutator needs hbar != 0");
  const complex factor = kPi / complex(0.0, hbar.value());
  return subtract(scale(commutator(H, g, hbar, J, mode_cap), factor), poisson_bracket(H, g, J, mode_cap));
}

FourierElement one_sided_residual(const FourierElement& F, const FourierElement& g,
                                  PlanckParam hbar, const SymplecticStructure& J, int mode_cap) {
  if (hbar.value() == 0.0) throw InvalidArgument("one-sided residual needs hbar != 0");
  const complex factor = kTwoPi / complex(0.0, hbar.value());
  const FourierElement defect = subtract(deformed_mul(F, g, hbar, J, mode_cap), pointwise_mul(F, g, mode_cap));
  return subtract(scale(defect, factor), poisson_bracket(F, g, J, mode_cap));
}

}  // namespace qtorus
