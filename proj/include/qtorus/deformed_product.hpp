#pragma once

// Deformed product x_hbar on trigonometric polynomials. On characters the
// defining oscillatory integral collapses to a unit phase, so
//
//     e_p x_hbar e_q = e(-hbar p.Jq) e_{p+q},
//
// and the product of general elements is a cocycle-twisted convolution.

#include <span>

#include "qtorus/fourier_element.hpp"
#include "qtorus/kernels.hpp"

namespace qtorus {

/// Real skew-symmetric d x d matrix J.
class SymplecticStructure {
 public:
  /// Row-major d x d input. Entries violating J = -J^T by more than 1e-12
  /// are rejected; within that tolerance the matrix is antisymmetrized.
  SymplecticStructure(int dim, std::span<const double> row_major);

  /// Blocks [[0, 1], [-1, 0]] along the diagonal; dim must be even.
  static SymplecticStructure standard(int dim = 2);
  static SymplecticStructure zero(int dim = 2);

  int dim() const { return dim_; }
  double operator()(int j, int k) const { return j_[static_cast<std::size_t>(j * kMaxDim + k)]; }
  /// p . J q
  double pairing(const Mode& p, const Mode& q) const;

 private:
  SymplecticStructure(int dim, std::array<double, kMaxDim * kMaxDim> entries);
  int dim_;
  std::array<double, kMaxDim * kMaxDim> j_{};
};

/// Planck parameter hbar; any finite real value (0 selects the pointwise product).
class PlanckParam {
 public:
  explicit PlanckParam(double hbar);
  double value() const { return hbar_; }

 private:
  double hbar_;
};

/// Cocycle exponent matrix -hbar J for the convolution kernels.
kernels::Twist make_twist(PlanckParam hbar, const SymplecticStructure& J);

/// e(-hbar p.Jq).
complex cocycle(const Mode& p, const Mode& q, PlanckParam hbar, const SymplecticStructure& J);

/// f x_hbar g. Throws TruncationOverflow when the product has support beyond mode_cap.
FourierElement deformed_mul(const FourierElement& f, const FourierElement& g, PlanckParam hbar,
                            const SymplecticStructure& J, int mode_cap = kDefaultModeCap);

/// [f, g]_hbar = f x g - g x f.
FourierElement commutator(const FourierElement& f, const FourierElement& g, PlanckParam hbar,
                          const SymplecticStructure& J, int mode_cap = kDefaultModeCap);

/// {f, g} = sum_jk J_jk d_j f d_k g.
FourierElement poisson_bracket(const FourierElement& f, const FourierElement& g,
                               const SymplecticStructure& J, int mode_cap = kDefaultModeCap);

/// (pi / (i hbar)) [H, g]_hbar - {H, g}. Vanishes like hbar^2 on fixed
/// trigonometric polynomials. hbar = 0 throws InvalidArgument.
FourierElement scaled_commutator_residual(const FourierElement& H, const FourierElement& g,
                                          PlanckParam hbar, const SymplecticStructure& J,
                                          int mode_cap = kDefaultModeCap);

/// (2 pi / (i hbar)) (F x_hbar g - F g) - {F, g}. Vanishes like hbar.
FourierElement one_sided_residual(const FourierElement& F, const FourierElement& g,
                                  PlanckParam hbar, const SymplecticStructure& J,
                                  int mode_cap = kDefaultModeCap);

}  // namespace qtorus
