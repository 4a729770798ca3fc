#pragma once

// Undeformed (pointwise) algebra of trigonometric polynomials on T^d:
// vector-space operations, involution, convolution product, partial
// derivatives, point evaluation and the derivative seminorms ||D^k f||_inf.

#include <span>
#include <vector>

#include "qtorus/fourier_element.hpp"

namespace qtorus {

FourierElement add(const FourierElement& f, const FourierElement& g);
FourierElement subtract(const FourierElement& f, const FourierElement& g);
FourierElement scale(const FourierElement& f, complex s);

/// f* with coefficients conj(c_{-p}).
FourierElement involution(const FourierElement& f);

/// Exact product of trigonometric polynomials. Throws TruncationOverflow if
/// the product has a coefficient outside |p|_inf <= mode_cap.
FourierElement pointwise_mul(const FourierElement& f, const FourierElement& g,
                             int mode_cap = kDefaultModeCap);

/// d/dm_axis, axis in [0, dim). c_p -> 2 pi i p_axis c_p.
FourierElement partial_derivative(const FourierElement& f, int axis);

/// Keeps modes with |p|_inf <= radius; `discarded_l1` receives the l1 mass
/// of everything dropped.
FourierElement truncate(const FourierElement& f, int radius, double* discarded_l1 = nullptr);

std::vector<complex> eval_at(const FourierElement& f, std::span<const Point> points);
complex eval_at(const FourierElement& f, const Point& point);

double l1_norm(const FourierElement& f);
double l2_norm(const FourierElement& f);

/// l1 distance between coefficient vectors.
double l1_distance(const FourierElement& f, const FourierElement& g);

/// True when f = f* up to `tol` in every coefficient.
bool is_real(const FourierElement& f, double tol = 1e-12);

enum class SeminormMethod { grid_sup, l1_majorant };

struct SeminormReport {
  int order = 0;
  double value = 0.0;
  SeminormMethod method = SeminormMethod::grid_sup;
};

struct SeminormPair {
  SeminormReport grid_sup;
  SeminormReport l1_majorant;
};

/// ||D^k f||_inf, where (D^k f)_m is the symmetric k-linear form
///   (X_1..X_k) -> sum_p c_p (2 pi i)^k (p.X_1)...(p.X_k) e(p.m)
/// normed with the Euclidean inner product. The grid-sup value samples m on a
/// uniform grid^d grid and takes the form norm over unit directions; the
/// l1 majorant sum |c_p| (2 pi |p|_2)^k dominates it.
/// Requires grid >= 2 * radius + 1 (UnderResolvedGrid otherwise).
SeminormPair seminorm(const FourierElement& f, int order, int grid);

/// Grid resolution used when callers do not pick one: four times the
/// anti-aliasing minimum, never below 64.
int default_seminorm_grid(int radius);

}  // namespace qtorus
