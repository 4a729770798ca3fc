#pragma once

// Bounds on the C*-norm ||f||_hbar of a trigonometric polynomial in the
// deformed algebra.
//
//   l2 lower bound   ||f||_hbar >= (sum |c_p|^2)^(1/2)   (f applied to e_0)
//   l1 upper bound   ||f||_hbar <= sum |c_p|             (sum of unitaries)
//   op_lower         largest singular value of the compression of the
//                    left-regular twisted representation to the window
//                    |q|_inf <= W; compressions only shrink norms, so this is
//                    a certified lower bound that is nondecreasing in W.

#include <string>

#include <json.hpp>

#include "qtorus/deformed_product.hpp"
#include "qtorus/fourier_element.hpp"

namespace qtorus {

struct NormEstimate {
  double lower_l2 = 0.0;
  double upper_l1 = 0.0;
  double op_lower = 0.0;
  int window = 0;
  int iterations = 0;
  double residual = 0.0;  // relative eigen-residual of the top Ritz pair
  bool converged = true;
};

enum class NormMethod {
  power,    // power iteration on L*L
  lanczos,  // Lanczos on L*L, same start vector
};

struct NormOptions {
  int window = 0;  // 0 selects default_window(f)
  double tol = 1e-8;
  NormMethod method = NormMethod::lanczos;
  bool parallel = true;  // OpenMP window kernel; false uses the serial reference
};

double l1_upper(const FourierElement& f);
double l2_lower(const FourierElement& f);

/// max(32, 4 * radius(f)).
int default_window(const FourierElement& f);

/// Throws InvalidArgument when window < radius(f) + 1. Non-convergence within
/// the iteration cap (10 W^2) is reported through `converged`, not thrown.
NormEstimate op_norm_estimate(const FourierElement& f, PlanckParam hbar, const SymplecticStructure& J,
                              const NormOptions& options = {});

nlohmann::json to_json(const NormEstimate& e);
std::string to_string(NormMethod m);
NormMethod parse_norm_method(const std::string& name);

}  // namespace qtorus
