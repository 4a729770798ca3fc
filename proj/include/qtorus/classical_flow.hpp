#pragma once

// Hamiltonian vector fields on T^d, the derivation they induce, the point
// flow (fixed-step RK4 with an optional variational equation for the
// Jacobian), pullback of functions along the flow, and a priori bounds on
// the flow derivatives.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qtorus/deformed_product.hpp"
#include "qtorus/fourier_element.hpp"
#include "qtorus/kernels.hpp"

namespace qtorus {

using kernels::Jacobian;

/// Phi = (Phi_1, ..., Phi_d) with real-valued trigonometric-polynomial components.
class VectorField {
 public:
  /// Throws InvalidArgument when a component fails the reality test.
  explicit VectorField(std::vector<FourierElement> components);
  static VectorField zero(int dim = 2);
  /// Constant field X.
  static VectorField constant(const Point& x, int dim = 2);

  int dim() const { return static_cast<int>(components_.size()); }
  const FourierElement& operator[](int k) const { return components_[static_cast<std::size_t>(k)]; }
  std::span<const FourierElement> components() const { return components_; }
  int radius() const;

 private:
  std::vector<FourierElement> components_;
};

/// Phi_k = sum_j J_jk d_j H. Throws InvalidArgument if H is not real-valued.
VectorField hamiltonian_vector_field(const FourierElement& H, const SymplecticStructure& J);

/// delta_Phi f = sum_j Phi_j d_j f.
FourierElement delta_phi(const FourierElement& f, const VectorField& phi,
                         int mode_cap = kDefaultModeCap);

/// Divergence sum_k d_k Phi_k as an element (zero for Hamiltonian fields).
FourierElement divergence(const VectorField& phi);

struct FlowResult {
  std::vector<Point> initial;
  std::vector<Point> points;       // wrapped into [0,1)^d
  std::vector<Jacobian> jacobians;  // empty unless requested
  int dim = 2;
  double t = 0.0;
  int steps = 0;
  std::string stepper = "rk4-fixed";
};

FlowResult flow_points(const VectorField& phi, std::span<const Point> points, double t, int steps,
                       bool with_jacobians = false);

/// Steps for a fixed-step integration of length |t| at step size h (at least 1).
int steps_for(double t, double h);

struct PullbackOptions {
  int grid = 0;        // sampling grid per axis; 0 selects 4 * radius + 4
  int radius = 32;     // truncation radius N of the result
  int steps = 0;       // RK4 steps; 0 selects steps_for(t, ode_step)
  double ode_step = 1e-3;
  double alias_tol = 1e-6;  // max discarded l1 mass before SpectralUnderresolution
};

struct PullbackResult {
  FourierElement element;
  double discarded_l1 = 0.0;
  int grid = 0;
  int radius = 0;
  int steps = 0;
};

/// f o beta_t: samples f on the flowed uniform grid, transforms back with a
/// DFT and truncates to the requested radius. Requires grid >= 2N+2
/// (UnderResolvedGrid). Throws SpectralUnderresolution when the discarded l1
/// mass exceeds alias_tol.
PullbackResult pullback(const FourierElement& f, const VectorField& phi, double t,
                        const PullbackOptions& options = {});

/// sup over a grid of the spectral norm of DPhi(m).
double jacobian_sup_norm(const VectorField& phi, int grid = 0);

/// Bound on ||D^k beta(t, x)||: exp(t ||DPhi||) for k = 1, and
/// t L_k exp(t ||DPhi||) for k >= 2 with L_k from the higher chain rule.
double gronwall_bound(const VectorField& phi, double t, int order);

struct LipschitzReport {
  double max_ratio = 0.0;
  double bound = 1.0;
  int pairs = 0;
  int violations = 0;
};

/// Torus distance between two points of T^d.
double torus_distance(const Point& a, const Point& b, int dim);

/// Flows each pair for time t and compares distance ratios with
/// exp(t ||DPhi||) (1 + 1e-6).
LipschitzReport lipschitz_check(const VectorField& phi, double t,
                                std::span<const std::pair<Point, Point>> pairs, int steps);

/// CSV: index, initial coords, final coords, optional Jacobian entries and det.
void write_flow_csv(std::ostream& out, const FlowResult& result);

/// Determinant of the leading d x d block.
double determinant(const Jacobian& jac, int dim);

}  // namespace qtorus
