#pragma once

// Quantum Heisenberg evolution in the deformed algebra:
//   H^hbar = (-pi / hbar) H,   u_t = exp_hbar(i t H^hbar),
//   beta^hbar_t(f) = u_t x f x u_{-t},
// with an equivalent coefficient ODE dF/dt = (pi / (i hbar)) [H, F]_hbar.

#include "qtorus/cstar_norm.hpp"
#include "qtorus/deformed_product.hpp"
#include "qtorus/fourier_element.hpp"

namespace qtorus {

class QuantumHamiltonian {
 public:
  /// Throws InvalidArgument if H is not real-valued or hbar == 0.
  QuantumHamiltonian(FourierElement H, PlanckParam hbar);

  const FourierElement& base() const { return base_; }
  PlanckParam hbar() const { return hbar_; }
  /// (-pi / hbar) H
  const FourierElement& scaled() const { return scaled_; }

 private:
  FourierElement base_;
  PlanckParam hbar_;
  FourierElement scaled_;
};

struct SeriesOptions {
  double tol = 1e-12;   // stop once the l1 norm of a series term drops below tol
  int radius = 64;      // truncation radius for every intermediate product
  int max_terms = 400;  // SeriesDivergence beyond this
};

struct EvolutionResult {
  FourierElement element;
  double discarded_l1 = 0.0;  // l1 mass removed by truncation
  int terms = 0;              // series terms (largest over substeps)
  int substeps = 1;
  int steps = 0;  // ODE steps (heisenberg_evolve only)
};

/// sum_n f^{x n} / n!
EvolutionResult exp_deformed(const FourierElement& f, PlanckParam hbar, const SymplecticStructure& J,
                             const SeriesOptions& options = {});

/// u_t, composed from substeps with (pi/|hbar|) ||H||_l1 dt <= 4.
EvolutionResult unitary_propagator(const QuantumHamiltonian& qh, double t, const SymplecticStructure& J,
                                   const SeriesOptions& options = {});

/// u_t x f x u_{-t}.
EvolutionResult conjugation_evolve(const FourierElement& f, const QuantumHamiltonian& qh, double t,
                                   const SymplecticStructure& J, const SeriesOptions& options = {});

/// RK4 on dF/dt = (pi / (i hbar)) [H, F]_hbar, truncating to `radius` each stage.
EvolutionResult heisenberg_evolve(const FourierElement& f, const QuantumHamiltonian& qh, double t,
                                  const SymplecticStructure& J, int steps, int radius);

/// Truncation radius for evolved observables: base + ceil(8 |t| s) with
/// s = ||DPhi_H||_inf / (2 pi), the rate at which the flow spreads frequencies.
int evolve_radius(const FourierElement& H, const SymplecticStructure& J, double t, int base_radius);

/// | ||beta^hbar_t f|| - ||f|| | with both estimates on a shared window.
double isometry_defect(const FourierElement& f, const QuantumHamiltonian& qh, double t,
                       const SymplecticStructure& J, int steps, int radius, NormOptions norm = {});

}  // namespace qtorus
