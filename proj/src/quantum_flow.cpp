#include "qtorus/quantum_flow.hpp"

#include <cmath>

#include "qtorus/classical_flow.hpp"
#include "qtorus/error.hpp"
#include "qtorus/kernels.hpp"
#include "qtorus/lattice_algebra.hpp"

namespace qtorus {

QuantumHamiltonian::QuantumHamiltonian(FourierElement H, PlanckParam hbar)
    : base_(std::move(H)), hbar_(hbar), scaled_(base_.dim()) {
  if (hbar.value() == 0.0) throw InvalidArgument("quantum Hamiltonian needs hbar != 0");
  if (!is_real(base_, 1e-12 * (1.0 + l1_norm(base_)))) throw InvalidArgument("Hamiltonian is not real-valued");
  scaled_ = scale(base_, -kPi / hbar.value());
}

namespace {

struct Product {
  FourierElement value;
  double discarded;
};

Product twisted(const FourierElement& f, const FourierElement& g, const kernels::Twist& tw, int radius) {
  auto r = kernels::parallel::twisted_convolution(f, g, tw, radius);
  return {std::move(r.product), r.discarded_l1};
}

}  // namespace

EvolutionResult exp_deformed(const FourierElement& f, PlanckParam hbar, const SymplecticStructure& J,
                             const SeriesOptions& options) {
  if (f.dim() != J.dim()) throw DimensionMismatch("element and J dimensions differ");
  const kernels::Twist tw = make_twist(hbar, J);
  EvolutionResult out{FourierElement::unit(f.dim()), 0.0, 0, 1, 0};
  FourierElement term = FourierElement::unit(f.dim());
  for (int n = 1; n <= options.max_terms; ++n) {
    auto p = twisted(term, f, tw, options.radius);
    term = scale(p.value, 1.0 / n);
    out.discarded_l1 += p.discarded / n;
    out.element = add(out.element, term);
    out.terms = n;
    if (l1_norm(term) < options.tol) return out;
  }
  throw SeriesDivergence("exponential series did not reach tolerance within " +
                         std::to_string(options.max_terms) + " terms");
}

EvolutionResult unitary_propagator(const QuantumHamiltonian& qh, double t, const SymplecticStructure& J,
                                   const SeriesOptions& options) {
  const int dim = qh.base().dim();
  if (t == 0.0) return {FourierElement::unit(dim), 0.0, 0, 1, 0};
  const double rate = std::abs(t) * l1_norm(qh.scaled());
  const int substeps = std::max(1, static_cast<int>(std::ceil(rate / 4.0)));
  const double dt = t / substeps;
  EvolutionResult step = exp_deformed(scale(qh.scaled(), complex(0.0, dt)), qh.hbar(), J, options);

  const kernels::Twist tw = make_twist(qh.hbar(), J);
  EvolutionResult out = step;
  out.substeps = substeps;
  for (int s = 1; s < substeps; ++s) {
    auto p = twisted(out.element, step.element, tw, options.radius);
    out.element = std::move(p.value);
    out.discarded_l1 += p.discarded + step.discarded_l1;
  }
  return out;
}

EvolutionResult conjugation_evolve(const FourierElement& f, const QuantumHamiltonian& qh, double t,
                                   const SymplecticStructure& J, const SeriesOptions& options) {
  const EvolutionResult u = unitary_propagator(qh, t, J, options);
  const EvolutionResult u_inv = unitary_propagator(qh, -t, J, options);
  const kernels::Twist tw = make_twist(qh.hbar(), J);
  auto left = twisted(u.element, f, tw, options.radius);
  auto full = twisted(left.value, u_inv.element, tw, options.radius);
  EvolutionResult out{std::move(full.value), 0.0, std::max(u.terms, u_inv.terms), u.substeps, 0};
  out.discarded_l1 = u.discarded_l1 + u_inv.discarded_l1 + left.discarded + full.discarded;
  return out;
}

namespace {

// (pi / (i hbar)) [H, F]_hbar truncated to `radius`, with the l1 mass of the
// truncated part of the commutator itself.
struct Generator {
  const FourierElement& H;
  kernels::Twist twist;
  complex factor;
  int radius;

  Product operator()(const FourierElement& F) const {
    const int wide = radius + H.radius();
    auto hf = kernels::parallel::twisted_convolution(H, F, twist, wide);
    auto fh = kernels::parallel::twisted_convolution(F, H, twist, wide);
    double dropped = 0.0;
    FourierElement c = truncate(scale(subtract(hf.product, fh.product), factor), radius, &dropped);
    return {std::move(c), dropped};
  }
};

}  // namespace

EvolutionResult heisenberg_evolve(const FourierElement& f, const QuantumHamiltonian& qh, double t,
                                  const SymplecticStructure& J, int steps, int radius) {
  if (steps < 1) throw InvalidArgument("steps must be >= 1");
  if (f.dim() != J.dim()) throw DimensionMismatch("element and J dimensions differ");
  const double hbar = qh.hbar().value();
  const Generator gen{qh.base(), make_twist(qh.hbar(), J), kPi / complex(0.0, hbar), radius};

  EvolutionResult out;
  out.element = truncate(f, radius, &out.discarded_l1);
  out.steps = steps;
  const double h = t / steps;
  for (int n = 0; n < steps; ++n) {
    const FourierElement& F = out.element;
    Product k1 = gen(F);
    Product k2 = gen(add(F, scale(k1.value, 0.5 * h)));
    Product k3 = gen(add(F, scale(k2.value, 0.5 * h)));
    Product k4 = gen(add(F, scale(k3.value, h)));
    FourierElement incr = add(add(k1.value, scale(k2.value, 2.0)), add(scale(k3.value, 2.0), k4.value));
    out.element = add(F, scale(incr, h / 6.0));
    out.discarded_l1 += std::abs(h) / 6.0 * (k1.discarded + 2.0 * k2.discarded + 2.0 * k3.discarded + k4.discarded);
  }
  return out;
}

int evolve_radius(const FourierElement& H, const SymplecticStructure& J, double t, int base_radius) {
  const VectorField phi = hamiltonian_vector_field(H, J);
  const double spread = jacobian_sup_norm(phi) / kTwoPi;
  return base_radius + static_cast<int>(std::ceil(8.0 * std::abs(t) * spread - 1e-9));
}

double isometry_defect(const FourierElement& f, const QuantumHamiltonian& qh, double t,
                       const SymplecticStructure& J, int steps, int radius, NormOptions norm) {
  const EvolutionResult evolved = heisenberg_evolve(f, qh, t, J, steps, radius);
  const int needed = std::max(evolved.element.radius(), f.radius()) + 1;
  norm.window = std::max({norm.window, needed, default_window(f)});
  const NormEstimate before = op_norm_estimate(f, qh.hbar(), J, norm);
  const NormEstimate after = op_norm_estimate(evolved.element, qh.hbar(), J, norm);
  return std::abs(after.op_lower - before.op_lower);
}

}  // namespace qtorus
