#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles/bessel.hpp"
#include "qtorus/classical_flow.hpp"
#include "qtorus/deformed_product.hpp"
#include "qtorus/error.hpp"
#include "qtorus/lattice_algebra.hpp"

using namespace qtorus;

namespace {

const SymplecticStructure kJ = SymplecticStructure::standard(2);

// 2 cos(2 pi x): the shear flow y -> y - 4 pi t sin(2 pi x)
FourierElement shear() { return parse_element("[[[1,0],1,0],[[-1,0],1,0]]"); }

double wrap(double x) { return x - std::floor(x); }

double circle_gap(double a, double b) {
  const double d = std::abs(wrap(a) - wrap(b));
  return std::min(d, 1.0 - d);
}

}  // namespace

TEST_SUITE("classical_flow") {
  TEST_CASE("Hamiltonian vector field of the shear") {
    const auto phi = hamiltonian_vector_field(shear(), kJ);
    REQUIRE(phi.dim() == 2);
    CHECK(phi[0].empty());
    // Phi_2 = d_1 H = -4 pi sin(2 pi x) = 2 pi i (e_(1,0) - e_(-1,0))
    CHECK(std::abs(phi[1].coeff(mode(1, 0)) - complex(0.0, kTwoPi)) < 1e-12);
    CHECK(std::abs(phi[1].coeff(mode(-1, 0)) - complex(0.0, -kTwoPi)) < 1e-12);
    CHECK(divergence(phi).empty());
    CHECK_THROWS_AS(hamiltonian_vector_field(FourierElement::character(mode(1, 0)), kJ), InvalidArgument);
  }

  TEST_CASE("the induced derivation is the Poisson bracket") {
    const auto H = parse_element("[[[1,0],1,0],[[-1,0],1,0],[[1,2],0.5,0.5],[[-1,-2],0.5,-0.5]]");
    const auto f = parse_element("[[[0,1],1,0],[[2,-1],0,1]]");
    CHECK(l1_distance(delta_phi(f, hamiltonian_vector_field(H, kJ)), poisson_bracket(H, f, kJ)) < 1e-10);
  }

  TEST_CASE("shear flow has a closed form") {
    const auto phi = hamiltonian_vector_field(shear(), kJ);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point> pts(50);
    for (auto& p : pts) p = {u(rng), u(rng), 0.0, 0.0};
    const double t = 0.7;
    const auto r = flow_points(phi, pts, t, 700, true);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double x = pts[i][0], y = pts[i][1];
      CHECK(circle_gap(r.points[i][0], x) < 1e-12);
      CHECK(circle_gap(r.points[i][1], y - 4.0 * kPi * t * std::sin(kTwoPi * x)) < 1e-10);
      const auto& J = r.jacobians[i];
      CHECK(J[0] == doctest::Approx(1.0));
      CHECK(std::abs(J[1]) < 1e-12);
      CHECK(J[kMaxDim + 0] == doctest::Approx(-8.0 * kPi * kPi * t * std::cos(kTwoPi * x)).epsilon(1e-9));
      CHECK(J[kMaxDim + 1] == doctest::Approx(1.0));
      CHECK(determinant(J, 2) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("pullback of the shear matches Bessel coefficients") {
    const auto phi = hamiltonian_vector_field(shear(), kJ);
    const auto f = FourierElement::character(mode(0, 1));
    PullbackOptions o;
    o.radius = 80;
    const auto r = pullback(f, phi, 0.5, o);
    const double z = -8.0 * kPi * kPi * 0.5;
    for (int n = -40; n <= 40; ++n) {
      CHECK(std::abs(r.element.coeff(mode(n, 1)) - oracle::bessel_std(n, z)) < 1e-7);
    }
    for (const auto& fb : oracle::kFrozen) {
      if (fb.z == oracle::kLongArg) CHECK(std::abs(r.element.coeff(mode(fb.n, 1)) - fb.value) < 1e-7);
    }
    CHECK(r.discarded_l1 < 1e-6);
  }

  TEST_CASE("pullback resolution errors") {
    const auto phi = hamiltonian_vector_field(shear(), kJ);
    const auto f = FourierElement::character(mode(0, 1));
    PullbackOptions o;
    o.radius = 8;
    o.grid = 10;
    CHECK_THROWS_AS(pullback(f, phi, 0.1, o), UnderResolvedGrid);
    o.grid = 0;
    CHECK_THROWS_AS(pullback(f, phi, 0.5, o), SpectralUnderresolution);
  }

  TEST_CASE("flow derivative bounds") {
    const auto phi = hamiltonian_vector_field(shear(), kJ);
    CHECK(jacobian_sup_norm(phi) == doctest::Approx(8.0 * kPi * kPi).epsilon(1e-9));
    CHECK(gronwall_bound(phi, 0.1, 1) == doctest::Approx(std::exp(0.8 * kPi * kPi)));
    CHECK(gronwall_bound(phi, 0.0, 1) == doctest::Approx(1.0));
    CHECK(gronwall_bound(phi, 0.0, 2) == 0.0);
    CHECK(gronwall_bound(phi, 0.5, 3) > gronwall_bound(phi, 0.5, 2));
    CHECK_THROWS_AS(gronwall_bound(phi, -1.0, 1), InvalidArgument);
    CHECK_THROWS_AS(gronwall_bound(phi, 1.0, 0), InvalidArgument);
  }

  TEST_CASE("Lipschitz check on nearby pairs") {
    const auto phi = hamiltonian_vector_field(shear(), kJ);
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 1.0), d(-1e-3, 1e-3);
    std::vector<std::pair<Point, Point>> pairs(40);
    for (auto& [a, b] : pairs) {
      a = {u(rng), u(rng), 0.0, 0.0};
      b = {a[0] + d(rng), a[1] + d(rng), 0.0, 0.0};
    }
    const auto rep = lipschitz_check(phi, 0.2, pairs, 200);
    CHECK(rep.pairs == 40);
    CHECK(rep.violations == 0);
    CHECK(rep.max_ratio <= rep.bound);
  }

  TEST_CASE("torus distance and steps") {
    CHECK(torus_distance(Point{0.05, 0.0}, Point{0.95, 0.0}, 2) == doctest::Approx(0.1));
    CHECK(steps_for(1.0, 1e-3) == 1000);
    CHECK(steps_for(0.0, 1e-3) == 1);
    CHECK(steps_for(-0.25, 1e-3) == 250);
  }

  TEST_CASE("flow CSV layout") {
    const auto phi = hamiltonian_vector_field(shear(), kJ);
    const std::vector<Point> pts{{0.1, 0.2, 0.0, 0.0}};
    std::ostringstream a, b;
    write_flow_csv(a, flow_points(phi, pts, 0.1, 10, false));
    write_flow_csv(b, flow_points(phi, pts, 0.1, 10, true));
    CHECK(a.str().rfind("index,x0_1,x0_2,x_1,x_2\n", 0) == 0);
    CHECK(b.str().find("det") != std::string::npos);
  }

  TEST_CASE("vector fields") {
    CHECK_THROWS_AS(VectorField({FourierElement::character(mode(1, 0)), FourierElement(2)}), InvalidArgument);
    const auto c = VectorField::constant(Point{0.5, -0.25, 0.0, 0.0});
    const auto r = flow_points(c, std::vector<Point>{{0.0, 0.0, 0.0, 0.0}}, 1.0, 4);
    CHECK(r.points[0][0] == doctest::Approx(0.5));
    CHECK(r.points[0][1] == doctest::Approx(0.75));
    CHECK(VectorField::zero().radius() == 0);
  }
}
