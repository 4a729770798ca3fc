#include <doctest.h>

#include <cmath>
#include <random>

#include "qtorus/error.hpp"
#include "qtorus/lattice_algebra.hpp"

using namespace qtorus;

namespace {

FourierElement random_element(std::mt19937_64& rng, int radius, int terms) {
  std::uniform_int_distribution<int> u(-radius, radius);
  std::normal_distribution<double> n;
  std::vector<FourierElement::Term> t;
  for (int i = 0; i < terms; ++i) t.push_back({mode(u(rng), u(rng)), complex(n(rng), n(rng))});
  return FourierElement::from_terms(2, std::move(t));
}

}  // namespace

TEST_SUITE("lattice_algebra") {
  TEST_CASE("linear structure") {
    const auto f = parse_element("[[[1,0],1,0],[[0,1],2,0]]");
    const auto g = parse_element("[[[1,0],-1,0],[[2,2],0,1]]");
    const auto s = add(f, g);
    CHECK(s.size() == 2);
    CHECK(s.coeff(mode(1, 0)) == complex(0.0));
    CHECK(subtract(f, f).empty());
    CHECK(scale(f, complex(0.0, 2.0)).coeff(mode(0, 1)) == complex(0.0, 4.0));
    CHECK(scale(f, 0.0).empty());
  }

  TEST_CASE("involution conjugates and reflects") {
    const auto f = parse_element("[[[1,2],1,3]]");
    const auto s = involution(f);
    CHECK(s.coeff(mode(-1, -2)) == complex(1.0, -3.0));
    CHECK(involution(s) == f);
  }

  TEST_CASE("pointwise product against a brute-force double sum") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
      const auto f = random_element(rng, 3, 5), g = random_element(rng, 3, 5);
      const auto h = pointwise_mul(f, g);
      for (int a = -6; a <= 6; ++a) {
        for (int b = -6; b <= 6; ++b) {
          complex expect = 0.0;
          for (const auto& x : f.terms()) {
            for (const auto& y : g.terms()) {
              if (x.mode + y.mode == mode(a, b)) expect += x.coeff * y.coeff;
            }
          }
          CHECK(std::abs(h.coeff(mode(a, b)) - expect) < 1e-12);
        }
      }
    }
  }

  TEST_CASE("pointwise product beyond the cap overflows") {
    const auto f = parse_element("[[[5,0],1,0]]");
    CHECK_THROWS_AS(pointwise_mul(f, f, 8), TruncationOverflow);
    CHECK_NOTHROW(pointwise_mul(f, f, 10));
  }

  TEST_CASE("partial derivative multiplies by 2 pi i p_j") {
    const auto f = parse_element("[[[3,-2],1,0]]");
    CHECK(std::abs(partial_derivative(f, 0).coeff(mode(3, -2)) - complex(0.0, kTwoPi * 3)) < 1e-12);
    CHECK(std::abs(partial_derivative(f, 1).coeff(mode(3, -2)) - complex(0.0, -kTwoPi * 2)) < 1e-12);
    CHECK_THROWS_AS(partial_derivative(f, 2), AxisOutOfRange);
    CHECK_THROWS_AS(partial_derivative(f, -1), AxisOutOfRange);
  }

  TEST_CASE("truncate reports discarded mass") {
    const auto f = parse_element("[[[0,0],1,0],[[3,0],0,2],[[0,-5],3,4]]");
    double dropped = 0.0;
    const auto t = truncate(f, 3, &dropped);
    CHECK(t.size() == 2);
    CHECK(dropped == doctest::Approx(5.0));
  }

  TEST_CASE("evaluation, norms and reality") {
    const auto c = parse_element("[[[1,0],0.5,0],[[-1,0],0.5,0]]");  // cos 2 pi x
    CHECK(eval_at(c, Point{0.0, 0.3}).real() == doctest::Approx(1.0));
    CHECK(eval_at(c, Point{0.5, 0.0}).real() == doctest::Approx(-1.0));
    const std::vector<Point> pts{{0.25, 0.0}, {0.125, 0.7}};
    const auto v = eval_at(c, pts);
    CHECK(std::abs(v[0]) < 1e-15);
    CHECK(v[1].real() == doctest::Approx(std::cos(kPi / 4)));
    CHECK(is_real(c));
    CHECK_FALSE(is_real(parse_element("[[[1,0],1,0]]")));
    const auto f = parse_element("[[[1,0],3,4],[[2,0],0,1]]");
    CHECK(l1_norm(f) == doctest::Approx(6.0));
    CHECK(l2_norm(f) == doctest::Approx(std::sqrt(26.0)));
  }

  TEST_CASE("seminorms of characters") {
    const auto e = parse_element("[[[3,4],1,0]]");
    const int grid = default_seminorm_grid(e.radius());
    CHECK(seminorm(e, 0, grid).grid_sup.value == doctest::Approx(1.0));
    // |(2 pi i)^k (p.X)^k| over unit X peaks at (2 pi |p|)^k
    CHECK(seminorm(e, 1, grid).grid_sup.value == doctest::Approx(kTwoPi * 5.0));
    // order >= 2 samples 64 k directions on the half circle
    CHECK(seminorm(e, 2, grid).grid_sup.value == doctest::Approx(std::pow(kTwoPi * 5.0, 2)).epsilon(1e-4));
    CHECK(seminorm(e, 2, grid).grid_sup.value <= std::pow(kTwoPi * 5.0, 2));
    CHECK(seminorm(e, 2, grid).l1_majorant.value == doctest::Approx(std::pow(kTwoPi * 5.0, 2)));
  }

  TEST_CASE("grid-sup is dominated by the l1 majorant") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 10; ++rep) {
      const auto f = random_element(rng, 4, 6);
      for (int k = 0; k <= 3; ++k) {
        const auto s = seminorm(f, k, default_seminorm_grid(f.radius()));
        CHECK(s.grid_sup.value <= s.l1_majorant.value * (1.0 + 1e-12));
        CHECK(s.grid_sup.method == SeminormMethod::grid_sup);
        CHECK(s.l1_majorant.method == SeminormMethod::l1_majorant);
      }
    }
  }

  TEST_CASE("seminorm grid resolution") {
    const auto f = parse_element("[[[10,0],1,0]]");
    CHECK_THROWS_AS(seminorm(f, 0, 20), UnderResolvedGrid);
    CHECK(default_seminorm_grid(4) == 64);
    CHECK(default_seminorm_grid(20) == 164);
  }
}
