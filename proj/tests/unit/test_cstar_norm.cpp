#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles/clock_shift.hpp"
#include "qtorus/cstar_norm.hpp"
#include "qtorus/deformed_product.hpp"
#include "qtorus/error.hpp"
#include "qtorus/lattice_algebra.hpp"

using namespace qtorus;

namespace {

const SymplecticStructure kJ = SymplecticStructure::standard(2);

FourierElement random_element(std::mt19937_64& rng, int radius, int terms) {
  std::uniform_int_distribution<int> u(-radius, radius);
  std::normal_distribution<double> n;
  std::vector<FourierElement::Term> t;
  for (int i = 0; i < terms; ++i) t.push_back({mode(u(rng), u(rng)), complex(n(rng), n(rng))});
  return FourierElement::from_terms(2, std::move(t));
}

std::vector<std::pair<std::pair<int, int>, oracle::cplx>> as_terms(const FourierElement& f) {
  std::vector<std::pair<std::pair<int, int>, oracle::cplx>> t;
  for (const auto& x : f.terms()) t.push_back({{x.mode[0], x.mode[1]}, x.coeff});
  return t;
}

NormOptions window(int w, NormMethod m = NormMethod::lanczos) {
  NormOptions o;
  o.window = w;
  o.method = m;
  return o;
}

}  // namespace

TEST_SUITE("cstar_norm") {
  TEST_CASE("characters are unitaries") {
    for (double h : {0.0, 0.1, 0.5, -0.3}) {
      const auto e = FourierElement::character(mode(2, -1), 2, complex(0.0, 3.0));
      const auto est = op_norm_estimate(e, PlanckParam(h), kJ, window(8));
      CHECK(est.lower_l2 == doctest::Approx(3.0));
      CHECK(est.upper_l1 == doctest::Approx(3.0));
      CHECK(est.op_lower == doctest::Approx(3.0).epsilon(1e-10));
      CHECK(est.converged);
    }
  }

  TEST_CASE("zero element") {
    const auto est = op_norm_estimate(FourierElement(2), PlanckParam(0.1), kJ, window(4));
    CHECK(est.op_lower == 0.0);
    CHECK(est.upper_l1 == 0.0);
  }

  TEST_CASE("hbar = 0 cosine sum approaches its sup norm from below") {
    const auto f = parse_element("[[[1,0],1,0],[[-1,0],1,0],[[0,1],1,0],[[0,-1],1,0]]");
    double prev = 0.0;
    for (int w : {2, 4, 8, 16, 32}) {
      const auto est = op_norm_estimate(f, PlanckParam(0.0), kJ, window(w));
      CHECK(est.op_lower <= 4.0 + 1e-10);
      CHECK(est.op_lower >= prev - 1e-10);
      prev = est.op_lower;
    }
    // square-lattice Laplacian on a (2W+1)^2 box: 4 cos(pi / (2W+2))
    CHECK(prev == doctest::Approx(4.0 * std::cos(kPi / 66.0)).epsilon(1e-8));
  }

  TEST_CASE("agreement with the clock-and-shift norm at rational hbar") {
    const auto g = parse_element("[[[1,0],1,0],[[0,1],0,1],[[1,1],0.5,0]]");
    for (auto [num, den] : {std::pair{1, 10}, std::pair{1, 3}, std::pair{1, 2}}) {
      const double h = static_cast<double>(num) / den;
      const double ref = oracle::clock_shift_norm(as_terms(g), num, den, 24);
      const auto est = op_norm_estimate(g, PlanckParam(h), kJ, window(32));
      CHECK(est.op_lower <= est.upper_l1 + 1e-10);
      CHECK(std::abs(est.op_lower - ref) <= 2e-3 * ref);
    }
  }

  TEST_CASE("involution is isometric and the C* identity holds") {
    std::mt19937_64 rng(31);
    const auto f = random_element(rng, 2, 5);
    const PlanckParam h(0.17);
    const double nf = op_norm_estimate(f, h, kJ, window(32)).op_lower;
    const double ns = op_norm_estimate(involution(f), h, kJ, window(32)).op_lower;
    const double nss = op_norm_estimate(deformed_mul(involution(f), f, h, kJ), h, kJ, window(32)).op_lower;
    CHECK(std::abs(nf - ns) <= 2e-3 * nf);
    CHECK(std::abs(nss - nf * nf) <= 4e-3 * nf * nf);
  }

  TEST_CASE("power iteration and Lanczos agree") {
    std::mt19937_64 rng(33);
    for (int rep = 0; rep < 3; ++rep) {
      const auto f = random_element(rng, 3, 6);
      const auto a = op_norm_estimate(f, PlanckParam(0.23), kJ, window(10, NormMethod::lanczos));
      const auto b = op_norm_estimate(f, PlanckParam(0.23), kJ, window(10, NormMethod::power));
      // power iteration stalls on clustered singular values, so it only trails
      CHECK(a.converged);
      CHECK(b.op_lower <= a.op_lower * (1.0 + 1e-9));
      CHECK(b.op_lower >= a.op_lower * (1.0 - 1e-3));
    }
  }

  TEST_CASE("serial and parallel window kernels give the same estimate") {
    std::mt19937_64 rng(35);
    const auto f = random_element(rng, 3, 8);
    auto o = window(12);
    const auto a = op_norm_estimate(f, PlanckParam(0.31), kJ, o);
    o.parallel = false;
    const auto b = op_norm_estimate(f, PlanckParam(0.31), kJ, o);
    CHECK(a.op_lower == doctest::Approx(b.op_lower).epsilon(1e-12));
  }

  TEST_CASE("window smaller than the support is rejected") {
    const auto f = FourierElement::character(mode(5, 0));
    CHECK_THROWS_AS(op_norm_estimate(f, PlanckParam(0.1), kJ, window(4)), InvalidArgument);
    CHECK(default_window(f) == 32);
    CHECK(default_window(FourierElement::character(mode(10, 0))) == 40);
  }

  TEST_CASE("json and method names") {
    const auto j = to_json(op_norm_estimate(FourierElement::unit(2), PlanckParam(0.1), kJ, window(2)));
    for (const char* key : {"lower_l2", "upper_l1", "op_lower", "window", "iterations", "residual", "converged"}) {
      CHECK(j.contains(key));
    }
    CHECK(parse_norm_method("power") == NormMethod::power);
    CHECK(parse_norm_method(to_string(NormMethod::lanczos)) == NormMethod::lanczos);
    CHECK_THROWS_AS(parse_norm_method("svd"), InvalidArgument);
  }
}
