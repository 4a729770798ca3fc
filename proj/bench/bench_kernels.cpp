// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "qtorus/classical_flow.hpp"
#include "qtorus/cstar_norm.hpp"
#include "qtorus/deformed_product.hpp"
#include "qtorus/kernels.hpp"
#include "qtorus/lattice_algebra.hpp"

namespace {

using namespace qtorus;
namespace k = qtorus::kernels;

FourierElement dense_element(int radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  std::vector<FourierElement::Term> t;
  for (int a = -radius; a <= radius; ++a) {
    for (int b = -radius; b <= radius; ++b) t.push_back({mode(a, b), complex(n(rng), n(rng))});
  }
  return FourierElement::from_terms(2, std::move(t));
}

const k::Twist& twist() {
  static const k::Twist tw = make_twist(PlanckParam(0.1), SymplecticStructure::standard(2));
  return tw;
}

template <bool Parallel>
void BM_TwistedConvolution(benchmark::State& state) {
  const int r = static_cast<int>(state.range(0));
  const auto f = dense_element(r, 1), g = dense_element(r, 2);
  for (auto _ : state) {
    auto res = Parallel ? k::parallel::twisted_convolution(f, g, twist(), 2 * r)
                        : k::serial::twisted_convolution(f, g, twist(), 2 * r);
    benchmark::DoNotOptimize(res);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size() * g.size()));
}

template <class Op>
void window_apply(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  const auto f = dense_element(8, 3);
  const Op op(f, twist(), w);
  std::vector<complex> x(op.size(), complex(1.0, 0.5)), y(op.size());
  for (auto _ : state) {
    op.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(op.size() * f.size()));
}

void BM_WindowApplySerial(benchmark::State& state) { window_apply<k::serial::WindowOperator>(state); }
void BM_WindowApplyParallel(benchmark::State& state) { window_apply<k::parallel::WindowOperator>(state); }

template <bool Parallel>
void BM_FlowBatch(benchmark::State& state) {
  const auto H = parse_element("[[[1,0],0.5,0],[[-1,0],0.5,0],[[0,1],0.5,0],[[0,-1],0.5,0]]");
  const auto phi = hamiltonian_vector_field(H, SymplecticStructure::standard(2));
  const k::FieldEvaluator field(phi.components());
  const int side = static_cast<int>(state.range(0));
  std::vector<Point> start;
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) start.push_back({double(i) / side, double(j) / side, 0.0, 0.0});
  }
  for (auto _ : state) {
    auto pts = start;
    if (Parallel) {
      k::parallel::flow_batch(field, pts, {}, 0.1, 100);
    } else {
      k::serial::flow_batch(field, pts, {}, 0.1, 100);
    }
    benchmark::DoNotOptimize(pts.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(start.size()) * 100);
}

template <bool Parallel>
void BM_NormEstimate(benchmark::State& state) {
  const auto f = dense_element(4, 4);
  NormOptions o;
  o.window = static_cast<int>(state.range(0));
  o.parallel = Parallel;
  for (auto _ : state) {
    auto e = op_norm_estimate(f, PlanckParam(0.1), SymplecticStructure::standard(2), o);
    benchmark::DoNotOptimize(e);
  }
}

}  // namespace

BENCHMARK(BM_TwistedConvolution<false>)->Name("convolution/serial")->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(BM_TwistedConvolution<true>)->Name("convolution/parallel")->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(BM_WindowApplySerial)->Name("window_apply/serial")->Arg(32)->Arg(64);
BENCHMARK(BM_WindowApplyParallel)->Name("window_apply/parallel")->Arg(32)->Arg(64);
BENCHMARK(BM_FlowBatch<false>)->Name("flow_batch/serial")->Arg(64)->Arg(128);
BENCHMARK(BM_FlowBatch<true>)->Name("flow_batch/parallel")->Arg(64)->Arg(128);
BENCHMARK(BM_NormEstimate<false>)->Name("norm_estimate/serial")->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NormEstimate<true>)->Name("norm_estimate/parallel")->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
