#include <benchmark/benchmark.h>

#include "gstruct/calculus.hpp"
#include "gstruct/compat.hpp"
#include "gstruct/limits.hpp"
#include "gstruct/linstruct.hpp"
#include "gstruct/numkernel.hpp"

using namespace gstruct;

namespace {

Matrix spd(Index n) {
  const Matrix a = Matrix::Random(n, n);
  return a * a.transpose() + static_cast<double>(n) * Matrix::Identity(n, n);
}

Matrix skew(Index n) {
  Matrix s = Matrix::Zero(n, n);
  for (Index k = 0; k < n / 2; ++k) {
    s(2 * k, 2 * k + 1) = 1.0 + 0.1 * static_cast<double>(k);
    s(2 * k + 1, 2 * k) = -s(2 * k, 2 * k + 1);
  }
  const Matrix p = Matrix::Identity(n, n) + 0.2 * Matrix::Random(n, n);
  return p.transpose() * s * p;
}

void BM_SpdSqrt(benchmark::State& state) {
  const Matrix m = spd(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(spd_sqrt(m));
}
BENCHMARK(BM_SpdSqrt)->RangeMultiplier(2)->Range(4, 64);

void BM_StructureFrom(benchmark::State& state) {
  const Matrix g = spd(state.range(0));
  const Matrix s = skew(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(structure_from(g, s, Flavor::Kahler));
}
BENCHMARK(BM_StructureFrom)->RangeMultiplier(2)->Range(4, 64);

void BM_Darboux(benchmark::State& state) {
  const Matrix s = skew(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(darboux_basis(s));
}
BENCHMARK(BM_Darboux)->RangeMultiplier(2)->Range(4, 64);

void BM_SphereCurvature(benchmark::State& state) {
  const TensorFieldOnChart g = sphere_stereographic(state.range(0));
  const ConnectionData c = levi_civita(g);
  const Vector x = Vector::Constant(state.range(0), 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(curvature(c, x));
}
BENCHMARK(BM_SphereCurvature)->DenseRange(2, 6, 2);

void BM_CheckCoherent(benchmark::State& state) {
  std::vector<Index> dims;
  for (Index k = 1; k <= state.range(0); ++k) dims.push_back(2 * k);
  const BondingSystem b = BondingSystem::padded(dims, Variance::Direct);
  CoherentSequence seq{b, TensorKind::Form, {}};
  const Matrix top = spd(dims.back());
  for (Index d : dims) seq.levels.push_back(top.topLeftCorner(d, d));
  for (auto _ : state) benchmark::DoNotOptimize(check_coherent(seq));
}
BENCHMARK(BM_CheckCoherent)->RangeMultiplier(2)->Range(2, 16);

}  // namespace
BENCHMARK_MAIN();
