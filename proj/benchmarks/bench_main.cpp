#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "rdmg/assembly.hpp"
#include "rdmg/krylov.hpp"
#include "rdmg/multilevel.hpp"
#include "rdmg/sweep.hpp"

using namespace rdmg;

namespace
{

struct Problem
{
  MeshHierarchy h;
  TransferOps t;
  LevelStack s;
  Vector rhs;

  explicit Problem(int level)
      : h(build_problem_hierarchy({Geometry::cube, 0, 1}, level)), t(build_transfers(h)),
        s(build_level_stack(h, t, CoefficientField::omega({1.0, 1.0}), CoefficientField::rho({1.0, 1.0}))),
        rhs(assemble_load(h.finest(), 1.0))
  {
  }
};

const Problem &problem(int level)
{
  static std::vector<std::unique_ptr<Problem>> cache(6);
  auto &p = cache[static_cast<std::size_t>(level)];
  if (!p)
    p = std::make_unique<Problem>(level);
  return *p;
}

void set_size(benchmark::State &state, std::size_t n)
{
  state.counters["N"] = static_cast<double>(n);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void BM_Assembly(benchmark::State &state)
{
  const Mesh &m = problem(static_cast<int>(state.range(0))).h.finest();
  const auto w = CoefficientField::omega({1.0, 1e-4});
  const auto r = CoefficientField::rho({1.0, 1.0});
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble_operator(m, w, r));
  set_size(state, m.num_free());
}

void BM_SpMV(benchmark::State &state)
{
  const Problem &p = problem(static_cast<int>(state.range(0)));
  Vector y(p.rhs.size());
  for (auto _ : state)
  {
    p.s.finest().multiply(p.rhs, y);
    benchmark::DoNotOptimize(y.data());
  }
  set_size(state, y.size());
}

void BM_SymmetricGaussSeidel(benchmark::State &state)
{
  const Problem &p = problem(static_cast<int>(state.range(0)));
  const auto b = make_preconditioner(PreconditionerKind::sgs, p.s, p.t);
  Vector z(p.rhs.size());
  for (auto _ : state)
  {
    b->apply(p.rhs, z);
    benchmark::DoNotOptimize(z.data());
  }
  set_size(state, z.size());
}

void BM_Bpx(benchmark::State &state)
{
  const Problem &p = problem(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(bpx_apply(p.s, p.t, p.rhs));
  set_size(state, p.rhs.size());
}

void BM_VCycle(benchmark::State &state)
{
  const Problem &p = problem(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(mg_vcycle_apply(p.s, p.t, p.rhs));
  set_size(state, p.rhs.size());
}

void BM_PcgMultigrid(benchmark::State &state)
{
  const Problem &p = problem(static_cast<int>(state.range(0)));
  const auto b = make_preconditioner(PreconditionerKind::mg, p.s, p.t);
  int its = 0;
  for (auto _ : state)
    its = pcg(p.s.finest(), *b, p.rhs).iterations;
  state.counters["iterations"] = its;
  set_size(state, p.rhs.size());
}

} // namespace

BENCHMARK(BM_Assembly)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpMV)->DenseRange(1, 3)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SymmetricGaussSeidel)->DenseRange(1, 3)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Bpx)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VCycle)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PcgMultigrid)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
