#include <benchmark/benchmark.h>

#include "tdnn/mesh.hpp"
#include "tdnn/problems.hpp"
#include "tdnn/qp.hpp"
#include "tdnn/rt0.hpp"
#include "tdnn/saddle.hpp"
#include "tdnn/vms.hpp"

using namespace tdnn;

static void BM_AssembleVms(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Mesh mesh = generate_structured_triangular(n, DiagonalOrientation::Plus45);
    const ProblemSpec prob = builtin_problem(1);
    for (auto _ : state) {
        SaddleSystem sys = assemble_vms(mesh, prob);
        benchmark::DoNotOptimize(sys.f_p);
    }
    state.SetComplexityN(mesh.elements.size());
}
BENCHMARK(BM_AssembleVms)->Arg(10)->Arg(19)->Arg(37)->Complexity();

static void BM_AssembleRt0(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Mesh mesh = generate_structured_triangular(n, DiagonalOrientation::Minus45);
    const EdgeTopology topo = build_edges(mesh);
    const ProblemSpec prob = builtin_problem(2);
    for (auto _ : state) {
        SaddleSystem sys = assemble_rt0(mesh, topo, prob);
        benchmark::DoNotOptimize(sys.f_p);
    }
    state.SetComplexityN(mesh.elements.size());
}
BENCHMARK(BM_AssembleRt0)->Arg(10)->Arg(19)->Arg(37)->Complexity();

static void BM_SchurReduce(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Mesh mesh = generate_structured_triangular(n, DiagonalOrientation::Plus45);
    const SaddleSystem sys = assemble_vms(mesh, builtin_problem(1));
    for (auto _ : state) {
        QuadraticProgram qp = schur_reduce(sys);
        benchmark::DoNotOptimize(qp.g);
    }
}
BENCHMARK(BM_SchurReduce)->Arg(10)->Arg(19);

static void BM_ActiveSetColdStart(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Mesh mesh = generate_structured_triangular(n, DiagonalOrientation::Minus45);
    const EdgeTopology topo = build_edges(mesh);
    const SaddleSystem sys = assemble_rt0(mesh, topo, builtin_problem(2));
    QuadraticProgram qp = schur_reduce(sys);
    qp.lower.setZero();
    for (auto _ : state) {
        QpSolution sol = active_set_solve(qp);
        benchmark::DoNotOptimize(sol.p);
    }
}
BENCHMARK(BM_ActiveSetColdStart)->Arg(10)->Arg(19)->Unit(benchmark::kMillisecond);

static void BM_ActiveSetWarmStart(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Mesh mesh = generate_structured_triangular(n, DiagonalOrientation::Minus45);
    const EdgeTopology topo = build_edges(mesh);
    const SaddleSystem sys = assemble_rt0(mesh, topo, builtin_problem(2));
    QuadraticProgram qp = schur_reduce(sys);
    qp.lower.setZero();
    const QpSolution ref = active_set_solve(qp);
    for (auto _ : state) {
        QpSolution sol = active_set_solve(qp, ref.active_set);
        benchmark::DoNotOptimize(sol.p);
    }
}
BENCHMARK(BM_ActiveSetWarmStart)->Arg(10)->Arg(19)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
