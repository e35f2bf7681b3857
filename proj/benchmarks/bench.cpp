#include <benchmark/benchmark.h>

#include "biharm/biharmonic.hpp"
#include "biharm/surfaces.hpp"

namespace {

using namespace biharm;

NodalField ones(const TriMesh& mesh)
{
    return NodalField(Vector::Ones(static_cast<Eigen::Index>(mesh.num_vertices())));
}

void BM_AssembleStiffnessAndMass(benchmark::State& state)
{
    const TriMesh mesh = gen_cap_mesh(1.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_stiffness(mesh));
        benchmark::DoNotOptimize(assemble_mass(mesh));
    }
    state.counters["vertices"] = static_cast<double>(mesh.num_vertices());
}
BENCHMARK(BM_AssembleStiffnessAndMass)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ClampedSaddleSolve(benchmark::State& state)
{
    const TriMesh mesh = gen_cap_mesh(1.0, static_cast<int>(state.range(0)));
    const NodalField f = ones(mesh);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_mixed_dirichlet(mesh, f));
    }
    state.counters["vertices"] = static_cast<double>(mesh.num_vertices());
}
BENCHMARK(BM_ClampedSaddleSolve)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_LumpedSchurSolve(benchmark::State& state)
{
    const TriMesh mesh = gen_cap_mesh(1.0, static_cast<int>(state.range(0)));
    const NodalField f = ones(mesh);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_mixed_lumped_schur(mesh, f));
    }
    state.counters["vertices"] = static_cast<double>(mesh.num_vertices());
}
BENCHMARK(BM_LumpedSchurSolve)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ClosedSphereSolve(benchmark::State& state)
{
    const TriMesh mesh = gen_icosphere(static_cast<int>(state.range(0)));
    const NodalField f = interpolate(mesh, [](const Point3& p) { return spherical_harmonic(2, 0, p); });
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_mixed_closed(mesh, f));
    }
    state.counters["vertices"] = static_cast<double>(mesh.num_vertices());
}
BENCHMARK(BM_ClosedSphereSolve)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
