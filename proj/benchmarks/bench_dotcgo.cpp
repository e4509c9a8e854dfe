#include <benchmark/benchmark.h>

#include <random>

#include "dotcgo/cgo.hpp"
#include "dotcgo/config.hpp"
#include "dotcgo/experiment.hpp"
#include "dotcgo/forward.hpp"
#include "dotcgo/liouville.hpp"

using namespace dotcgo;

namespace {

Grid grid_for(int N) {
    // reference box, Omega a fixed share of it
    return make_grid(3, N, 0.5, 0.1875, 0.41);
}

ComplexField noise(const Grid& g) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    ComplexField f(g);
    for (auto& x : f.v) x = cplx(nd(rng), nd(rng));
    return f;
}

CVec zeta(double tau) {
    const RVec eta{0, 0, 1};
    return make_zeta_pair(3, 0.0, eta, tau, axis_frame(eta)).zeta1;
}

void BM_FftRoundTrip(benchmark::State& st) {
    const Grid g = grid_for(static_cast<int>(st.range(0)));
    const ComplexField f = noise(g);
    for (auto _ : st) benchmark::DoNotOptimize(ifft(fft(f)));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_FftRoundTrip)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_InvDeltaZeta(benchmark::State& st) {
    const Grid g = grid_for(static_cast<int>(st.range(0)));
    const ComplexField f = noise(g);
    const BourgainWeight w = cgo_weight(zeta(4.0), g);
    for (auto _ : st) benchmark::DoNotOptimize(inv_delta_zeta(f, w));
}
BENCHMARK(BM_InvDeltaZeta)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_SolveRemainder(benchmark::State& st) {
    const RunConfig c = default_config();
    const Grid g = config_grid(c);
    const double k = static_cast<double>(st.range(0));
    const RealField Q = liouville_Q(make_phantom(g, c.phantom2, k, c.M));
    const CVec z = zeta(4.0 * min_tau_for_k(k, c.C_star));
    for (auto _ : st) benchmark::DoNotOptimize(solve_remainder(Q, z));
}
BENCHMARK(BM_SolveRemainder)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_AssembleDtn(benchmark::State& st) {
    const Grid g = grid_for(static_cast<int>(st.range(0)));
    const RunConfig c = default_config();
    const CoefficientSet cs = make_phantom(g, Phantom{}, 1.0, c.M);
    const BoundaryBasis b = build_boundary_basis(g);
    for (auto _ : st) benchmark::DoNotOptimize(assemble_dtn(cs, b, b.size()));
}
BENCHMARK(BM_AssembleDtn)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_BoundaryBasis(benchmark::State& st) {
    const Grid g = grid_for(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(build_boundary_basis(g));
}
BENCHMARK(BM_BoundaryBasis)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
