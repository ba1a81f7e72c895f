// Serial reference vs OpenMP: scan kernels, whole solves and the campaign loop.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <array>
#include <map>

#include "dreg/campaign.hpp"
#include "dreg/daniel.hpp"
#include "dreg/kernels.hpp"
#include "dreg/synthetic.hpp"

namespace {

using dreg::kernels::Exec;

const dreg::SyntheticProblem& problem(std::size_t n) {
    static std::map<std::size_t, dreg::SyntheticProblem> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        dreg::SyntheticSpec spec;
        spec.n = n;
        spec.outlier_ratio = 0.9;
        spec.seed = 7;
        it = cache.emplace(n, dreg::generate_problem(spec)).first;
    }
    return it->second;
}

Exec exec_of(const benchmark::State& state) { return state.range(1) == 0 ? Exec::Serial : Exec::OpenMP; }

void label(benchmark::State& state) {
    state.SetLabel(state.range(1) == 0 ? "serial" : "openmp");
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Consensus(benchmark::State& state) {
    const auto& p = problem(static_cast<std::size_t>(state.range(0)));
    const Exec e = exec_of(state);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dreg::kernels::consensus(e, p.correspondences, p.truth.transform, 0.05));
    }
    label(state);
}

void BM_ConsensusCount(benchmark::State& state) {
    const auto& p = problem(static_cast<std::size_t>(state.range(0)));
    const Exec e = exec_of(state);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dreg::kernels::consensus_count(e, p.correspondences, p.truth.transform, 0.05));
    }
    label(state);
}

void BM_RigidityCandidates(benchmark::State& state) {
    const auto& p = problem(static_cast<std::size_t>(state.range(0)));
    const Exec e = exec_of(state);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dreg::kernels::rigidity_candidates(e, p.correspondences, 0, 0.06));
    }
    label(state);
}

void BM_SolveDaniel(benchmark::State& state) {
    const auto& p = problem(static_cast<std::size_t>(state.range(0)));
    dreg::DanielOptions options;
    options.noise = dreg::NoiseModel::from_sigma(0.01);
    options.exec = exec_of(state);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dreg::solve_daniel(p.correspondences, options, 3));
    }
    state.SetLabel(state.range(1) == 0 ? "serial" : "openmp");
}

void BM_Campaign(benchmark::State& state) {
    const std::array<double, 2> ratios{0.5, 0.9};
    const std::array<dreg::SolverKind, 1> solvers{dreg::SolverKind::Daniel};
    dreg::CampaignConfig cfg;
    cfg.n = 500;
    cfg.threads = state.range(0) == 0 ? 1 : 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dreg::run_campaign(ratios, 4, solvers, 1, cfg));
    }
    state.SetLabel(state.range(0) == 0 ? "serial" : "openmp");
}

}  // namespace

BENCHMARK(BM_Consensus)->ArgsProduct({{1000, 100000, 1000000}, {0, 1}});
BENCHMARK(BM_ConsensusCount)->ArgsProduct({{1000, 100000, 1000000}, {0, 1}});
BENCHMARK(BM_RigidityCandidates)->ArgsProduct({{1000, 100000, 1000000}, {0, 1}});
BENCHMARK(BM_SolveDaniel)->ArgsProduct({{1000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Campaign)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
