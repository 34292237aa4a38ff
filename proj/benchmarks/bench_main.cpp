#include "dohertycad/eval/eval.hpp"
#include "dohertycad/netkit/solver.hpp"
#include "dohertycad/netkit/touchstone.hpp"
#include "dohertycad/synth/synth.hpp"

#include <benchmark/benchmark.h>

using namespace doherty;

namespace {

const ideal::DohertyConfig kCfg{};

net::Netlist transformer_net() {
    return synth::to_netlist(synth::synth_transformer_combiner(kCfg), kCfg, {20.0, 20.0});
}

void BM_SolveTransformer(benchmark::State& state) {
    const auto n = transformer_net();
    const auto drive = net::excitation(n, {{"main", 1.0}, {"aux", net::Complex{0.0, -1.0}}});
    for (auto _ : state) benchmark::DoNotOptimize(net::solve(n, kCfg.f0, drive));
}
BENCHMARK(BM_SolveTransformer);

void BM_SParameterSweep(benchmark::State& state) {
    const auto n = transformer_net();
    const auto grid = net::linear_grid(0.6 * kCfg.f0, 1.4 * kCfg.f0, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(net::s_parameters(n, {"main", "aux", "load"}, grid));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SParameterSweep)->Arg(51)->Arg(201);

void BM_LoadModulation(benchmark::State& state) {
    const auto n = transformer_net();
    const auto profile = eval::make_drive_profile(kCfg, eval::required_phase_offset(n, kCfg),
                                                  static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(eval::load_modulation(n, kCfg, profile));
}
BENCHMARK(BM_LoadModulation)->Arg(51)->Arg(201);

void BM_BandwidthReport(benchmark::State& state) {
    const auto n = transformer_net();
    for (auto _ : state)
        benchmark::DoNotOptimize(eval::bandwidth_report(n, kCfg, eval::BandwidthMetric::passive_efficiency));
}
BENCHMARK(BM_BandwidthReport);

}  // namespace

BENCHMARK_MAIN();
