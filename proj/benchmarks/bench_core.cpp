#include <benchmark/benchmark.h>

#include "distbh/codec.hpp"
#include "distbh/datagen.hpp"
#include "distbh/estimators.hpp"
#include "distbh/protocol.hpp"
#include "distbh/testing.hpp"

namespace {

using namespace distbh;

std::vector<double> random_pvalues(std::size_t m) {
    RngStream stream(99);
    NodeGenSpec spec;
    spec.m = m;
    spec.m1 = m / 5;
    spec.alt = AlternativeModel{3.0, 0.5, true};
    return gen_node_batch(spec, stream).pvalues;
}

void BM_NormalGen(benchmark::State& state) {
    RngStream stream(7);
    for (auto _ : state) {
        double acc = 0.0;
        for (int i = 0; i < state.range(0); ++i) acc += stream.normal();
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NormalGen)->Arg(1 << 16);

void BM_BhProcedure(benchmark::State& state) {
    const auto pvalues = random_pvalues(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto result = bh_procedure(pvalues, 0.2);
        benchmark::DoNotOptimize(result.k_hat);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BhProcedure)->Range(1 << 10, 1 << 20);

void BM_StoreyEstimate(benchmark::State& state) {
    const auto pvalues = random_pvalues(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(storey_estimate(pvalues, StoreyConfig{0.5}));
    }
}
BENCHMARK(BM_StoreyEstimate)->Arg(1 << 17);

void BM_SpacingEstimate(benchmark::State& state) {
    const auto pvalues = random_pvalues(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(spacing_estimate(pvalues, SpacingConfig{0.5}));
    }
}
BENCHMARK(BM_SpacingEstimate)->Arg(1 << 17);

void BM_ProtocolRound(benchmark::State& state) {
    const std::uint32_t n_nodes = 50;
    const auto per_node = static_cast<std::uint64_t>(state.range(0)) / n_nodes;
    SeedPolicy seeds{3};
    NodeGenSpec spec;
    spec.m = per_node;
    spec.m1 = per_node / 5;
    spec.alt = AlternativeModel{3.0, 0.5, true};

    std::vector<NodeState> nodes(n_nodes);
    for (std::uint32_t i = 0; i < n_nodes; ++i) {
        nodes[i].node_id = i + 1;
        auto stream = seeds.stream(0, i + 1);
        nodes[i].batch = gen_node_batch(spec, stream);
    }
    for (auto _ : state) {
        InProcessTransport transport;
        auto results = run_round(nodes, 0.2, transport);
        benchmark::DoNotOptimize(results.size());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProtocolRound)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

void BM_CodecRoundTrip(benchmark::State& state) {
    const NodeReport report{42, 123456, 0.625};
    for (auto _ : state) {
        auto decoded = decode_report(encode_report(report));
        benchmark::DoNotOptimize(decoded.null_prop);
    }
}
BENCHMARK(BM_CodecRoundTrip);

}  // namespace

BENCHMARK_MAIN();
