// Sweep and kernel timings at scenario-a size (1000 offspring of 100 sires, 100 traits).
#include <benchmark/benchmark.h>

#include <memory>

#include "gfactor/chain.hpp"
#include "gfactor/evaluate.hpp"
#include "gfactor/pedigree.hpp"
#include "gfactor/sampler.hpp"
#include "gfactor/simulate.hpp"

using namespace gfactor;

namespace {

struct ScenarioA {
    GroundTruth truth;
    PhenotypeData data;
    std::shared_ptr<const KinshipBasis> basis;

    ScenarioA() {
        RngStream rng(1);
        truth = simulate(build_scenario("a"), rng);
        data = mask_entries(truth, 0.0, rng);
        const Kinship kinship = halfsib_A(truth.spec.n_sires, truth.spec.n_offspring);
        basis = std::make_shared<const KinshipBasis>(kinship, data.level, data.n());
    }
};

const ScenarioA& scenario_a() {
    static const ScenarioA s;
    return s;
}

// A sampler past its first adaptation phase, so k is near its working size.
GibbsSampler warm_sampler() {
    const auto& a = scenario_a();
    Hyperparameters hyper;
    GibbsSampler s(a.data, a.basis, hyper, RngStream(2));
    s.initialize();
    for (long t = 0; t < 200; ++t) {
        s.sweep();
        s.adapt_truncation(t);
    }
    return s;
}

void BM_Sweep(benchmark::State& state) {
    GibbsSampler s = warm_sampler();
    for (auto _ : state) s.sweep();
    state.counters["k"] = static_cast<double>(s.state().k_star());
}
BENCHMARK(BM_Sweep)->Unit(benchmark::kMillisecond);

template <void (GibbsSampler::*Step)()>
void BM_Step(benchmark::State& state) {
    GibbsSampler s = warm_sampler();
    for (auto _ : state) (s.*Step)();
}
BENCHMARK(BM_Step<&GibbsSampler::step_joint_regression>)->Name("BM_JointRegression")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Step<&GibbsSampler::step_factor_scores>)->Name("BM_FactorScores")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Step<&GibbsSampler::step_heritabilities>)->Name("BM_Heritabilities")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Step<&GibbsSampler::step_genetic_factor_effects>)->Name("BM_GeneticFactors")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Step<&GibbsSampler::step_idiosyncratic_genetic>)->Name("BM_IdiosyncraticGenetic")->Unit(benchmark::kMillisecond);

void BM_KinshipBasis(benchmark::State& state) {
    const auto& a = scenario_a();
    const Kinship kinship = halfsib_A(a.truth.spec.n_sires, a.truth.spec.n_offspring);
    for (auto _ : state) benchmark::DoNotOptimize(KinshipBasis(kinship, a.data.level, a.data.n()));
}
BENCHMARK(BM_KinshipBasis)->Unit(benchmark::kMillisecond);

void BM_TabularA(benchmark::State& state) {
    const Pedigree ped = halfsib_pedigree(100, state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(additive_relationship(ped));
}
BENCHMARK(BM_TabularA)->Arg(2)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_Krzanowski(benchmark::State& state) {
    const auto& a = scenario_a();
    const SymmetricMatrix est = moments_G(a.truth.Y, a.truth.sire);
    for (auto _ : state) benchmark::DoNotOptimize(krzanowski(est, a.truth.G, 10));
}
BENCHMARK(BM_Krzanowski)->Unit(benchmark::kMillisecond);

void BM_RecordDraw(benchmark::State& state) {
    GibbsSampler s = warm_sampler();
    PosteriorSamples samples;
    long t = 0;
    for (auto _ : state) samples.record(s.state(), t++);
}
BENCHMARK(BM_RecordDraw)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
