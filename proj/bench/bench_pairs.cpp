// Serial reference vs OpenMP kernels: batched pair matching and descriptor extraction.

#include <benchmark/benchmark.h>

#include <random>

#include "greid/descriptors.hpp"
#include "greid/feature_file.hpp"
#include "greid/harness/synth.hpp"
#include "greid/pair_scoring.hpp"

using namespace greid;

namespace {

struct PairFixture {
    harness::SynthData data;
    std::vector<FeatureBundle> bundles;
    std::vector<ImportanceMap> weights;
    std::vector<PairTask> tasks;

    explicit PairFixture(int n_groups) {
        harness::SynthConfig sc;
        sc.n_groups = n_groups;
        sc.feature_noise = 0.2;
        sc.layout_jitter = 0.1;
        sc.seed = 5;
        data = harness::synthesize(sc);
        const auto& ds = data.dataset;
        bundles = load_external_features(data.features, ds.images);
        for (const auto& obs : ds.images) weights.push_back(initial_weights(obs));
        std::vector<int> a, b;
        for (std::size_t i = 0; i < ds.images.size(); ++i)
            (ds.images[i].camera_id == ds.cameras[0] ? a : b).push_back(static_cast<int>(i));
        for (int p : a)
            for (int g : b) tasks.push_back({p, g});
    }
    GroupCollection collection() const { return {data.dataset.images, bundles, weights}; }
};

const PairFixture& pair_fixture(int n_groups) {
    static const PairFixture small(10), large(30);
    return n_groups <= 10 ? small : large;
}

template <bool Parallel>
void BM_match_pairs(benchmark::State& state) {
    const PairFixture& f = pair_fixture(static_cast<int>(state.range(0)));
    const GroupCollection groups = f.collection();
    const MatchConfig cfg;
    for (auto _ : state) {
        auto r = Parallel ? match_pairs(groups, f.tasks, cfg) : match_pairs_serial(groups, f.tasks, cfg);
        benchmark::DoNotOptimize(r.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.tasks.size()));
}

struct ImageFixture {
    std::vector<RgbImage> images;
    std::vector<GroupObservation> observations;

    ImageFixture() {
        std::mt19937_64 rng(9);
        std::uniform_int_distribution<int> byte(0, 255);
        for (int k = 0; k < 16; ++k) {
            RgbImage img(320, 240);
            for (auto& p : img.pixels) p = static_cast<std::uint8_t>(byte(rng));
            GroupObservation obs;
            obs.image_id = "img" + std::to_string(k);
            obs.camera_id = "A";
            obs.group_id = k;
            obs.image_size = {320, 240};
            for (int i = 0; i < 4; ++i) obs.boxes.push_back({20.0 + 70.0 * i, 40.0 + 10.0 * i, 40.0, 120.0});
            images.push_back(std::move(img));
            observations.push_back(std::move(obs));
        }
    }
};

template <bool Parallel>
void BM_extract_bundles(benchmark::State& state) {
    static const ImageFixture f;
    for (auto _ : state) {
        auto r = Parallel ? extract_bundles(f.images, f.observations) : extract_bundles_serial(f.images, f.observations);
        benchmark::DoNotOptimize(r.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.images.size()));
}

}  // namespace

BENCHMARK(BM_match_pairs<false>)->Name("match_pairs/serial")->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_match_pairs<true>)->Name("match_pairs/omp")->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_extract_bundles<false>)->Name("extract_bundles/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_extract_bundles<true>)->Name("extract_bundles/omp")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
