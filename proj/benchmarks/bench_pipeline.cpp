#include "autotag/detector.hpp"
#include "autotag/dictionary.hpp"
#include "autotag/synth.hpp"
#include "autotag/threshold.hpp"

#include <benchmark/benchmark.h>

using namespace autotag;

namespace {

const MarkerDictionary& dictionary()
{
    static const MarkerDictionary d = generate_dictionary(5, 28, 7, 42);
    return d;
}

DatasetConfig bench_config()
{
    DatasetConfig c;
    c.train = 0;
    c.val = 0;
    c.test = 4;
    c.seed = 11;
    return c;
}

// 320x240 scene holding one tilted marker.
const RgbImage& scene()
{
    static const RgbImage img =
        synthesize_image(bench_config(), dictionary(), Split::Test, 3).scene.image;
    return img;
}

void BM_Otsu(benchmark::State& state)
{
    const Histogram h = histogram_of(to_gray(scene()));
    for (auto _ : state) {
        benchmark::DoNotOptimize(otsu_threshold(h));
    }
}
BENCHMARK(BM_Otsu);

void BM_BinarizeAdaptive(benchmark::State& state)
{
    const GrayImage gray = to_gray(scene());
    const int window = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(binarize_adaptive(gray, window, 7));
    }
    state.SetItemsProcessed(state.iterations() * gray.width * gray.height);
}
BENCHMARK(BM_BinarizeAdaptive)->Arg(7)->Arg(23)->Arg(63);

void BM_DetectMarkers(benchmark::State& state)
{
    const RgbImage& img = scene();
    for (auto _ : state) {
        benchmark::DoNotOptimize(detect_markers(img, dictionary()));
    }
}
BENCHMARK(BM_DetectMarkers)->Unit(benchmark::kMillisecond);

void BM_ComposeScene(benchmark::State& state)
{
    const RgbImage bg = solid_background(320, 240, 200);
    Placement p;
    p.id = 5;
    p.side = 64.0;
    p.center = {160.0, 120.0};
    p.tilt = 0.4;
    p.roll = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(compose_scene(bg, {p}, dictionary()));
    }
}
BENCHMARK(BM_ComposeScene)->Unit(benchmark::kMicrosecond);

void BM_SynthesizeImage(benchmark::State& state)
{
    const DatasetConfig cfg = bench_config();
    int index = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(synthesize_image(cfg, dictionary(), Split::Test, index));
        index = (index + 1) % (cfg.test * dictionary().size());
    }
}
BENCHMARK(BM_SynthesizeImage)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
