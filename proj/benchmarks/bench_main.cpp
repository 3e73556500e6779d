// Micro-benchmarks for the hot paths: robust motion estimation, descriptor
// extraction, GMM evaluation and Viterbi decoding.

#include <limits>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "adl/descriptors.hpp"
#include "adl/gmm.hpp"
#include "adl/hhmm.hpp"
#include "adl/motion.hpp"
#include "adl/segmentation.hpp"

using namespace adl;

namespace {

MotionVectorField make_field(std::mt19937_64& rng, bool with_outliers) {
    std::normal_distribution<double> noise(0.0, 0.5);
    const AffineMotion truth{4.0, 0.01, -0.005, -2.0, 0.002, 0.01};
    MotionVectorField field;
    field.width = 320;
    field.height = 240;
    for (int by = 0; by < 6; ++by) {
        for (int bx = 0; bx < 8; ++bx) {
            const Vec2 c{(bx + 0.5) * 40.0, (by + 0.5) * 40.0};
            Vec2 d = truth.apply(c);
            d.x += noise(rng);
            d.y += noise(rng);
            if (with_outliers && (by * 8 + bx) % 5 == 0) d = {40.0, 40.0};
            field.block_centers.push_back(c);
            field.displacements.push_back(d);
        }
    }
    return field;
}

Gmm make_gmm(std::mt19937_64& rng, int components, int dim) {
    std::uniform_real_distribution<double> mu(-3.0, 3.0);
    Gmm g;
    for (int k = 0; k < components; ++k) {
        g.weights.push_back(1.0 / components);
        g.means.emplace_back();
        g.variances.emplace_back();
        for (int d = 0; d < dim; ++d) {
            g.means.back().push_back(mu(rng));
            g.variances.back().push_back(1.0);
        }
    }
    return g;
}

DecodingNetwork make_network(std::mt19937_64& rng, int activities, int states) {
    std::vector<ActivityHmm> acts;
    for (int a = 0; a < activities; ++a) {
        ActivityHmm hmm;
        hmm.activity = "act" + std::to_string(a);
        hmm.num_states = states;
        hmm.entry_probs.assign(static_cast<std::size_t>(states), 1.0 / states);
        hmm.trans.assign(static_cast<std::size_t>(states),
                         std::vector<double>(static_cast<std::size_t>(states),
                                             0.3 / states));
        for (int i = 0; i < states; ++i) {
            hmm.trans[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 0.6;
        }
        hmm.exit_probs.assign(static_cast<std::size_t>(states), 0.1);
        for (int i = 0; i < states; ++i) hmm.emissions.push_back(make_gmm(rng, 5, 48));
        acts.push_back(std::move(hmm));
    }
    return flatten(make_hhmm(std::move(acts)));
}

void bm_estimate_affine(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const MotionVectorField field = make_field(rng, false);
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_affine(field));
    }
}
BENCHMARK(bm_estimate_affine);

void bm_estimate_affine_outliers(benchmark::State& state) {
    std::mt19937_64 rng(2);
    const MotionVectorField field = make_field(rng, true);
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_affine(field));
    }
}
BENCHMARK(bm_estimate_affine_outliers);

void bm_segment_stream(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> jitter(0.0, 0.2);
    std::vector<AffineMotion> models;
    for (int t = 0; t < 3000; ++t) {
        models.push_back({2.0 + jitter(rng), 0.0, 0.0, jitter(rng), 0.0, 0.0});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(segment_stream(models, 320, 240, 0.5));
    }
}
BENCHMARK(bm_segment_stream);

void bm_color_layout(benchmark::State& state) {
    std::mt19937_64 rng(4);
    KeyFrameImage img;
    img.width = 32;
    img.height = 24;
    img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
    for (auto& v : img.rgb) v = static_cast<std::uint8_t>(rng() % 256);
    for (auto _ : state) {
        benchmark::DoNotOptimize(color_layout(img));
    }
}
BENCHMARK(bm_color_layout);

void bm_gmm_log_density(benchmark::State& state) {
    std::mt19937_64 rng(5);
    const Gmm g = make_gmm(rng, 5, 48);
    std::uniform_real_distribution<double> obs(-3.0, 3.0);
    std::vector<double> o(48);
    for (double& x : o) x = obs(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gmm_log_density(g, o));
    }
}
BENCHMARK(bm_gmm_log_density);

void bm_viterbi_decode(benchmark::State& state) {
    std::mt19937_64 rng(6);
    const DecodingNetwork net = make_network(rng, 8, 3);
    std::uniform_real_distribution<double> obs(-3.0, 3.0);
    std::vector<std::vector<double>> observations(300, std::vector<double>(48));
    for (auto& o : observations) {
        for (double& x : o) x = obs(rng);
    }
    const double beam = state.range(0) == 0
                            ? std::numeric_limits<double>::infinity()
                            : static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(viterbi_decode(net, observations, beam));
    }
}
BENCHMARK(bm_viterbi_decode)->Arg(0)->Arg(200)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
