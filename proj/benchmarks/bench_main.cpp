#include <benchmark/benchmark.h>

#include <vector>

#include "hrvkit/classify.hpp"
#include "hrvkit/hrv.hpp"
#include "hrvkit/pipeline.hpp"
#include "hrvkit/preprocess.hpp"
#include "hrvkit/rpeak.hpp"
#include "hrvkit/stats.hpp"
#include "hrvkit/synth.hpp"

namespace {

hrvkit::EcgRecording make_recording(double fs_hz) {
    hrvkit::SynthSpec spec;
    spec.fs_hz = fs_hz;
    spec.duration_s = 10.0;
    spec.mean_hr_bpm = 72.0;
    spec.sdnn_target_ms = 35.0;
    spec.noise_snr_db = 15.0;
    spec.powerline = hrvkit::synth::SineComponent{0.25, 50.0};
    spec.seed = 3;
    return hrvkit::synth::generate(spec).recording;
}

void BM_PreprocessChain(benchmark::State& state) {
    const auto rec = make_recording(static_cast<double>(state.range(0)));
    const hrvkit::FilterSpec filter;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            hrvkit::preprocess::preprocess_chain(rec, filter));
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<int64_t>(rec.samples.size()));
}
BENCHMARK(BM_PreprocessChain)->Arg(1000)->Arg(16000);

void BM_DetectRpeaks(benchmark::State& state) {
    const auto rec = hrvkit::preprocess::preprocess_chain(
        make_recording(static_cast<double>(state.range(0))), {});
    for (auto _ : state) {
        benchmark::DoNotOptimize(hrvkit::rpeak::detect_rpeaks(rec));
    }
}
BENCHMARK(BM_DetectRpeaks)->Arg(1000)->Arg(16000);

void BM_ProcessRecording(benchmark::State& state) {
    const auto rec = make_recording(16000.0);
    const hrvkit::RunConfig config;
    for (auto _ : state) {
        benchmark::DoNotOptimize(hrvkit::pipeline::process_recording(rec, config));
    }
}
BENCHMARK(BM_ProcessRecording)->Unit(benchmark::kMillisecond);

void BM_ComputeFeatures(benchmark::State& state) {
    hrvkit::SynthSpec spec;
    spec.duration_s = 600.0;
    spec.sdnn_target_ms = 40.0;
    spec.seed = 5;
    const auto intervals = hrvkit::synth::generate_intervals(spec).intervals_ms;
    for (auto _ : state) {
        benchmark::DoNotOptimize(hrvkit::hrv::compute_features(intervals));
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<int64_t>(intervals.size()));
}
BENCHMARK(BM_ComputeFeatures);

void BM_RankSumExact(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = static_cast<double>(2 * i + 1) + 0.25;
        b[i] = static_cast<double>(2 * i) + 0.5;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(hrvkit::stats::rank_sum_test(a, b));
    }
}
BENCHMARK(BM_RankSumExact)->Arg(5)->Arg(10);

void BM_RankSumNormal(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = static_cast<double>(3 * i % 101) + 0.5;
        b[i] = static_cast<double>(7 * i % 103) + 0.25;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(hrvkit::stats::rank_sum_test(a, b));
    }
}
BENCHMARK(BM_RankSumNormal)->Arg(57)->Arg(240);

void BM_KfoldValidate(benchmark::State& state) {
    hrvkit::CohortTable table;
    for (int i = 0; i < 297; ++i) {
        hrvkit::HrvFeatures f;
        f.mean_nn_ms = 700.0 + (i * 37 % 200);
        f.rms_nn_ms = f.mean_nn_ms + 1.0;
        f.sdnn_ms = 20.0 + (i * 13 % 40);
        f.rmssd_ms = 18.0 + (i * 7 % 35);
        f.hr_bpm = 60000.0 / f.mean_nn_ms;
        f.n_intervals = 12;
        table.rows.push_back({"S" + std::to_string(i),
                              i < 57 ? hrvkit::Label::mci : hrvkit::Label::non_mci,
                              f});
    }
    const auto sel =
        hrvkit::classify::FeatureSelection::single(hrvkit::Feature::mean_nn);
    const auto kind = static_cast<hrvkit::ClassifierKind>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            hrvkit::classify::kfold_validate(table, kind, sel, 10, 1));
    }
}
BENCHMARK(BM_KfoldValidate)
    ->Arg(static_cast<int>(hrvkit::ClassifierKind::svm))
    ->Arg(static_cast<int>(hrvkit::ClassifierKind::da))
    ->Arg(static_cast<int>(hrvkit::ClassifierKind::nb))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
