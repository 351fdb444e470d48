// OpenMP kernels against their serial reference paths.

#include <benchmark/benchmark.h>

#include "emg/dataset.hpp"
#include "emg/pipeline.hpp"

using namespace emg;

namespace {

struct Fixture {
  SemgRecording rec = synth_recording(SessionProtocol{}, SynthConfig::separable(1));
  WindowIndex idx = segment(rec, WindowSpec{});
  FeatureSpec spec;
  ChannelMask mask = ChannelMask::all(8);
  FeatureMatrix fm = extract_matrix(rec, idx, spec, mask);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

const TrainedModel& model(ClassifierKind kind) {
  static const auto models = [] {
    std::vector<TrainedModel> m;
    for (ClassifierKind k : {ClassifierKind::LDA, ClassifierKind::KNN, ClassifierKind::SVM}) {
      PipelineConfig cfg = PipelineConfig::full();
      cfg.kind = k;
      m.push_back(train_pipeline(fixture().rec, cfg));
    }
    return m;
  }();
  return models[static_cast<std::size_t>(kind)];
}

void BM_ExtractParallel(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(extract_matrix(f.rec, f.idx, f.spec, f.mask));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.idx.size()));
}

void BM_ExtractSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(extract_matrix_serial(f.rec, f.idx, f.spec, f.mask));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.idx.size()));
}

void BM_PredictParallel(benchmark::State& state) {
  const auto& m = model(static_cast<ClassifierKind>(state.range(0)));
  state.SetLabel(std::string(kind_name(m.kind)));
  for (auto _ : state) benchmark::DoNotOptimize(predict(m, fixture().fm));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(fixture().fm.rows));
}

void BM_PredictSerial(benchmark::State& state) {
  const auto& m = model(static_cast<ClassifierKind>(state.range(0)));
  state.SetLabel(std::string(kind_name(m.kind)));
  for (auto _ : state) benchmark::DoNotOptimize(predict_serial(m, fixture().fm));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(fixture().fm.rows));
}

}  // namespace

BENCHMARK(BM_ExtractParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExtractSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictParallel)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictSerial)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
