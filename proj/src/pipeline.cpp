#include "emg/pipeline.hpp"

#include <string>

namespace emg {

PipelineConfig PipelineConfig::final_model() {
  PipelineConfig cfg;
  cfg.features = FeatureSpec::make({Feature::RMS, Feature::MAV, Feature::WL, Feature::ZC, Feature::AR});
  cfg.channels = ChannelMask({1, 3, 4, 6, 7, 8});
  return cfg;
}

PipelineConfig PipelineConfig::full() { return PipelineConfig{}; }

FeatureMatrix featurize(const SemgRecording& rec, const WindowSpec& window,
                        const FeatureSpec& features, const ChannelMask& channels,
                        SegmentOptions segment) {
  const WindowIndex idx = emg::segment(rec, window, segment);
  return extract_matrix(rec, idx, features, channels);
}

TrainedModel train_pipeline(const SemgRecording& rec, const PipelineConfig& cfg) {
  const FeatureMatrix fm = featurize(rec, cfg.window, cfg.features, cfg.channels, cfg.segment);
  const ModelContext ctx{cfg.features, cfg.channels, cfg.window, rec.sample_rate_hz()};
  return train(cfg.kind, fm, ctx, cfg.knn_k, cfg.svm);
}

void check_compatible(const TrainedModel& model, const SemgRecording& rec) {
  if (rec.sample_rate_hz() != model.sample_rate_hz) {
    throw Error("recording sampled at " + std::to_string(rec.sample_rate_hz()) +
                " Hz but model was trained at " + std::to_string(model.sample_rate_hz) + " Hz");
  }
  model.channel_mask.check_within(rec.n_channels());
}

RecordingPrediction predict_recording(const TrainedModel& model, const SemgRecording& rec,
                                      SegmentOptions segment) {
  check_compatible(model, rec);
  const FeatureMatrix fm =
      featurize(rec, model.window_spec, model.feature_spec, model.channel_mask, segment);
  return {predict(model, fm), fm.row_labels};
}

EvaluationResult train_and_evaluate(const SemgRecording& train, const SemgRecording& test,
                                    const PipelineConfig& cfg) {
  const TrainedModel model = train_pipeline(train, cfg);
  const auto pred = predict_recording(model, test, cfg.segment);
  return evaluate(pred.predicted, pred.truth);
}

}  // namespace emg
