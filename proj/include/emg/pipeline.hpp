#pragma once

// Recording -> windows -> features -> classifier, in one place.

#include <vector>

#include "emg/classifiers.hpp"
#include "emg/features.hpp"
#include "emg/signal.hpp"

namespace emg {

struct PipelineConfig {
  WindowSpec window;
  FeatureSpec features;
  ChannelMask channels = ChannelMask::all(8);
  ClassifierKind kind = ClassifierKind::SVM;
  int knn_k = 3;
  SvmOptions svm;
  SegmentOptions segment;

  /// Channels 2 and 5 removed, SSC removed, SVM, 51/25.
  static PipelineConfig final_model();
  /// All eight channels and all six features.
  static PipelineConfig full();
};

FeatureMatrix featurize(const SemgRecording& rec, const WindowSpec& window,
                        const FeatureSpec& features, const ChannelMask& channels,
                        SegmentOptions segment = {});

TrainedModel train_pipeline(const SemgRecording& rec, const PipelineConfig& cfg);

/// Throws unless the recording's rate and channel count suit the model.
void check_compatible(const TrainedModel& model, const SemgRecording& rec);

struct RecordingPrediction {
  std::vector<GestureLabel> predicted;
  std::vector<GestureLabel> truth;
};

RecordingPrediction predict_recording(const TrainedModel& model, const SemgRecording& rec,
                                      SegmentOptions segment = {});

/// Train on one recording, evaluate on another.
EvaluationResult train_and_evaluate(const SemgRecording& train, const SemgRecording& test,
                                    const PipelineConfig& cfg);

}  // namespace emg
