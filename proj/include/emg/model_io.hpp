#pragma once

// Versioned JSON model documents.
//
//   { "format": "emg-model", "version": 1, "kind": "SVM", "sample_rate_hz": 200,
//     "window_spec": {...}, "feature_spec": {...}, "channel_mask": [...],
//     "col_meta": [...], "standardizer": {...}, "payload": {...} }

#include <filesystem>
#include <string>

#include "emg/classifiers.hpp"

namespace emg {

inline constexpr int kModelFormatVersion = 1;

std::string model_to_string(const TrainedModel& model);
TrainedModel model_from_string(const std::string& text);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace emg
