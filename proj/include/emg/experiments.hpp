#pragma once

// Batch studies: per-channel/per-feature efficiency, SSC and channel
// ablations, and the window-length sweep.
//
// Cells run under OpenMP when `parallel` is set; results are assembled in a
// fixed order so serial and parallel runs produce identical reports.

#include <optional>
#include <string>
#include <vector>

#include "emg/classifiers.hpp"
#include "emg/pipeline.hpp"
#include "emg/signal.hpp"

namespace emg {

struct ExperimentOptions {
  int ar_order = 2;
  double threshold_alpha = 0.0;
  int knn_k = 3;
  SvmOptions svm;
  bool parallel = true;
  /// Use this processing time instead of measuring it (keeps reports reproducible).
  std::optional<double> fixed_tau_ms;
};

/// Column order of the efficiency grid.
inline constexpr std::array<Feature, 6> kEfficiencyFeatures = {
    Feature::RMS, Feature::MAV, Feature::WL, Feature::AR, Feature::ZC, Feature::SSC};

struct EfficiencyCell {
  std::optional<double> accuracy_pct;
  std::string reason;  ///< set when accuracy_pct is absent
};

/// Rows: channels 1..8 then "All Channels"; columns: kEfficiencyFeatures.
struct EfficiencyMatrix {
  ClassifierKind kind = ClassifierKind::SVM;
  WindowSpec window;
  std::vector<std::string> row_names;
  std::array<std::string, 6> col_names;
  std::vector<std::array<EfficiencyCell, 6>> cells;
};

struct AblationRow {
  ClassifierKind kind = ClassifierKind::SVM;
  std::string configuration;
  double accuracy_pct = 0.0;
  std::size_t n_columns = 0;
};

struct AblationReport {
  std::string title;
  WindowSpec window;
  std::vector<AblationRow> rows;
};

struct SweepRow {
  int win_size = 0;
  int win_inc = 0;
  double accuracy_pct = 0.0;
  LatencyBudget latency;
};

struct SweepReport {
  ClassifierKind kind = ClassifierKind::SVM;
  bool tau_measured = true;
  std::vector<SweepRow> rows;
};

EfficiencyMatrix feature_channel_efficiency(const SemgRecording& train, const SemgRecording& test,
                                            const WindowSpec& window, ClassifierKind kind,
                                            const ExperimentOptions& opts = {});

/// All six features vs. SSC removed, over all channels.
AblationReport ssc_ablation(const SemgRecording& train, const SemgRecording& test,
                            const WindowSpec& window, const std::vector<ClassifierKind>& kinds,
                            const ExperimentOptions& opts = {});

/// All channels vs. `dropped` removed, all six features.
AblationReport channel_ablation(const SemgRecording& train, const SemgRecording& test,
                                const WindowSpec& window, const std::vector<ClassifierKind>& kinds,
                                const ExperimentOptions& opts = {},
                                std::vector<int> dropped = {2, 5});

/// Window increment used for a sweep size: half the window, rounded down.
int sweep_increment(int win_size);

SweepReport window_sweep(const SemgRecording& train, const SemgRecording& test,
                         const std::vector<int>& sizes, ClassifierKind kind,
                         const ExperimentOptions& opts = {});

// Rendering: aligned plain-text tables (6 significant digits) and JSON
// documents tagged "emg-report".
std::string render_text(const EfficiencyMatrix& m);
std::string render_text(const AblationReport& r);
std::string render_text(const SweepReport& r);
std::string render_json(const EfficiencyMatrix& m);
std::string render_json(const AblationReport& r);
std::string render_json(const SweepReport& r);

AblationReport ablation_from_json(const std::string& text);
SweepReport sweep_from_json(const std::string& text);

/// "%.6g" formatting used by the text tables.
std::string format_sig6(double v);

}  // namespace emg
