#include "emg/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "emg/features.hpp"

namespace emg {

using nlohmann::json;

namespace {

struct Featurized {
  FeatureMatrix train;
  FeatureMatrix test;
  int rate_hz = 0;
};

void check_pair(const SemgRecording& train, const SemgRecording& test) {
  if (train.sample_rate_hz() != test.sample_rate_hz()) {
    throw Error("train and test recordings have different sample rates");
  }
  if (train.n_channels() != test.n_channels()) {
    throw Error("train and test recordings have different channel counts");
  }
}

// Every feature on every channel; experiment cells select columns from this.
Featurized featurize_all(const SemgRecording& train, const SemgRecording& test,
                         const WindowSpec& window, const ExperimentOptions& opts) {
  check_pair(train, test);
  const FeatureSpec all = FeatureSpec::make({kAllFeatures.begin(), kAllFeatures.end()},
                                            opts.ar_order, opts.threshold_alpha);
  const ChannelMask mask = ChannelMask::all(train.n_channels());
  return {featurize(train, window, all, mask), featurize(test, window, all, mask),
          train.sample_rate_hz()};
}

struct CellResult {
  double accuracy_pct = 0.0;
  std::size_t n_columns = 0;
};

CellResult run_cell(const Featurized& data, const WindowSpec& window, const FeatureSpec& fspec,
                    const ChannelMask& mask, ClassifierKind kind, const ExperimentOptions& opts) {
  const auto layout = column_layout(fspec, mask);
  const FeatureMatrix train = data.train.select_columns(layout);
  const FeatureMatrix test = data.test.select_columns(layout);
  const ModelContext ctx{fspec, mask, window, data.rate_hz};
  const TrainedModel model = emg::train(kind, train, ctx, opts.knn_k, opts.svm);
  const auto pred = predict(model, test);
  return {evaluate(pred, test.row_labels).accuracy_pct, layout.size()};
}

std::string describe(const FeatureSpec& f, const ChannelMask& m) {
  std::string s = "features=";
  for (std::size_t i = 0; i < f.enabled.size(); ++i) {
    if (i) s += '+';
    s += feature_name(f.enabled[i]);
  }
  s += " channels=";
  for (std::size_t i = 0; i < m.ids().size(); ++i) {
    if (i) s += '+';
    s += std::to_string(m.ids()[i]);
  }
  return s;
}

struct AblationConfig {
  FeatureSpec features;
  ChannelMask channels;
};

AblationReport run_ablation(std::string title, const SemgRecording& train,
                            const SemgRecording& test, const WindowSpec& window,
                            const std::vector<ClassifierKind>& kinds,
                            const std::vector<AblationConfig>& configs,
                            const ExperimentOptions& opts) {
  const Featurized data = featurize_all(train, test, window, opts);
  AblationReport report;
  report.title = std::move(title);
  report.window = window;
  const std::size_t n_cells = kinds.size() * configs.size();
  report.rows.resize(n_cells);
  std::vector<std::string> failure(n_cells);

  const auto n = static_cast<std::ptrdiff_t>(n_cells);
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto cell = static_cast<std::size_t>(i);
    const ClassifierKind kind = kinds[cell / configs.size()];
    const AblationConfig& cfg = configs[cell % configs.size()];
    AblationRow& row = report.rows[cell];
    row.kind = kind;
    row.configuration = describe(cfg.features, cfg.channels);
    try {
      const CellResult r = run_cell(data, window, cfg.features, cfg.channels, kind, opts);
      row.accuracy_pct = r.accuracy_pct;
      row.n_columns = r.n_columns;
    } catch (const std::exception& e) {
      failure[cell] = e.what();
    }
  }
  for (const auto& f : failure) {
    if (!f.empty()) throw Error(f);
  }
  return report;
}

}  // namespace

EfficiencyMatrix feature_channel_efficiency(const SemgRecording& train, const SemgRecording& test,
                                            const WindowSpec& window, ClassifierKind kind,
                                            const ExperimentOptions& opts) {
  const Featurized data = featurize_all(train, test, window, opts);
  const int n_ch = train.n_channels();

  EfficiencyMatrix m;
  m.kind = kind;
  m.window = window;
  for (int c = 1; c <= n_ch; ++c) m.row_names.push_back("Channel " + std::to_string(c));
  m.row_names.push_back("All Channels");
  for (std::size_t f = 0; f < kEfficiencyFeatures.size(); ++f) {
    m.col_names[f] = feature_name(kEfficiencyFeatures[f]);
  }
  m.cells.resize(m.row_names.size());

  const auto n_rows = m.row_names.size();
  const auto n = static_cast<std::ptrdiff_t>(n_rows * kEfficiencyFeatures.size());
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto row = static_cast<std::size_t>(i) / kEfficiencyFeatures.size();
    const auto col = static_cast<std::size_t>(i) % kEfficiencyFeatures.size();
    EfficiencyCell& cell = m.cells[row][col];
    try {
      const ChannelMask mask = row + 1 == n_rows ? ChannelMask::all(n_ch)
                                                 : ChannelMask({static_cast<int>(row) + 1});
      const FeatureSpec fspec =
          FeatureSpec::make({kEfficiencyFeatures[col]}, opts.ar_order, opts.threshold_alpha);
      cell.accuracy_pct = run_cell(data, window, fspec, mask, kind, opts).accuracy_pct;
    } catch (const std::exception& e) {
      cell.reason = e.what();
    }
  }
  return m;
}

AblationReport ssc_ablation(const SemgRecording& train, const SemgRecording& test,
                            const WindowSpec& window, const std::vector<ClassifierKind>& kinds,
                            const ExperimentOptions& opts) {
  const ChannelMask all = ChannelMask::all(train.n_channels());
  const std::vector<AblationConfig> configs = {
      {FeatureSpec::make({kAllFeatures.begin(), kAllFeatures.end()}, opts.ar_order,
                         opts.threshold_alpha),
       all},
      {FeatureSpec::make({Feature::RMS, Feature::MAV, Feature::WL, Feature::ZC, Feature::AR},
                         opts.ar_order, opts.threshold_alpha),
       all},
  };
  return run_ablation("SSC ablation", train, test, window, kinds, configs, opts);
}

AblationReport channel_ablation(const SemgRecording& train, const SemgRecording& test,
                                const WindowSpec& window, const std::vector<ClassifierKind>& kinds,
                                const ExperimentOptions& opts, std::vector<int> dropped) {
  const int n_ch = train.n_channels();
  std::vector<int> kept;
  for (int c = 1; c <= n_ch; ++c) {
    if (std::find(dropped.begin(), dropped.end(), c) == dropped.end()) kept.push_back(c);
  }
  const FeatureSpec six = FeatureSpec::make({kAllFeatures.begin(), kAllFeatures.end()},
                                            opts.ar_order, opts.threshold_alpha);
  const std::vector<AblationConfig> configs = {
      {six, ChannelMask::all(n_ch)},
      {six, ChannelMask(kept)},
  };
  return run_ablation("Channel ablation", train, test, window, kinds, configs, opts);
}

int sweep_increment(int win_size) { return std::max(1, win_size / 2); }

SweepReport window_sweep(const SemgRecording& train, const SemgRecording& test,
                         const std::vector<int>& sizes, ClassifierKind kind,
                         const ExperimentOptions& opts) {
  check_pair(train, test);
  const std::size_t shortest = std::min(train.n_samples(), test.n_samples());
  for (int s : sizes) {
    if (s < 2 || static_cast<std::size_t>(s) > shortest) {
      throw Error("sweep window size " + std::to_string(s) + " outside [2, " +
                  std::to_string(shortest) + "]");
    }
  }
  SweepReport report;
  report.kind = kind;
  report.tau_measured = !opts.fixed_tau_ms.has_value();
  report.rows.resize(sizes.size());
  std::vector<std::string> failure(sizes.size());

  const auto n = static_cast<std::ptrdiff_t>(sizes.size());
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    SweepRow& row = report.rows[r];
    row.win_size = sizes[r];
    row.win_inc = sweep_increment(sizes[r]);
    try {
      PipelineConfig cfg = PipelineConfig::full();
      cfg.window = {row.win_size, row.win_inc};
      cfg.features = FeatureSpec::make({kAllFeatures.begin(), kAllFeatures.end()}, opts.ar_order,
                                       opts.threshold_alpha);
      cfg.channels = ChannelMask::all(train.n_channels());
      cfg.kind = kind;
      cfg.knn_k = opts.knn_k;
      cfg.svm = opts.svm;
      const TrainedModel model = train_pipeline(train, cfg);

      const auto t0 = std::chrono::steady_clock::now();
      const auto pred = predict_recording(model, test);
      const auto t1 = std::chrono::steady_clock::now();
      row.accuracy_pct = evaluate(pred.predicted, pred.truth).accuracy_pct;
      const double per_window_ms =
          std::chrono::duration<double, std::milli>(t1 - t0).count() /
          static_cast<double>(pred.predicted.size());
      row.latency = decision_latency(row.win_size, row.win_inc, test.sample_rate_hz(),
                                     opts.fixed_tau_ms.value_or(per_window_ms));
    } catch (const std::exception& e) {
      failure[r] = e.what();
    }
  }
  for (const auto& f : failure) {
    if (!f.empty()) throw Error(f);
  }
  return report;
}

std::string format_sig6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace {

// Left-aligned first column, right-aligned others.
std::string align(const std::vector<std::vector<std::string>>& table) {
  std::vector<std::size_t> width;
  for (const auto& row : table) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : table) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string pad(width[c] - row[c].size(), ' ');
      if (c) line += "  ";
      line += c == 0 ? row[c] + pad : pad + row[c];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  }
  return out;
}

std::string window_text(const WindowSpec& w) {
  return "win_size=" + std::to_string(w.win_size) + " win_inc=" + std::to_string(w.win_inc);
}

}  // namespace

std::string render_text(const EfficiencyMatrix& m) {
  std::vector<std::vector<std::string>> t;
  std::vector<std::string> header{"Channel"};
  header.insert(header.end(), m.col_names.begin(), m.col_names.end());
  t.push_back(header);
  for (std::size_t r = 0; r < m.row_names.size(); ++r) {
    std::vector<std::string> row{m.row_names[r]};
    for (const auto& cell : m.cells[r]) {
      row.push_back(cell.accuracy_pct ? format_sig6(*cell.accuracy_pct) : "n/a");
    }
    t.push_back(row);
  }
  std::string out = "# Feature efficiency (%) of the " + std::string(kind_name(m.kind)) +
                    " classifier, " + window_text(m.window) + "\n" + align(t);
  for (std::size_t r = 0; r < m.row_names.size(); ++r) {
    for (std::size_t c = 0; c < m.col_names.size(); ++c) {
      if (!m.cells[r][c].accuracy_pct) {
        out += "# n/a " + m.row_names[r] + " " + m.col_names[c] + ": " + m.cells[r][c].reason + "\n";
      }
    }
  }
  return out;
}

std::string render_text(const AblationReport& r) {
  std::vector<std::vector<std::string>> t{{"Classifier", "Configuration", "Columns", "Accuracy(%)"}};
  for (const auto& row : r.rows) {
    t.push_back({std::string(kind_name(row.kind)), row.configuration,
                 std::to_string(row.n_columns), format_sig6(row.accuracy_pct)});
  }
  return "# " + r.title + ", " + window_text(r.window) + "\n" + align(t);
}

std::string render_text(const SweepReport& r) {
  std::vector<std::vector<std::string>> t{
      {"win_size", "win_inc", "Accuracy(%)", "T_a(ms)", "T_new(ms)", "tau(ms)", "D(ms)"}};
  for (const auto& row : r.rows) {
    t.push_back({std::to_string(row.win_size), std::to_string(row.win_inc),
                 format_sig6(row.accuracy_pct), format_sig6(row.latency.t_analysis_ms),
                 format_sig6(row.latency.t_new_ms), format_sig6(row.latency.t_processing_ms),
                 format_sig6(row.latency.decision_ms)});
  }
  return "# Window sweep, " + std::string(kind_name(r.kind)) + " classifier, tau " +
         (r.tau_measured ? "measured" : "fixed") + "\n" + align(t);
}

namespace {

json window_json(const WindowSpec& w) { return {{"win_size", w.win_size}, {"win_inc", w.win_inc}}; }

json envelope(const char* type) {
  return {{"format", "emg-report"}, {"version", 1}, {"type", type}};
}

json parse_report(const std::string& text, const char* type) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("report is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "emg-report" || j.value("type", "") != type) {
    throw Error(std::string("not an emg-report of type ") + type);
  }
  if (j.value("version", 0) != 1) throw Error("unsupported report version");
  return j;
}

// Missing or mistyped fields surface as emg::Error, like every other load failure.
template <typename F>
auto decode_report(const char* type, F&& body) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw Error(std::string("malformed ") + type + " report: " + e.what());
  }
}

}  // namespace

std::string render_json(const EfficiencyMatrix& m) {
  json j = envelope("efficiency");
  j["kind"] = std::string(kind_name(m.kind));
  j["window_spec"] = window_json(m.window);
  j["rows"] = m.row_names;
  j["cols"] = m.col_names;
  json cells = json::array();
  for (const auto& row : m.cells) {
    json jr = json::array();
    for (const auto& c : row) {
      jr.push_back(c.accuracy_pct ? json(*c.accuracy_pct) : json{{"missing", c.reason}});
    }
    cells.push_back(jr);
  }
  j["accuracy_pct"] = cells;
  return j.dump(1) + "\n";
}

std::string render_json(const AblationReport& r) {
  json j = envelope("ablation");
  j["title"] = r.title;
  j["window_spec"] = window_json(r.window);
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"kind", std::string(kind_name(row.kind))},
                    {"configuration", row.configuration},
                    {"columns", row.n_columns},
                    {"accuracy_pct", row.accuracy_pct}});
  }
  j["rows"] = rows;
  return j.dump(1) + "\n";
}

std::string render_json(const SweepReport& r) {
  json j = envelope("sweep");
  j["kind"] = std::string(kind_name(r.kind));
  j["tau_measured"] = r.tau_measured;
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"win_size", row.win_size},
                    {"win_inc", row.win_inc},
                    {"accuracy_pct", row.accuracy_pct},
                    {"t_analysis_ms", row.latency.t_analysis_ms},
                    {"t_new_ms", row.latency.t_new_ms},
                    {"t_processing_ms", row.latency.t_processing_ms},
                    {"decision_ms", row.latency.decision_ms}});
  }
  j["rows"] = rows;
  return j.dump(1) + "\n";
}

AblationReport ablation_from_json(const std::string& text) {
  const json j = parse_report(text, "ablation");
  return decode_report("ablation", [&] {
    AblationReport r;
    r.title = j.at("title").get<std::string>();
    r.window = {j.at("window_spec").at("win_size").get<int>(),
                j.at("window_spec").at("win_inc").get<int>()};
    for (const auto& row : j.at("rows")) {
      r.rows.push_back({kind_from_name(row.at("kind").get<std::string>()),
                        row.at("configuration").get<std::string>(),
                        row.at("accuracy_pct").get<double>(), row.at("columns").get<std::size_t>()});
    }
    return r;
  });
}

SweepReport sweep_from_json(const std::string& text) {
  const json j = parse_report(text, "sweep");
  return decode_report("sweep", [&] {
    SweepReport r;
    r.kind = kind_from_name(j.at("kind").get<std::string>());
    r.tau_measured = j.at("tau_measured").get<bool>();
    for (const auto& row : j.at("rows")) {
      SweepRow s;
      s.win_size = row.at("win_size").get<int>();
      s.win_inc = row.at("win_inc").get<int>();
      s.accuracy_pct = row.at("accuracy_pct").get<double>();
      s.latency.t_analysis_ms = row.at("t_analysis_ms").get<double>();
      s.latency.t_new_ms = row.at("t_new_ms").get<double>();
      s.latency.t_processing_ms = row.at("t_processing_ms").get<double>();
      s.latency.decision_ms = row.at("decision_ms").get<double>();
      r.rows.push_back(s);
    }
    return r;
  });
}

}  // namespace emg
