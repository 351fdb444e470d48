#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "emg/classifiers.hpp"
#include "emg/dataset.hpp"
#include "emg/experiments.hpp"
#include "emg/model_io.hpp"
#include "emg/pipeline.hpp"
#include "emg/stream.hpp"

namespace emg::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

/// Thrown for bad flag values discovered after CLI11 parsing.
struct UsageError : Error {
  using Error::Error;
};

// ---- flag value parsing -----------------------------------------------------

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(part);
  return parts;
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw UsageError("");
    return v;
  } catch (...) {
    throw UsageError("bad " + what + " '" + s + "'");
  }
}

FeatureSpec parse_features(const std::string& s, int ar_order, double alpha) {
  if (s == "all") return FeatureSpec::make({kAllFeatures.begin(), kAllFeatures.end()}, ar_order, alpha);
  std::vector<Feature> fs;
  for (const auto& name : split(s, ',')) {
    try {
      fs.push_back(feature_from_name(name));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  try {
    return FeatureSpec::make(std::move(fs), ar_order, alpha);
  } catch (const Error& e) {
    throw UsageError(std::string("--features: ") + e.what());
  }
}

ChannelMask parse_channels(const std::string& s, int n_channels) {
  if (s == "all") return ChannelMask::all(n_channels);
  std::vector<int> ids;
  for (const auto& part : split(s, ',')) ids.push_back(parse_int(part, "channel id"));
  try {
    return ChannelMask(std::move(ids));
  } catch (const Error& e) {
    throw UsageError(std::string("--channels: ") + e.what());
  }
}

/// "25:120" (step 1), "25:120:5", or "25,51,100".
std::vector<int> parse_sizes(const std::string& s) {
  std::vector<int> sizes;
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() < 2 || parts.size() > 3) throw UsageError("--sizes expects lo:hi[:step]");
    const int lo = parse_int(parts[0], "size");
    const int hi = parse_int(parts[1], "size");
    const int step = parts.size() == 3 ? parse_int(parts[2], "step") : 1;
    if (step <= 0 || hi < lo) throw UsageError("--sizes range is empty");
    for (int v = lo; v <= hi; v += step) sizes.push_back(v);
  } else {
    for (const auto& part : split(s, ',')) sizes.push_back(parse_int(part, "size"));
  }
  if (sizes.empty()) throw UsageError("--sizes is empty");
  return sizes;
}

std::vector<ClassifierKind> parse_kinds(const std::string& s) {
  std::vector<ClassifierKind> kinds;
  for (const auto& name : split(s, ',')) {
    try {
      kinds.push_back(kind_from_name(name));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  return kinds;
}

std::string join_features(const FeatureSpec& f) {
  std::string s;
  for (Feature x : f.enabled) {
    if (!s.empty()) s += ',';
    s += feature_name(x);
  }
  return s;
}

std::string join_channels(const ChannelMask& m) {
  std::string s;
  for (int id : m.ids()) {
    if (!s.empty()) s += ',';
    s += std::to_string(id);
  }
  return s;
}

// ---- paths -----------------------------------------------------------------

/// Relative output paths land in $EMG_OUT_DIR when it is set.
fs::path output_path(const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) {
    if (const char* dir = std::getenv("EMG_OUT_DIR"); dir && *dir) path = fs::path(dir) / path;
  }
  const fs::path parent = path.parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw Error("output directory '" + parent.string() + "' does not exist");
  }
  return path;
}

void require_file(const std::string& p, const char* what) {
  if (!fs::is_regular_file(p)) throw Error(std::string(what) + " '" + p + "' not found");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error("failed to write '" + path.string() + "'");
}

// ---- effective-config header ----------------------------------------------

class Header {
 public:
  explicit Header(const std::string& cmd) { line_ = "# emgctl " + std::string(kVersion) + " " + cmd; }
  template <typename T>
  Header& kv(const std::string& k, const T& v) {
    std::ostringstream os;
    os << v;
    line_ += " " + k + "=" + os.str();
    return *this;
  }
  void print(std::ostream& out) const { out << line_ << '\n'; }

 private:
  std::string line_;
};

// ---- subcommand option blocks ---------------------------------------------

struct SynthArgs {
  std::uint64_t seed = 1;
  std::string out = "recording.emgrec";
  int gestures = kNumGestures;
  int reps = 4;
  double hold_s = 5.0;
  int rate = 200;
  bool blocked = false;
  bool no_bookends = false;
  std::string profile = "separable";
  std::optional<double> noise;
  double burst_hz = 0.0;
};

struct FeatureArgs {
  int win = 51;
  int inc = 25;
  std::string features;
  std::string channels;
  int ar_order = 2;
  double alpha = 0.0;
};

void add_feature_flags(CLI::App* sc, FeatureArgs& a, bool with_selection) {
  sc->add_option("--win", a.win, "Window length in samples")->capture_default_str();
  sc->add_option("--inc", a.inc, "Window increment in samples")->capture_default_str();
  if (with_selection) {
    sc->add_option("--features", a.features,
                   "Comma list of rms,mav,wl,zc,ssc,ar or 'all' (default rms,mav,wl,zc,ar)");
    sc->add_option("--channels", a.channels,
                   "Comma list of 1-based channel ids or 'all' (default 1,3,4,6,7,8)");
  }
  sc->add_option("--ar-order", a.ar_order, "AR model order")->capture_default_str();
  sc->add_option("--alpha", a.alpha, "ZC/SSC amplitude threshold")->capture_default_str();
}

SemgRecording load_recording(const std::string& path) {
  require_file(path, "recording");
  return read_recording(fs::path(path));
}

// ---- subcommands -------------------------------------------------------------

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  if (a.gestures < 1 || a.gestures > kNumGestures) {
    throw UsageError("--gestures must be between 1 and " + std::to_string(kNumGestures));
  }
  SessionProtocol p;
  p.gestures.resize(static_cast<std::size_t>(a.gestures));
  p.reps = a.reps;
  p.hold_s = a.hold_s;
  p.rate_hz = a.rate;
  p.bookend_rest = !a.no_bookends;
  p.order = a.blocked ? BlockOrder::Blocked : BlockOrder::RoundRobin;

  SynthConfig cfg;
  if (a.profile == "separable") {
    cfg = SynthConfig::separable(a.seed);
  } else if (a.profile == "low-contrast") {
    cfg = SynthConfig::low_contrast(a.seed);
  } else {
    throw UsageError("--profile must be separable or low-contrast");
  }
  if (a.noise) cfg.noise_std = *a.noise;
  cfg.burst_freq_hz = a.burst_hz;

  const fs::path path = output_path(a.out);
  Header("synth")
      .kv("seed", a.seed)
      .kv("profile", a.profile)
      .kv("noise_std", format_sig6(cfg.noise_std))
      .kv("gestures", a.gestures)
      .kv("reps", a.reps)
      .kv("hold_s", a.hold_s)
      .kv("rate_hz", a.rate)
      .kv("order", a.blocked ? "blocked" : "round-robin")
      .kv("bookends", a.no_bookends ? "off" : "on")
      .kv("out", path.string())
      .print(out);
  const SemgRecording rec = synth_recording(p, cfg);
  write_recording(rec, path);
  out << "wrote " << rec.n_samples() << " samples x " << rec.n_channels() << " channels ("
      << rec.duration_s() << " s)\n";
  return kExitOk;
}

struct TrainArgs {
  std::string in;
  std::string out = "model.json";
  std::string classifier = "svm";
  int k = 3;
  double c_reg = 1.0;
  int max_iter_factor = SvmOptions{}.max_iter_factor;
  bool drop_transitions = false;
  FeatureArgs f;
};

PipelineConfig pipeline_config(const FeatureArgs& f, const std::string& classifier, int n_channels) {
  PipelineConfig cfg = PipelineConfig::final_model();
  cfg.window = {f.win, f.inc};
  try {
    cfg.window.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (f.features.empty()) {
    cfg.features = FeatureSpec::make(cfg.features.enabled, f.ar_order, f.alpha);
  } else {
    cfg.features = parse_features(f.features, f.ar_order, f.alpha);
  }
  if (!f.channels.empty()) cfg.channels = parse_channels(f.channels, n_channels);
  try {
    cfg.kind = kind_from_name(classifier);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const SemgRecording rec = load_recording(a.in);
  PipelineConfig cfg = pipeline_config(a.f, a.classifier, rec.n_channels());
  cfg.knn_k = a.k;
  cfg.svm.c_reg = a.c_reg;
  cfg.svm.max_iter_factor = a.max_iter_factor;
  cfg.segment.drop_transitions = a.drop_transitions;
  const fs::path path = output_path(a.out);

  Header h("train");
  h.kv("in", a.in)
      .kv("classifier", kind_name(cfg.kind))
      .kv("win", cfg.window.win_size)
      .kv("inc", cfg.window.win_inc)
      .kv("features", join_features(cfg.features))
      .kv("channels", join_channels(cfg.channels))
      .kv("ar_order", cfg.features.ar_order)
      .kv("alpha", cfg.features.threshold_alpha);
  if (cfg.kind == ClassifierKind::KNN) h.kv("k", cfg.knn_k);
  if (cfg.kind == ClassifierKind::SVM) h.kv("c", cfg.svm.c_reg);
  h.kv("out", path.string()).print(out);

  const TrainedModel model = train_pipeline(rec, cfg);
  save_model(model, path);
  out << "columns: " << model.col_meta.size() << '\n';
  out << "wrote model " << path.string() << '\n';
  return kExitOk;
}

struct EvalArgs {
  std::string model;
  std::string in;
  std::string features;
  std::string channels;
  std::string format = "text";
  std::string out;
  bool drop_transitions = false;
};

std::string render_eval_text(const EvaluationResult& r) {
  std::ostringstream os;
  os << "accuracy: " << format_sig6(r.accuracy_pct) << "% (" << r.n_correct << "/" << r.n_total
     << ")\n";
  os << "confusion (rows = truth, columns = predicted):\n";
  std::size_t width = 0;
  for (auto name : kGestureNames) width = std::max(width, name.size());
  std::vector<std::size_t> col_w(kNumGestures);
  for (std::size_t j = 0; j < kNumGestures; ++j) {
    col_w[j] = kGestureNames[j].size();
    for (std::size_t i = 0; i < kNumGestures; ++i) {
      col_w[j] = std::max(col_w[j], std::to_string(r.confusion[i][j]).size());
    }
  }
  const auto pad = [](std::string s, std::size_t w) { return std::string(w - s.size(), ' ') + s; };
  os << std::string(width, ' ');
  for (std::size_t j = 0; j < kNumGestures; ++j) os << "  " << pad(std::string(kGestureNames[j]), col_w[j]);
  os << '\n';
  for (std::size_t i = 0; i < kNumGestures; ++i) {
    os << pad(std::string(kGestureNames[i]), width);
    for (std::size_t j = 0; j < kNumGestures; ++j) {
      os << "  " << pad(std::to_string(r.confusion[i][j]), col_w[j]);
    }
    os << '\n';
  }
  return os.str();
}

std::string render_eval_json(const EvaluationResult& r) {
  nlohmann::json j = {{"format", "emg-report"}, {"version", 1}, {"type", "evaluation"}};
  j["n_correct"] = r.n_correct;
  j["n_total"] = r.n_total;
  j["accuracy_pct"] = r.accuracy_pct;
  j["labels"] = std::vector<std::string>(kGestureNames.begin(), kGestureNames.end());
  nlohmann::json conf = nlohmann::json::array();
  for (const auto& row : r.confusion) conf.push_back(std::vector<std::size_t>(row.begin(), row.end()));
  j["confusion"] = conf;
  return j.dump(1) + "\n";
}

void check_format(const std::string& format) {
  if (format != "text" && format != "json") throw UsageError("--format must be text or json");
}

/// Prints a report, and also writes it when --out is given.
void emit_report(const std::string& text, const std::string& out_flag, std::ostream& out) {
  if (out_flag.empty()) {
    out << text;
    return;
  }
  const fs::path path = output_path(out_flag);
  write_text(path, text);
  out << text;
  out << "wrote report " << path.string() << '\n';
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  check_format(a.format);
  require_file(a.model, "model");
  const TrainedModel model = load_model(a.model);
  const SemgRecording rec = load_recording(a.in);

  // Explicit selections must agree with what the model was trained on.
  if (!a.features.empty()) {
    const FeatureSpec want = parse_features(a.features, model.feature_spec.ar_order,
                                            model.feature_spec.threshold_alpha);
    if (want.enabled != model.feature_spec.enabled) {
      throw Error("feature set mismatch: model uses " + join_features(model.feature_spec) +
                  ", flags request " + join_features(want));
    }
  }
  if (!a.channels.empty()) {
    const ChannelMask want = parse_channels(a.channels, rec.n_channels());
    if (!(want == model.channel_mask)) {
      throw Error("channel mask mismatch: model uses " + join_channels(model.channel_mask) +
                  ", flags request " + join_channels(want));
    }
  }

  Header("eval")
      .kv("model", a.model)
      .kv("in", a.in)
      .kv("classifier", kind_name(model.kind))
      .kv("win", model.window_spec.win_size)
      .kv("inc", model.window_spec.win_inc)
      .kv("features", join_features(model.feature_spec))
      .kv("channels", join_channels(model.channel_mask))
      .kv("format", a.format)
      .print(out);

  SegmentOptions seg;
  seg.drop_transitions = a.drop_transitions;
  const RecordingPrediction pr = predict_recording(model, rec, seg);
  const EvaluationResult r = evaluate(pr.predicted, pr.truth);
  emit_report(a.format == "json" ? render_eval_json(r) : render_eval_text(r), a.out, out);
  return kExitOk;
}

struct StudyArgs {
  std::string train;
  std::string test;
  std::string classifiers = "lda,knn,svm";
  std::string classifier = "svm";
  std::string what = "ssc";
  std::string sizes = "25:120";
  std::string format = "text";
  std::string out;
  std::optional<double> fixed_tau;
  bool serial = false;
  int k = 3;
  double c_reg = 1.0;
  int max_iter_factor = SvmOptions{}.max_iter_factor;
  FeatureArgs f;
};

ExperimentOptions experiment_options(const StudyArgs& a) {
  ExperimentOptions o;
  o.ar_order = a.f.ar_order;
  o.threshold_alpha = a.f.alpha;
  o.knn_k = a.k;
  o.svm.c_reg = a.c_reg;
  o.svm.max_iter_factor = a.max_iter_factor;
  o.parallel = !a.serial;
  o.fixed_tau_ms = a.fixed_tau;
  return o;
}

WindowSpec study_window(const FeatureArgs& f) {
  WindowSpec w{f.win, f.inc};
  try {
    w.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return w;
}

int cmd_ablate(const StudyArgs& a, std::ostream& out) {
  check_format(a.format);
  if (a.what != "ssc" && a.what != "channels") throw UsageError("--what must be ssc or channels");
  const auto kinds = parse_kinds(a.classifiers);
  const WindowSpec w = study_window(a.f);
  const SemgRecording train = load_recording(a.train);
  const SemgRecording test = load_recording(a.test);
  Header("ablate")
      .kv("what", a.what)
      .kv("train", a.train)
      .kv("test", a.test)
      .kv("classifiers", a.classifiers)
      .kv("win", w.win_size)
      .kv("inc", w.win_inc)
      .kv("ar_order", a.f.ar_order)
      .kv("alpha", a.f.alpha)
      .kv("format", a.format)
      .print(out);
  const ExperimentOptions o = experiment_options(a);
  const AblationReport r = a.what == "ssc" ? ssc_ablation(train, test, w, kinds, o)
                                           : channel_ablation(train, test, w, kinds, o);
  emit_report(a.format == "json" ? render_json(r) : render_text(r), a.out, out);
  return kExitOk;
}

int cmd_sweep(const StudyArgs& a, std::ostream& out) {
  check_format(a.format);
  const auto sizes = parse_sizes(a.sizes);
  ClassifierKind kind;
  try {
    kind = kind_from_name(a.classifier);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const SemgRecording train = load_recording(a.train);
  const SemgRecording test = load_recording(a.test);
  Header h("sweep");
  h.kv("train", a.train)
      .kv("test", a.test)
      .kv("classifier", kind_name(kind))
      .kv("sizes", a.sizes)
      .kv("inc", "floor(win/2)");
  if (a.fixed_tau) h.kv("fixed_tau_ms", *a.fixed_tau);
  h.kv("format", a.format).print(out);
  const SweepReport r = window_sweep(train, test, sizes, kind, experiment_options(a));
  emit_report(a.format == "json" ? render_json(r) : render_text(r), a.out, out);
  return kExitOk;
}

int cmd_efficiency(const StudyArgs& a, std::ostream& out) {
  check_format(a.format);
  ClassifierKind kind;
  try {
    kind = kind_from_name(a.classifier);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const WindowSpec w = study_window(a.f);
  const SemgRecording train = load_recording(a.train);
  const SemgRecording test = load_recording(a.test);
  Header("efficiency")
      .kv("train", a.train)
      .kv("test", a.test)
      .kv("classifier", kind_name(kind))
      .kv("win", w.win_size)
      .kv("inc", w.win_inc)
      .kv("format", a.format)
      .print(out);
  const EfficiencyMatrix m = feature_channel_efficiency(train, test, w, kind, experiment_options(a));
  emit_report(a.format == "json" ? render_json(m) : render_text(m), a.out, out);
  return kExitOk;
}

struct StreamArgs {
  std::string model;
  std::string in;
  std::optional<std::uint64_t> synth_seed;
  double realtime = 0.0;
  int vote = 5;
  double latency_limit = 300.0;
  std::optional<double> fixed_tau;
  bool per_decision = false;
  bool strict = false;
  std::string sink;
  std::string trace;
};

int cmd_stream(const StreamArgs& a, std::ostream& out) {
  if (a.in.empty() == !a.synth_seed.has_value()) {
    throw UsageError("stream needs exactly one of --in or --synth-seed");
  }
  require_file(a.model, "model");
  StreamConfig cfg;
  cfg.vote.vote_window = a.vote;
  cfg.realtime_factor = a.realtime;
  cfg.latency_limit_ms = a.latency_limit;
  cfg.fixed_tau_ms = a.fixed_tau;
  cfg.emit_every_decision = a.per_decision;
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const std::optional<fs::path> sink_path =
      a.sink.empty() ? std::nullopt : std::optional(output_path(a.sink));
  const std::optional<fs::path> trace_path =
      a.trace.empty() ? std::nullopt : std::optional(output_path(a.trace));

  const TrainedModel model = load_model(a.model);
  const SemgRecording source = a.synth_seed
                                   ? synth_recording(SessionProtocol{}, SynthConfig::separable(*a.synth_seed))
                                   : load_recording(a.in);

  Header h("stream");
  h.kv("model", a.model);
  if (a.synth_seed) {
    h.kv("synth_seed", *a.synth_seed);
  } else {
    h.kv("in", a.in);
  }
  h.kv("realtime", a.realtime)
      .kv("vote", a.vote)
      .kv("latency_limit_ms", a.latency_limit)
      .kv("emit", a.per_decision ? "every-decision" : "on-change");
  if (a.fixed_tau) h.kv("fixed_tau_ms", *a.fixed_tau);
  if (sink_path) h.kv("sink", sink_path->string());
  if (trace_path) h.kv("trace", trace_path->string());
  h.print(out);

  const PredictionTrace t = run_stream(model, source, cfg);
  if (sink_path) {
    write_text(*sink_path, std::string(t.sink.begin(), t.sink.end()));
  }
  if (trace_path) {
    std::ostringstream os;
    write_trace(t, os);
    write_text(*trace_path, os.str());
  }
  out << "decisions: " << t.decisions.size() << '\n';
  out << "frames: " << t.sink.size() / 3 << '\n';
  out << "max_tau_ms: " << format_sig6(t.max_tau_ms) << '\n';
  out << "max_decision_ms: " << format_sig6(t.max_decision_ms) << '\n';
  out << "latency_violations: " << t.latency_violations << '\n';
  out << "backpressure_events: " << t.backpressure_events << '\n';
  out << "wall_time_s: " << format_sig6(t.wall_time_s) << '\n';
  if (a.strict && t.latency_violations > 0) {
    out << "strict: " << t.latency_violations << " decisions over the latency limit\n";
    return kExitLatency;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"sEMG gesture recognition toolkit", "emgctl"};
  app.set_version_flag("--version", std::string("emgctl ") + kVersion);
  app.require_subcommand(1);

  SynthArgs synth;
  auto* sc_synth = app.add_subcommand("synth", "Write a synthetic emgrec recording");
  sc_synth->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  sc_synth->add_option("--out", synth.out, "Output file")->capture_default_str();
  sc_synth->add_option("--gestures", synth.gestures, "Use the first N gestures (1..7)")
      ->capture_default_str();
  sc_synth->add_option("--reps", synth.reps, "Repetitions per gesture")->capture_default_str();
  sc_synth->add_option("--hold", synth.hold_s, "Hold time per repetition, seconds")
      ->capture_default_str();
  sc_synth->add_option("--rate", synth.rate, "Sample rate, Hz")->capture_default_str();
  sc_synth->add_flag("--blocked", synth.blocked, "Blocked gesture order instead of round-robin");
  sc_synth->add_flag("--no-bookends", synth.no_bookends, "No rest at start and end");
  sc_synth->add_option("--profile", synth.profile, "separable or low-contrast")
      ->capture_default_str();
  sc_synth->add_option("--noise", synth.noise, "Additive noise std (default: 25% of min profile gap)");
  sc_synth->add_option("--burst-hz", synth.burst_hz, "Envelope modulation frequency")
      ->capture_default_str();

  TrainArgs train;
  auto* sc_train = app.add_subcommand("train", "Train a classifier on a recording");
  sc_train->add_option("--in", train.in, "Training recording")->required();
  sc_train->add_option("--out", train.out, "Model file")->capture_default_str();
  sc_train->add_option("--classifier", train.classifier, "lda, knn or svm")->capture_default_str();
  sc_train->add_option("-k", train.k, "KNN neighbours")->capture_default_str();
  sc_train->add_option("--c", train.c_reg, "SVM regularization")->capture_default_str();
  sc_train->add_option("--max-iter-factor", train.max_iter_factor, "SVM iteration cap per row")
      ->capture_default_str();
  sc_train->add_flag("--drop-transitions", train.drop_transitions,
                     "Skip windows spanning a gesture change");
  add_feature_flags(sc_train, train.f, true);

  EvalArgs ev;
  auto* sc_eval = app.add_subcommand("eval", "Evaluate a model on a recording");
  sc_eval->add_option("--model", ev.model, "Model file")->required();
  sc_eval->add_option("--in", ev.in, "Test recording")->required();
  sc_eval->add_option("--features", ev.features, "Expected feature set; must match the model");
  sc_eval->add_option("--channels", ev.channels, "Expected channels; must match the model");
  sc_eval->add_option("--format", ev.format, "text or json")->capture_default_str();
  sc_eval->add_option("--out", ev.out, "Also write the report here");
  sc_eval->add_flag("--drop-transitions", ev.drop_transitions,
                    "Skip windows spanning a gesture change");

  StudyArgs abl;
  auto* sc_ablate = app.add_subcommand("ablate", "SSC or channel ablation study");
  StudyArgs swp;
  auto* sc_sweep = app.add_subcommand("sweep", "Window-length sweep");
  StudyArgs eff;
  auto* sc_eff = app.add_subcommand("efficiency", "Per-channel, per-feature accuracy grid");
  for (auto [sc, a] : {std::pair{sc_ablate, &abl}, std::pair{sc_sweep, &swp}, std::pair{sc_eff, &eff}}) {
    sc->add_option("--train", a->train, "Training recording")->required();
    sc->add_option("--test", a->test, "Test recording")->required();
    sc->add_option("--format", a->format, "text or json")->capture_default_str();
    sc->add_option("--out", a->out, "Also write the report here");
    sc->add_flag("--serial", a->serial, "Run cells one after another");
    sc->add_option("-k", a->k, "KNN neighbours")->capture_default_str();
    sc->add_option("--c", a->c_reg, "SVM regularization")->capture_default_str();
    sc->add_option("--max-iter-factor", a->max_iter_factor, "SVM iteration cap per row")
        ->capture_default_str();
  }
  sc_ablate->add_option("--what", abl.what, "ssc or channels")->capture_default_str();
  sc_ablate->add_option("--classifiers", abl.classifiers, "Comma list of lda,knn,svm")
      ->capture_default_str();
  add_feature_flags(sc_ablate, abl.f, false);
  sc_sweep->add_option("--sizes", swp.sizes, "lo:hi[:step] or comma list")->capture_default_str();
  sc_sweep->add_option("--classifier", swp.classifier, "lda, knn or svm")->capture_default_str();
  sc_sweep->add_option("--fixed-tau", swp.fixed_tau, "Report this processing time (ms)");
  sc_sweep->add_option("--ar-order", swp.f.ar_order, "AR model order")->capture_default_str();
  sc_sweep->add_option("--alpha", swp.f.alpha, "ZC/SSC amplitude threshold")->capture_default_str();
  sc_eff->add_option("--classifier", eff.classifier, "lda, knn or svm")->capture_default_str();
  add_feature_flags(sc_eff, eff.f, false);

  StreamArgs st;
  auto* sc_stream = app.add_subcommand("stream", "Replay a recording through the online pipeline");
  sc_stream->add_option("--model", st.model, "Model file")->required();
  auto* in_opt = sc_stream->add_option("--in", st.in, "Source recording");
  auto* seed_opt = sc_stream->add_option("--synth-seed", st.synth_seed,
                                         "Synthesize the default session with this seed");
  in_opt->excludes(seed_opt);
  sc_stream->add_option("--realtime", st.realtime, "Pacing factor; 0 = as fast as possible")
      ->capture_default_str();
  sc_stream->add_option("--vote", st.vote, "Majority-vote window")->capture_default_str();
  sc_stream->add_option("--latency-limit", st.latency_limit, "Decision latency limit (ms)")
      ->capture_default_str();
  sc_stream->add_option("--fixed-tau", st.fixed_tau, "Report this processing time (ms)");
  sc_stream->add_flag("--per-decision", st.per_decision, "Send a frame for every decision");
  sc_stream->add_flag("--strict", st.strict, "Exit 4 if any decision exceeds the limit");
  sc_stream->add_option("--sink", st.sink, "Serial-sink output file");
  sc_stream->add_option("--trace", st.trace, "Trace output file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sc_synth->parsed()) return cmd_synth(synth, out);
    if (sc_train->parsed()) return cmd_train(train, out);
    if (sc_eval->parsed()) return cmd_eval(ev, out);
    if (sc_ablate->parsed()) return cmd_ablate(abl, out);
    if (sc_sweep->parsed()) return cmd_sweep(swp, out);
    if (sc_eff->parsed()) return cmd_efficiency(eff, out);
    if (sc_stream->parsed()) return cmd_stream(st, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace emg::cli
