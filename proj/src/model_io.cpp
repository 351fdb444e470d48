#include "emg/model_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace emg {

using nlohmann::json;

namespace {

json feature_spec_json(const FeatureSpec& f) {
  json names = json::array();
  for (Feature x : f.enabled) names.push_back(std::string(feature_name(x)));
  return {{"enabled", names}, {"ar_order", f.ar_order}, {"threshold_alpha", f.threshold_alpha}};
}

FeatureSpec feature_spec_from(const json& j) {
  std::vector<Feature> enabled;
  for (const auto& n : j.at("enabled")) enabled.push_back(feature_from_name(n.get<std::string>()));
  return FeatureSpec::make(std::move(enabled), j.at("ar_order").get<int>(),
                           j.at("threshold_alpha").get<double>());
}

json col_meta_json(const std::vector<ColumnMeta>& meta) {
  json arr = json::array();
  for (const auto& m : meta) {
    arr.push_back({{"channel", m.channel},
                   {"feature", std::string(feature_name(m.feature))},
                   {"coeff", m.coeff}});
  }
  return arr;
}

std::vector<ColumnMeta> col_meta_from(const json& arr) {
  std::vector<ColumnMeta> meta;
  for (const auto& m : arr) {
    meta.push_back({m.at("channel").get<int>(),
                    feature_from_name(m.at("feature").get<std::string>()),
                    m.at("coeff").get<int>()});
  }
  return meta;
}

json payload_json(const TrainedModel& model) {
  return std::visit(
      [](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LdaPayload>) {
          return {{"classes", p.classes}, {"means", p.means}, {"weights", p.weights},
                  {"biases", p.biases},   {"log_priors", p.log_priors}, {"ridge", p.ridge}};
        } else if constexpr (std::is_same_v<P, KnnPayload>) {
          return {{"k", p.k}, {"cols", p.cols}, {"rows", p.rows}, {"labels", p.labels}};
        } else {
          json pairs = json::array();
          for (const auto& m : p.pairs) {
            pairs.push_back({{"class_a", m.class_a},
                             {"class_b", m.class_b},
                             {"w", m.w},
                             {"b", m.b},
                             {"iterations", m.iterations}});
          }
          return {{"c_reg", p.c_reg}, {"pairs", pairs}};
        }
      },
      model.payload);
}

}  // namespace

std::string model_to_string(const TrainedModel& model) {
  json j;
  j["format"] = "emg-model";
  j["version"] = kModelFormatVersion;
  j["kind"] = std::string(kind_name(model.kind));
  j["sample_rate_hz"] = model.sample_rate_hz;
  j["window_spec"] = {{"win_size", model.window_spec.win_size},
                      {"win_inc", model.window_spec.win_inc}};
  j["feature_spec"] = feature_spec_json(model.feature_spec);
  j["channel_mask"] = std::vector<int>(model.channel_mask.ids().begin(),
                                       model.channel_mask.ids().end());
  j["col_meta"] = col_meta_json(model.col_meta);
  j["standardizer"] = {{"mean", model.standardizer.mean}, {"stddev", model.standardizer.stddev}};
  j["payload"] = payload_json(model);
  return j.dump(1) + "\n";
}

TrainedModel model_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format") != "emg-model") throw Error("not an emg-model document");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw Error("unsupported model format version " + std::to_string(version));
    }
    TrainedModel m;
    m.kind = kind_from_name(j.at("kind").get<std::string>());
    m.sample_rate_hz = j.at("sample_rate_hz").get<int>();
    m.window_spec = {j.at("window_spec").at("win_size").get<int>(),
                     j.at("window_spec").at("win_inc").get<int>()};
    m.window_spec.validate();
    m.feature_spec = feature_spec_from(j.at("feature_spec"));
    m.channel_mask = ChannelMask(j.at("channel_mask").get<std::vector<int>>());
    m.col_meta = col_meta_from(j.at("col_meta"));
    m.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
    m.standardizer.stddev = j.at("standardizer").at("stddev").get<std::vector<double>>();
    if (m.col_meta != column_layout(m.feature_spec, m.channel_mask) ||
        m.standardizer.mean.size() != m.col_meta.size() ||
        m.standardizer.stddev.size() != m.col_meta.size()) {
      throw Error("model column layout is inconsistent with its feature spec and channel mask");
    }
    const json& p = j.at("payload");
    switch (m.kind) {
      case ClassifierKind::LDA: {
        LdaPayload lda;
        lda.classes = p.at("classes").get<std::vector<int>>();
        lda.means = p.at("means").get<std::vector<std::vector<double>>>();
        lda.weights = p.at("weights").get<std::vector<std::vector<double>>>();
        lda.biases = p.at("biases").get<std::vector<double>>();
        lda.log_priors = p.at("log_priors").get<std::vector<double>>();
        lda.ridge = p.at("ridge").get<double>();
        m.payload = std::move(lda);
        break;
      }
      case ClassifierKind::KNN: {
        KnnPayload knn;
        knn.k = p.at("k").get<int>();
        knn.cols = p.at("cols").get<std::size_t>();
        knn.rows = p.at("rows").get<std::vector<double>>();
        knn.labels = p.at("labels").get<std::vector<int>>();
        if (knn.rows.size() != knn.cols * knn.labels.size()) throw Error("KNN payload shape mismatch");
        m.payload = std::move(knn);
        break;
      }
      case ClassifierKind::SVM: {
        SvmPayload svm;
        svm.c_reg = p.at("c_reg").get<double>();
        for (const auto& pm : p.at("pairs")) {
          svm.pairs.push_back({pm.at("class_a").get<int>(), pm.at("class_b").get<int>(),
                               pm.at("w").get<std::vector<double>>(), pm.at("b").get<double>(),
                               pm.at("iterations").get<int>()});
        }
        m.payload = std::move(svm);
        break;
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model document: ") + e.what());
  }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << model_to_string(model);
  if (!out) throw Error("failed to write model '" + path.string() + "'");
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_string(ss.str());
}

}  // namespace emg
