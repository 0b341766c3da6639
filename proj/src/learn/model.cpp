#include "learn/model.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sliceguard::learn {

using nlohmann::json;

Prediction predict(const ModelArtifact& model, const Sample& x) {
  double conf = model.kind == ModelKind::LR ? lr_predict_proba(model.lr, x)
                                            : rf_predict_proba(model.rf, x);
  return {conf >= model.decision_threshold ? 1 : 0, conf};
}

Prediction predict_raw(const ModelArtifact& model, const Sample& raw_x) {
  features::FeatureVector fv;
  fv.values = raw_x;
  Sample norm = features::normalize_apply(model.normalization, fv).values;
  return predict(model, norm);
}

std::string model_to_json(const ModelArtifact& m) {
  json j;
  j["format"] = "sliceguard-model";
  j["version"] = 1;
  j["kind"] = model_kind_name(m.kind);
  j["scope"] = m.slice ? slice_name(*m.slice) : "global";
  j["threshold"] = m.decision_threshold;
  j["normalization"] = {{"min", m.normalization.min}, {"max", m.normalization.max}};
  j["meta"] = {{"grid_point", m.grid_point},
               {"cv_f1", m.cv_f1},
               {"seed", m.seed},
               {"dataset_digest", m.dataset_digest}};
  if (m.kind == ModelKind::LR) {
    j["lr"] = {{"weights", m.lr.weights}, {"bias", m.lr.bias}};
  } else {
    json trees = json::array();
    for (const auto& tree : m.rf.trees) {
      json nodes = json::array();
      for (const auto& nd : tree.nodes) {
        nodes.push_back({nd.feature, nd.threshold, nd.left, nd.right,
                         nd.prob_spoofed, nd.n_samples});
      }
      trees.push_back(std::move(nodes));
    }
    j["rf"] = {{"trees", std::move(trees)},
               {"importance_raw", m.rf.importance_raw}};
  }
  return j.dump();
}

ModelArtifact model_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.value("format", "") != "sliceguard-model" || j.value("version", 0) != 1)
    throw std::runtime_error("model file: unknown format/version");

  ModelArtifact m;
  m.kind = j.at("kind").get<std::string>() == "lr" ? ModelKind::LR : ModelKind::RF;
  std::string scope = j.at("scope").get<std::string>();
  if (scope != "global") m.slice = slice_from_name(scope);
  m.decision_threshold = j.at("threshold").get<double>();
  for (int f = 0; f < features::kNumFeatures; ++f) {
    m.normalization.min[f] = j["normalization"]["min"][f].get<double>();
    m.normalization.max[f] = j["normalization"]["max"][f].get<double>();
  }
  m.grid_point = j["meta"].value("grid_point", "");
  m.cv_f1 = j["meta"].value("cv_f1", 0.0);
  m.seed = j["meta"].value("seed", uint64_t{0});
  m.dataset_digest = j["meta"].value("dataset_digest", "");

  if (m.kind == ModelKind::LR) {
    for (int f = 0; f < features::kNumFeatures; ++f)
      m.lr.weights[f] = j["lr"]["weights"][f].get<double>();
    m.lr.bias = j["lr"]["bias"].get<double>();
  } else {
    for (const auto& jt : j["rf"]["trees"]) {
      DecisionTree tree;
      for (const auto& jn : jt) {
        TreeNode nd;
        nd.feature = jn[0].get<int>();
        nd.threshold = jn[1].get<double>();
        nd.left = jn[2].get<int>();
        nd.right = jn[3].get<int>();
        nd.prob_spoofed = jn[4].get<double>();
        nd.n_samples = jn[5].get<uint32_t>();
        tree.nodes.push_back(nd);
      }
      m.rf.trees.push_back(std::move(tree));
    }
    for (int f = 0; f < features::kNumFeatures; ++f)
      m.rf.importance_raw[f] = j["rf"]["importance_raw"][f].get<double>();
  }
  return m;
}

void save_model(const ModelArtifact& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << model_to_json(model) << "\n";
}

ModelArtifact load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

std::string dataset_digest(const std::vector<Sample>& X,
                           const std::vector<int>& y) {
  // FNV-1a over the raw bytes of samples and labels.
  uint64_t h = 1469598103934665603ULL;
  auto mix_bytes = [&h](const void* p, size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& s : X) mix_bytes(s.data(), sizeof(double) * s.size());
  for (int v : y) mix_bytes(&v, sizeof(v));
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sliceguard::learn
