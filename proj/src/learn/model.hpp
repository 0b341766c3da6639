#pragma once

#include <optional>
#include <string>
#include <vector>

#include "features/features.hpp"
#include "learn/forest.hpp"
#include "learn/logreg.hpp"

namespace sliceguard::learn {

enum class ModelKind : uint8_t { LR = 0, RF = 1 };

inline const char* model_kind_name(ModelKind k) {
  return k == ModelKind::LR ? "lr" : "rf";
}

// scope: a per-slice model carries its slice; a global model does not.
struct ModelArtifact {
  ModelKind kind = ModelKind::LR;
  std::optional<SliceId> slice;  // nullopt = global
  LRModel lr;
  Forest rf;
  features::NormalizationParams normalization;
  // Training metadata.
  std::string grid_point;
  double cv_f1 = 0.0;
  uint64_t seed = 0;
  std::string dataset_digest;
  double decision_threshold = 0.5;
};

struct Prediction {
  int label = 0;  // 1 = spoofed
  double confidence = 0.0;
};

// Confidence is the spoofed-class probability; label = confidence >= threshold.
Prediction predict(const ModelArtifact& model, const Sample& normalized_x);

// Normalizes with the artifact's stored params, then predicts.
Prediction predict_raw(const ModelArtifact& model, const Sample& raw_x);

// Versioned JSON serialization; round-trips bit-exactly.
std::string model_to_json(const ModelArtifact& model);
ModelArtifact model_from_json(const std::string& json_text);
void save_model(const ModelArtifact& model, const std::string& path);
ModelArtifact load_model(const std::string& path);

std::string dataset_digest(const std::vector<Sample>& X,
                           const std::vector<int>& y);

}  // namespace sliceguard::learn
