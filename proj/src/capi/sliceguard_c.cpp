#include "sliceguard.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include <json.hpp>

#include "learn/model.hpp"
#include "pipeline/pipeline.hpp"
#include "serve/detector.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sg_status fail(sg_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

sg_status from_pipeline_status(sliceguard::pipeline::Status s) {
  switch (s) {
    case sliceguard::pipeline::Status::Ok: return SG_OK;
    case sliceguard::pipeline::Status::Usage: return SG_ERR_USAGE;
    case sliceguard::pipeline::Status::Data: return SG_ERR_DATA;
    case sliceguard::pipeline::Status::CheckFailed: return SG_ERR_CHECK;
    default: return SG_ERR_INTERNAL;
  }
}

template <typename Fn>
sg_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const sliceguard::pipeline::PipelineError& e) {
    return fail(from_pipeline_status(e.status()), e.what());
  } catch (const std::invalid_argument& e) {
    return fail(SG_ERR_USAGE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SG_ERR_DATA, e.what());
  } catch (...) {
    return fail(SG_ERR_INTERNAL, "unknown error");
  }
}

sg_status out_string(const std::string& s, char** dst) {
  if (!dst) return SG_OK;
  *dst = dup_string(s);
  return *dst ? SG_OK : fail(SG_ERR_INTERNAL, "out of memory");
}

std::string join_verdicts(const std::vector<sliceguard::serve::VerdictRecord>& vs) {
  std::string out;
  for (const auto& v : vs) {
    out += sliceguard::serve::verdict_to_json(v);
    out += '\n';
  }
  return out;
}

}  // namespace

struct sg_model {
  sliceguard::learn::ModelArtifact artifact;
};

struct sg_detector {
  sliceguard::serve::Detector impl;
};

extern "C" {

const char* sg_last_error(void) { return g_last_error.c_str(); }

void sg_free(char* ptr) { std::free(ptr); }

sg_status sg_run(const char* op, const char* options_json, char** summary_json) {
  if (!op) return fail(SG_ERR_USAGE, "op is NULL");
  return guarded([&]() {
    std::string summary = sliceguard::pipeline::run_op(
        op, options_json ? options_json : "{}");
    return out_string(summary, summary_json);
  });
}

sg_status sg_model_open(const char* path, sg_model** out) {
  if (!path || !out) return fail(SG_ERR_USAGE, "NULL argument");
  *out = nullptr;
  return guarded([&]() {
    auto handle = std::make_unique<sg_model>();
    handle->artifact = sliceguard::learn::load_model(path);
    *out = handle.release();
    return SG_OK;
  });
}

sg_status sg_model_predict(const sg_model* model, const double* features,
                           size_t n_features, int* label, double* confidence) {
  if (!model || !features) return fail(SG_ERR_USAGE, "NULL argument");
  if (n_features != sliceguard::features::kNumFeatures)
    return fail(SG_ERR_USAGE, "expected 12 feature values");
  return guarded([&]() {
    sliceguard::learn::Sample x;
    std::memcpy(x.data(), features, sizeof(double) * x.size());
    auto pred = sliceguard::learn::predict_raw(model->artifact, x);
    if (label) *label = pred.label;
    if (confidence) *confidence = pred.confidence;
    return SG_OK;
  });
}

sg_status sg_model_info(const sg_model* model, char** info_json) {
  if (!model || !info_json) return fail(SG_ERR_USAGE, "NULL argument");
  return guarded([&]() {
    nlohmann::json j;
    j["kind"] = sliceguard::learn::model_kind_name(model->artifact.kind);
    j["scope"] = model->artifact.slice
                     ? sliceguard::slice_name(*model->artifact.slice)
                     : "pooled";
    j["grid_point"] = model->artifact.grid_point;
    j["cv_f1"] = model->artifact.cv_f1;
    j["seed"] = model->artifact.seed;
    j["dataset_digest"] = model->artifact.dataset_digest;
    j["decision_threshold"] = model->artifact.decision_threshold;
    return out_string(j.dump(), info_json);
  });
}

void sg_model_close(sg_model* model) { delete model; }

sg_status sg_detector_create(const char* options_json, sg_detector** out) {
  if (!out) return fail(SG_ERR_USAGE, "NULL argument");
  *out = nullptr;
  return guarded([&]() {
    nlohmann::json j = nlohmann::json::parse(
        options_json && *options_json ? options_json : "{}");
    sliceguard::serve::DetectorConfig cfg;
    cfg.window_len_s = j.value("window_len_s", cfg.window_len_s);
    cfg.grace_ms = j.value("grace_ms", cfg.grace_ms);
    cfg.digest_key = j.value("digest_key", cfg.digest_key);
    *out = new sg_detector{sliceguard::serve::Detector(cfg)};
    return SG_OK;
  });
}

sg_status sg_detector_add_model(sg_detector* detector, const char* model_path) {
  if (!detector || !model_path) return fail(SG_ERR_USAGE, "NULL argument");
  return guarded([&]() {
    detector->impl.add_model(sliceguard::learn::load_model(model_path));
    return SG_OK;
  });
}

sg_status sg_detector_feed_line(sg_detector* detector, const char* line,
                                char** verdict_lines) {
  if (!detector || !line) return fail(SG_ERR_USAGE, "NULL argument");
  return guarded([&]() {
    std::vector<sliceguard::serve::VerdictRecord> verdicts;
    detector->impl.feed_line(line, &verdicts);
    return out_string(join_verdicts(verdicts), verdict_lines);
  });
}

sg_status sg_detector_flush(sg_detector* detector, char** verdict_lines) {
  if (!detector) return fail(SG_ERR_USAGE, "NULL argument");
  return guarded([&]() {
    std::vector<sliceguard::serve::VerdictRecord> verdicts;
    detector->impl.flush(&verdicts);
    return out_string(join_verdicts(verdicts), verdict_lines);
  });
}

sg_status sg_detector_stats(const sg_detector* detector, char** stats_json) {
  if (!detector || !stats_json) return fail(SG_ERR_USAGE, "NULL argument");
  return guarded([&]() {
    return out_string(sliceguard::serve::stats_to_json(detector->impl.stats()),
                      stats_json);
  });
}

void sg_detector_free(sg_detector* detector) { delete detector; }

}  // extern "C"
