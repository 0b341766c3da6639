// Command-line front end; talks to the engine only through the public C API.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sliceguard.h"

namespace {

using nlohmann::json;

int run(const char* op, const json& opts) {
  char* summary = nullptr;
  sg_status rc = sg_run(op, opts.dump().c_str(), &summary);
  if (rc != SG_OK) {
    std::fprintf(stderr, "sliceguard %s: %s\n", op, sg_last_error());
    return static_cast<int>(rc);
  }
  if (summary) {
    std::printf("%s\n", summary);
    sg_free(summary);
  }
  return 0;
}

std::vector<uint64_t> parse_seed_list(const std::string& text) {
  std::vector<uint64_t> seeds;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',') {
      if (!cur.empty()) seeds.push_back(std::stoull(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slice-aware spoofing detection pipeline"};
  app.require_subcommand(1);

  // generate
  std::string out, in, events, prefix, dataset, manifest, out_dir;
  double duration = 240.0, intensity = 0.2, window_len = 2.0;
  double tolerance_ms = 1.0, grace_ms = 100.0, test_fraction = 0.2;
  double imp_share = 0.65, shift_min = 5.0, shift_max = 20.0;
  uint64_t seed = 1;
  bool full_scale = false, no_cv = false, binary = false, no_check = false;
  std::string seeds_text, scope = "per-slice", anon_key, stats_out, windows_out;
  std::vector<std::string> model_paths, slices;

  auto* gen = app.add_subcommand("generate", "synthesize a benign packet capture");
  gen->add_option("--out", out)->required();
  gen->add_option("--duration", duration, "scenario length, seconds");
  gen->add_option("--seed", seed);
  gen->add_option("--slice", slices, "restrict to these slices (repeatable)");
  gen->add_flag("--full-scale", full_scale, "20-minute full-density session");
  gen->add_flag("--binary", binary, "write the compact binary format");

  auto* inj = app.add_subcommand("inject", "inject spoofing attacks into a capture");
  inj->add_option("--in", in)->required();
  inj->add_option("--out", out)->required();
  inj->add_option("--events-out", events)->required();
  inj->add_option("--seed", seed);
  inj->add_option("--intensity", intensity, "fraction of flows attacked");
  inj->add_option("--impersonation-share", imp_share);
  inj->add_option("--replay-shift-min", shift_min);
  inj->add_option("--replay-shift-max", shift_max);

  auto* feat = app.add_subcommand("featurize", "window a capture and extract features");
  feat->add_option("--in", in)->required();
  feat->add_option("--events", events, "attack event log for labeling");
  feat->add_option("--out", out)->required();
  feat->add_option("--windows-out", windows_out, "binary window sidecar");
  feat->add_option("--window-len", window_len, "tumbling window, seconds");
  feat->add_option("--tolerance-ms", tolerance_ms, "label join tolerance");
  feat->add_option("--anonymize-key", anon_key, "digest identifiers with this key");

  auto* train = app.add_subcommand("train", "grid-search and fit detection models");
  train->add_option("--dataset", dataset)->required();
  train->add_option("--out-prefix", prefix)->required();
  train->add_option("--scope", scope, "per-slice or pooled");
  train->add_option("--seed", seed);
  train->add_option("--test-fraction", test_fraction);
  train->add_flag("--no-cv", no_cv, "fixed hyperparameters, skip the grid");

  auto* ev = app.add_subcommand("evaluate", "score models against a dataset");
  ev->add_option("--dataset", dataset)->required();
  ev->add_option("--model", model_paths, "model file (repeatable)")->required();
  ev->add_option("--out", out)->required();

  auto* cmp = app.add_subcommand("compare", "slice-aware vs pooled study");
  cmp->add_option("--out", out)->required();
  cmp->add_option("--seeds", seeds_text, "comma-separated seed list");
  cmp->add_option("--duration", duration);
  cmp->add_option("--intensity", intensity);
  cmp->add_flag("--full-scale", full_scale);
  cmp->add_flag("--no-cv", no_cv);

  auto* sweep = app.add_subcommand("sweep", "window-length / intensity robustness grid");
  sweep->add_option("--out", out)->required();
  sweep->add_option("--seed", seed);
  sweep->add_option("--duration", duration);

  auto* serve = app.add_subcommand("serve", "stream a capture through the detector");
  serve->add_option("--in", in)->required();
  serve->add_option("--model", model_paths, "model file (repeatable)")->required();
  serve->add_option("--out", out, "verdict JSON lines")->required();
  serve->add_option("--stats-out", stats_out);
  serve->add_option("--window-len", window_len);
  serve->add_option("--grace-ms", grace_ms);

  auto* report = app.add_subcommand("report", "full study bundle into a directory");
  report->add_option("--out-dir", out_dir)->required();
  report->add_option("--seeds", seeds_text);
  report->add_option("--duration", duration);
  report->add_option("--intensity", intensity);
  report->add_flag("--full-scale", full_scale);
  report->add_flag("--no-cv", no_cv);

  auto* repro = app.add_subcommand("repro", "re-run a manifest and verify digests");
  repro->add_option("--manifest", manifest)->required();
  repro->add_flag("--no-check", no_check, "re-run without verifying digests");

  CLI11_PARSE(app, argc, argv);

  json opts;
  if (gen->parsed()) {
    opts["out"] = out;
    if (gen->count("--duration")) opts["duration_s"] = duration;
    if (gen->count("--seed")) opts["seed"] = seed;
    if (!slices.empty()) opts["slices"] = slices;
    if (full_scale) opts["full_scale"] = true;
    if (binary) opts["binary"] = true;
    return run("generate", opts);
  }
  if (inj->parsed()) {
    opts["in"] = in;
    opts["out"] = out;
    opts["events_out"] = events;
    if (inj->count("--seed")) opts["seed"] = seed;
    if (inj->count("--intensity")) opts["intensity"] = intensity;
    if (inj->count("--impersonation-share")) opts["impersonation_share"] = imp_share;
    if (inj->count("--replay-shift-min")) opts["replay_shift_min_s"] = shift_min;
    if (inj->count("--replay-shift-max")) opts["replay_shift_max_s"] = shift_max;
    return run("inject", opts);
  }
  if (feat->parsed()) {
    opts["in"] = in;
    opts["out"] = out;
    if (!events.empty()) opts["events"] = events;
    if (!windows_out.empty()) opts["windows_out"] = windows_out;
    if (feat->count("--window-len")) opts["window_len_s"] = window_len;
    if (feat->count("--tolerance-ms")) opts["tolerance_ms"] = tolerance_ms;
    if (!anon_key.empty()) opts["anonymize_key"] = anon_key;
    return run("featurize", opts);
  }
  if (train->parsed()) {
    opts["dataset"] = dataset;
    opts["out_prefix"] = prefix;
    opts["scope"] = scope;
    if (train->count("--seed")) opts["seed"] = seed;
    if (train->count("--test-fraction")) opts["test_fraction"] = test_fraction;
    if (no_cv) opts["full_cv"] = false;
    return run("train", opts);
  }
  if (ev->parsed()) {
    opts["dataset"] = dataset;
    opts["models"] = model_paths;
    opts["out"] = out;
    return run("evaluate", opts);
  }
  if (cmp->parsed()) {
    opts["out"] = out;
    if (!seeds_text.empty()) opts["seeds"] = parse_seed_list(seeds_text);
    if (cmp->count("--duration")) opts["duration_s"] = duration;
    if (cmp->count("--intensity")) opts["intensity"] = intensity;
    if (full_scale) opts["full_scale"] = true;
    if (no_cv) opts["full_cv"] = false;
    return run("compare", opts);
  }
  if (sweep->parsed()) {
    opts["out"] = out;
    if (sweep->count("--seed")) opts["seed"] = seed;
    if (sweep->count("--duration")) opts["duration_s"] = duration;
    return run("sweep", opts);
  }
  if (serve->parsed()) {
    opts["in"] = in;
    opts["models"] = model_paths;
    opts["out"] = out;
    if (!stats_out.empty()) opts["stats_out"] = stats_out;
    if (serve->count("--window-len")) opts["window_len_s"] = window_len;
    if (serve->count("--grace-ms")) opts["grace_ms"] = grace_ms;
    return run("serve", opts);
  }
  if (report->parsed()) {
    opts["out_dir"] = out_dir;
    if (!seeds_text.empty()) opts["seeds"] = parse_seed_list(seeds_text);
    if (report->count("--duration")) opts["duration_s"] = duration;
    if (report->count("--intensity")) opts["intensity"] = intensity;
    if (full_scale) opts["full_scale"] = true;
    if (no_cv) opts["full_cv"] = false;
    return run("report", opts);
  }
  if (repro->parsed()) {
    opts["manifest"] = manifest;
    if (no_check) opts["check"] = false;
    return run("repro", opts);
  }
  return 1;
}
