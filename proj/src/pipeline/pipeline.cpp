#include "pipeline/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "eval/experiments.hpp"
#include "io/stream_io.hpp"
#include "serve/detector.hpp"

namespace sliceguard::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json parse_opts(const std::string& text, const std::set<std::string>& allowed) {
  json j;
  try {
    j = json::parse(text.empty() ? "{}" : text);
  } catch (const json::exception& e) {
    throw PipelineError(Status::Usage, std::string("bad options JSON: ") + e.what());
  }
  if (!j.is_object())
    throw PipelineError(Status::Usage, "options must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key))
      throw PipelineError(Status::Usage, "unknown option: " + key);
  }
  return j;
}

std::string require_string(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_string())
    throw PipelineError(Status::Usage, "missing required option: " + key);
  return j[key].get<std::string>();
}

std::vector<SliceId> parse_slices(const json& j) {
  std::vector<SliceId> slices = {SliceId::eMBB, SliceId::URLLC, SliceId::mMTC};
  if (!j.contains("slices")) return slices;
  slices.clear();
  for (const auto& name : j["slices"]) {
    try {
      slices.push_back(slice_from_name(name.get<std::string>()));
    } catch (const std::exception& e) {
      throw PipelineError(Status::Usage, e.what());
    }
  }
  if (slices.empty()) throw PipelineError(Status::Usage, "empty slice list");
  return slices;
}

// Shared scenario defaults; full_scale restores the full-length session.
eval::CampaignConfig campaign_from(const json& j) {
  eval::CampaignConfig cfg;
  bool full = j.value("full_scale", false);
  if (full) {
    cfg.duration_s = 1200.0;
    cfg.density = sim::DensityConfig{};
    cfg.replay_shift_max_s = 60.0;
  }
  cfg.duration_s = j.value("duration_s", cfg.duration_s);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.intensity = j.value("intensity", cfg.intensity);
  cfg.window_len_s = j.value("window_len_s", cfg.window_len_s);
  cfg.label_tolerance_ms = j.value("tolerance_ms", cfg.label_tolerance_ms);
  cfg.impersonation_share = j.value("impersonation_share", cfg.impersonation_share);
  cfg.replay_shift_min_s = j.value("replay_shift_min_s", cfg.replay_shift_min_s);
  cfg.replay_shift_max_s = j.value("replay_shift_max_s", cfg.replay_shift_max_s);
  cfg.slices = parse_slices(j);
  if (cfg.duration_s <= 0 || cfg.duration_s > 7200)
    throw PipelineError(Status::Usage, "duration_s out of range (0, 7200]");
  if (!(cfg.intensity > 0 && cfg.intensity <= 1))
    throw PipelineError(Status::Usage, "intensity out of range (0, 1]");
  return cfg;
}

uint64_t fnv1a(const char* data, size_t len, uint64_t h = 0xcbf29ce484222325ULL) {
  for (size_t i = 0; i < len; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  if (auto dir = fs::path(path).parent_path(); !dir.empty())
    fs::create_directories(dir);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PipelineError(Status::Data, "cannot write " + path);
  out << text;
  if (!out) throw PipelineError(Status::Data, "short write to " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PipelineError(Status::Data, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Verdict files carry a wall-clock latency field; strip it so the manifest
// digest only covers the deterministic content.
std::string verdicts_canonical_digest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PipelineError(Status::Data, "cannot read " + path);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    json v = json::parse(line);
    v.erase("lat_us");
    std::string canon = v.dump();
    h = fnv1a(canon.data(), canon.size(), h);
    h = fnv1a("\n", 1, h);
  }
  return hex64(h);
}

struct ManifestOutput {
  std::string path;
  std::string digest;
  bool canonical = false;  // digest over lat-stripped verdict lines
};

void write_manifest(const std::string& op, const json& opts,
                    const std::vector<ManifestOutput>& outputs,
                    const std::string& manifest_path) {
  json m;
  m["format"] = "sliceguard-manifest";
  m["version"] = 1;
  m["op"] = op;
  m["options"] = opts;
  m["outputs"] = json::array();
  for (const auto& o : outputs) {
    json e;
    e["path"] = o.path;
    e["digest"] = o.digest;
    e["canonical"] = o.canonical;
    m["outputs"].push_back(e);
  }
  write_text_file(manifest_path, m.dump(2) + "\n");
}

std::string default_manifest_path(const std::string& primary_output) {
  return primary_output + ".manifest.json";
}

ManifestOutput raw_output(const std::string& path) {
  return {path, file_digest(path), false};
}

ManifestOutput verdict_output(const std::string& path) {
  return {path, verdicts_canonical_digest(path), true};
}

json metrics_json(const eval::MetricsRecord& m) {
  json j;
  j["accuracy"] = m.accuracy;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["auc"] = m.auc;
  j["fpr"] = m.fpr;
  j["fnr"] = m.fnr;
  j["tp"] = m.tp;
  j["fp"] = m.fp;
  j["tn"] = m.tn;
  j["fn"] = m.fn;
  return j;
}

std::vector<learn::ModelArtifact> load_models(const json& opts) {
  if (!opts.contains("models") || !opts["models"].is_array() ||
      opts["models"].empty())
    throw PipelineError(Status::Usage, "models: non-empty array required");
  std::vector<learn::ModelArtifact> models;
  for (const auto& p : opts["models"]) {
    try {
      models.push_back(learn::load_model(p.get<std::string>()));
    } catch (const std::exception& e) {
      throw PipelineError(Status::Data, std::string("cannot load model: ") + e.what());
    }
  }
  return models;
}

std::vector<features::FeatureVector> load_dataset_checked(const std::string& path) {
  try {
    return io::read_dataset(path);
  } catch (const std::exception& e) {
    throw PipelineError(Status::Data, std::string("cannot read dataset: ") + e.what());
  }
}

std::string slice_tag(std::optional<SliceId> s) {
  return s ? slice_name(*s) : "pooled";
}

}  // namespace

std::string file_digest(const std::string& path) {
  std::string bytes = read_text_file(path);
  return hex64(fnv1a(bytes.data(), bytes.size()));
}

std::string op_generate(const std::string& opts_json) {
  auto opts = parse_opts(opts_json,
                         {"out", "manifest", "duration_s", "seed", "slices",
                          "full_scale", "binary"});
  std::string out = require_string(opts, "out");
  auto cfg = campaign_from(opts);

  sim::SimConfig scfg;
  scfg.duration_s = cfg.duration_s;
  scfg.seed = cfg.seed;
  scfg.density = cfg.density;
  {
    auto all = sim::build_default_profiles();
    for (const auto& p : all)
      if (std::find(cfg.slices.begin(), cfg.slices.end(), p.slice_id) !=
          cfg.slices.end())
        scfg.profiles.push_back(p);
  }
  auto stream = sim::generate_scenario(scfg);

  if (auto dir = fs::path(out).parent_path(); !dir.empty())
    fs::create_directories(dir);
  try {
    if (opts.value("binary", out.size() > 4 && out.ends_with(".bin")))
      io::write_packets_binary(stream, out);
    else
      io::write_packets_text(stream, out);
  } catch (const std::exception& e) {
    throw PipelineError(Status::Data, e.what());
  }

  write_manifest("generate", opts, {raw_output(out)},
                 opts.value("manifest", default_manifest_path(out)));
  json summary;
  summary["packets"] = stream.size();
  summary["duration_s"] = cfg.duration_s;
  summary["seed"] = cfg.seed;
  summary["out"] = out;
  return summary.dump();
}

std::string op_inject(const std::string& opts_json) {
  auto opts = parse_opts(opts_json,
                         {"in", "out", "events_out", "manifest", "seed",
                          "intensity", "impersonation_share", "slices",
                          "replay_shift_min_s", "replay_shift_max_s", "binary"});
  std::string in = require_string(opts, "in");
  std::string out = require_string(opts, "out");
  std::string events_out = require_string(opts, "events_out");

  std::vector<PacketRecord> benign;
  try {
    benign = io::read_packets(in);
  } catch (const std::exception& e) {
    throw PipelineError(Status::Data, e.what());
  }

  double intensity = opts.value("intensity", 0.20);
  double share = opts.value("impersonation_share", 0.65);
  uint64_t seed = opts.value("seed", 1);
  if (!(intensity > 0 && intensity <= 1))
    throw PipelineError(Status::Usage, "intensity out of range (0, 1]");
  if (share < 0 || share > 1)
    throw PipelineError(Status::Usage, "impersonation_share out of range [0, 1]");

  std::vector<PacketRecord> merged = benign;
  std::vector<attack::AttackEvent> events;
  try {
    if (intensity * share > 0) {
      attack::AttackConfig icfg;
      icfg.strategy = attack::Strategy::IdentityImpersonation;
      icfg.intensity = intensity * share;
      icfg.seed = Rng::splitmix(seed ^ 0xa11ull);
      auto r = attack::inject(benign, icfg);
      merged = std::move(r.stream);
      events = std::move(r.events);
    }
    if (intensity * (1 - share) > 0) {
      attack::AttackConfig rcfg;
      rcfg.strategy = attack::Strategy::Replay;
      rcfg.intensity = intensity * (1 - share);
      rcfg.seed = Rng::splitmix(seed ^ 0xb22ull);
      rcfg.replay_shift_min_s = opts.value("replay_shift_min_s", 5.0);
      rcfg.replay_shift_max_s = opts.value("replay_shift_max_s", 20.0);
      auto r = attack::inject(benign, rcfg,
                              static_cast<uint32_t>(events.size()) + 1);
      for (auto& p : r.stream)
        if (p.label == PacketLabel::Replayed) merged.push_back(std::move(p));
      for (auto& ev : r.events) events.push_back(std::move(ev));
      std::stable_sort(merged.begin(), merged.end(),
                       [](const PacketRecord& a, const PacketRecord& b) {
                         return a.ts_us < b.ts_us;
                       });
    }
    if (opts.value("binary", out.size() > 4 && out.ends_with(".bin")))
      io::write_packets_binary(merged, out);
    else
      io::write_packets_text(merged, out);
    io::write_events(events, events_out);
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(Status::Data, e.what());
  }

  write_manifest("inject", opts, {raw_output(out), raw_output(events_out)},
                 opts.value("manifest", default_manifest_path(out)));
  json summary;
  summary["packets"] = merged.size();
  summary["events"] = events.size();
  summary["attack_packets"] = merged.size() - benign.size();
  return summary.dump();
}

std::string op_featurize(const std::string& opts_json) {
  auto opts = parse_opts(opts_json,
                         {"in", "events", "out", "windows_out", "manifest",
                          "window_len_s", "tolerance_ms", "anonymize_key"});
  std::string in = require_string(opts, "in");
  std::string out = require_string(opts, "out");

  std::vector<PacketRecord> packets;
  std::vector<attack::AttackEvent> events;
  try {
    packets = io::read_packets(in);
    if (opts.contains("events"))
      events = io::read_events(opts["events"].get<std::string>());
  } catch (const std::exception& e) {
    throw PipelineError(Status::Data, e.what());
  }

  double window_len_s = opts.value("window_len_s", 2.0);
  double tolerance_ms = opts.value("tolerance_ms", 1.0);

  std::vector<flow::FlowWindow> windows;
  flow::LabelJoinReport join;
  try {
    windows = flow::aggregate(packets, window_len_s);
    join = flow::join_labels(windows, events, tolerance_ms);
    if (opts.contains("anonymize_key"))
      flow::anonymize(windows, opts["anonymize_key"].get<std::string>());
  } catch (const std::exception& e) {
    throw PipelineError(Status::Data, e.what());
  }
  auto dataset = features::extract_all(windows);

  std::vector<ManifestOutput> outputs;
  try {
    io::write_dataset(dataset, out);
    outputs.push_back(raw_output(out));
    if (opts.contains("windows_out")) {
      std::string wout = opts["windows_out"].get<std::string>();
      io::write_windows_sidecar(windows, wout);
      outputs.push_back(raw_output(wout));
    }
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(Status::Data, e.what());
  }

  write_manifest("featurize", opts, outputs,
                 opts.value("manifest", default_manifest_path(out)));
  json summary;
  summary["windows"] = windows.size();
  summary["spoofed"] = join.labeled_spoofed;
  summary["benign"] = join.labeled_benign;
  summary["ambiguous"] = join.ambiguous;
  summary["labeling_accuracy_estimate"] = join.labeling_accuracy_estimate;
  return summary.dump();
}

std::string op_train(const std::string& opts_json) {
  auto opts = parse_opts(opts_json,
                         {"dataset", "out_prefix", "manifest", "scope", "seed",
                          "full_cv", "test_fraction"});
  std::string dataset_path = require_string(opts, "dataset");
  std::string prefix = require_string(opts, "out_prefix");
  std::string scope = opts.value("scope", "per-slice");
  uint64_t seed = opts.value("seed", 1);
  bool full_cv = opts.value("full_cv", true);
  double test_fraction = opts.value("test_fraction", 0.2);
  if (scope != "per-slice" && scope != "pooled")
    throw PipelineError(Status::Usage, "scope must be per-slice or pooled");

  auto dataset = load_dataset_checked(dataset_path);
  eval::TrainTestSplit split;
  try {
    split = eval::split_dataset(dataset, test_fraction, seed);
  } catch (const std::exception& e) {
    throw PipelineError(Status::Data, e.what());
  }

  std::vector<ManifestOutput> outputs;
  json summary;
  summary["models"] = json::array();
  try {
    std::vector<eval::ModelPair> pairs;
    if (scope == "per-slice") {
      for (auto& [slice, pair] : eval::train_slice_models(split.train, seed, full_cv))
        pairs.push_back(std::move(pair));
    } else {
      pairs.push_back(eval::train_pooled_models(split.train, seed, full_cv));
    }
    for (const auto& pair : pairs) {
      for (const auto* art : {&pair.lr, &pair.rf}) {
        std::string path = prefix + "_" + model_kind_name(art->kind) + "_" +
                           slice_tag(art->slice) + ".json";
        learn::save_model(*art, path);
        outputs.push_back(raw_output(path));
        auto outcome = eval::evaluate_model(*art, split.test);
        json e;
        e["path"] = path;
        e["kind"] = model_kind_name(art->kind);
        e["scope"] = slice_tag(art->slice);
        e["grid_point"] = art->grid_point;
        e["cv_f1"] = art->cv_f1;
        e["holdout"] = metrics_json(outcome.metrics);
        summary["models"].push_back(e);
      }
    }
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(Status::Data, e.what());
  }

  std::string metrics_path = prefix + "_holdout.json";
  write_text_file(metrics_path, summary.dump(2) + "\n");
  outputs.push_back(raw_output(metrics_path));
  write_manifest("train", opts, outputs,
                 opts.value("manifest", default_manifest_path(metrics_path)));
  summary["holdout_metrics"] = metrics_path;
  return summary.dump();
}

std::string op_evaluate(const std::string& opts_json) {
  auto opts = parse_opts(opts_json, {"dataset", "models", "out", "manifest"});
  std::string dataset_path = require_string(opts, "dataset");
  std::string out = require_string(opts, "out");
  auto dataset = load_dataset_checked(dataset_path);
  auto models = load_models(opts);

  json result;
  result["dataset"] = dataset_path;
  result["evaluations"] = json::array();
  for (const auto& model : models) {
    eval::EvalOutcome outcome;
    try {
      outcome = eval::evaluate_model(model, dataset);
    } catch (const std::exception& e) {
      throw PipelineError(Status::Data, e.what());
    }
    json e;
    e["kind"] = model_kind_name(model.kind);
    e["scope"] = slice_tag(model.slice);
    e["metrics"] = metrics_json(outcome.metrics);
    e["roc"] = json::array();
    for (auto [fpr, tpr] : outcome.roc.points) e["roc"].push_back({fpr, tpr});
    result["evaluations"].push_back(e);
  }
  write_text_file(out, result.dump(2) + "\n");
  write_manifest("evaluate", opts, {raw_output(out)},
                 opts.value("manifest", default_manifest_path(out)));
  return result.dump();
}

std::string op_compare(const std::string& opts_json) {
  auto opts = parse_opts(opts_json,
                         {"out", "manifest", "seeds", "duration_s", "intensity",
                          "window_len_s", "slices", "full_scale", "full_cv",
                          "impersonation_share", "replay_shift_min_s",
                          "replay_shift_max_s", "tolerance_ms", "seed"});
  std::string out = require_string(opts, "out");
  auto base = campaign_from(opts);
  std::vector<uint64_t> seeds = {1, 2, 3};
  if (opts.contains("seeds")) {
    seeds.clear();
    for (const auto& s : opts["seeds"]) seeds.push_back(s.get<uint64_t>());
    if (seeds.empty()) throw PipelineError(Status::Usage, "empty seed list");
  }

  eval::ComparisonResult cmp;
  try {
    cmp = eval::compare_slice_aware_vs_pooled(base, seeds,
                                              opts.value("full_cv", true));
  } catch (const std::exception& e) {
    throw PipelineError(Status::Data, e.what());
  }

  json result;
  result["cells"] = json::array();
  for (const auto& c : cmp.cells) {
    json e;
    e["slice"] = slice_name(c.slice);
    e["seed"] = c.seed;
    e["slice_aware_mean_f1"] = c.aware_mean_f1;
    e["pooled_mean_f1"] = c.pooled_mean_f1;
    result["cells"].push_back(e);
  }
  result["mean_gain_pp"] = cmp.mean_gain_pp;
  result["t_statistic"] = cmp.ttest.t_statistic;
  result["p_value"] = cmp.ttest.p_value;
  result["significant"] = cmp.ttest.significant;
  result["aware_wins_every_slice"] = cmp.aware_wins_every_slice;
  write_text_file(out, result.dump(2) + "\n");
  write_manifest("compare", opts, {raw_output(out)},
                 opts.value("manifest", default_manifest_path(out)));
  return result.dump();
}

std::string op_sweep(const std::string& opts_json) {
  auto opts = parse_opts(opts_json,
                         {"out", "manifest", "seed", "duration_s", "slices",
                          "window_lens", "intensities", "full_scale",
                          "impersonation_share"});
  std::string out = require_string(opts, "out");
  auto base = campaign_from(opts);
  std::vector<double> wins = {1.0, 2.0, 3.0, 4.0};
  std::vector<double> intensities = {0.1, 0.2, 0.4};
  if (opts.contains("window_lens")) {
    wins.clear();
    for (const auto& w : opts["window_lens"]) wins.push_back(w.get<double>());
  }
  if (opts.contains("intensities")) {
    intensities.clear();
    for (const auto& i : opts["intensities"]) intensities.push_back(i.get<double>());
  }
  if (wins.empty() || intensities.empty())
    throw PipelineError(Status::Usage, "empty sweep axis");

  eval::SweepResult sweep;
  try {
    sweep = eval::robustness_sweep(base, wins, intensities);
  } catch (const std::exception& e) {
    throw PipelineError(Status::Data, e.what());
  }

  json result;
  result["cells"] = json::array();
  for (const auto& c : sweep.cells) {
    json e;
    e["window_len_s"] = c.window_len_s;
    e["intensity"] = c.intensity;
    e["mean_rf_f1"] = c.mean_rf_f1;
    for (const auto& [slice, f1] : c.per_slice_f1) e[slice_name(slice)] = f1;
    result["cells"].push_back(e);
  }
  result["spread_pp"] = sweep.spread_pp;
  write_text_file(out, result.dump(2) + "\n");
  write_manifest("sweep", opts, {raw_output(out)},
                 opts.value("manifest", default_manifest_path(out)));
  return result.dump();
}

std::string op_serve(const std::string& opts_json) {
  auto opts = parse_opts(opts_json,
                         {"in", "models", "out", "stats_out", "manifest",
                          "window_len_s", "grace_ms", "digest_key"});
  std::string in = require_string(opts, "in");
  std::string out = require_string(opts, "out");
  auto models = load_models(opts);

  serve::DetectorConfig dcfg;
  dcfg.window_len_s = opts.value("window_len_s", 2.0);
  dcfg.grace_ms = opts.value("grace_ms", 100.0);
  dcfg.digest_key = opts.value("digest_key", std::string("sliceguard"));
  serve::Detector detector(dcfg);
  for (auto& m : models) detector.add_model(std::move(m));

  std::vector<PacketRecord> packets;
  try {
    packets = io::read_packets(in);
  } catch (const std::exception& e) {
    throw PipelineError(Status::Data, e.what());
  }

  if (auto dir = fs::path(out).parent_path(); !dir.empty())
    fs::create_directories(dir);
  std::ofstream vout(out, std::ios::binary);
  if (!vout) throw PipelineError(Status::Data, "cannot write " + out);

  std::vector<serve::VerdictRecord> verdicts;
  for (const auto& pkt : packets) {
    detector.feed(pkt, &verdicts);
    for (const auto& v : verdicts) vout << verdict_to_json(v) << "\n";
    verdicts.clear();
  }
  detector.flush(&verdicts);
  for (const auto& v : verdicts) vout << verdict_to_json(v) << "\n";
  vout.close();

  auto stats = detector.stats();
  std::string stats_text = serve::stats_to_json(stats);
  std::vector<ManifestOutput> outputs = {verdict_output(out)};
  if (opts.contains("stats_out")) {
    write_text_file(opts["stats_out"].get<std::string>(), stats_text + "\n");
  }
  write_manifest("serve", opts, outputs,
                 opts.value("manifest", default_manifest_path(out)));
  return stats_text;
}

std::string op_report(const std::string& opts_json) {
  auto opts = parse_opts(opts_json,
                         {"out_dir", "manifest", "seeds", "duration_s",
                          "intensity", "full_scale", "slices", "full_cv"});
  std::string out_dir = require_string(opts, "out_dir");
  fs::create_directories(out_dir);
  auto base = campaign_from(opts);
  bool full_cv = opts.value("full_cv", true);
  std::vector<uint64_t> seeds = {1, 2, 3};
  if (opts.contains("seeds")) {
    seeds.clear();
    for (const auto& s : opts["seeds"]) seeds.push_back(s.get<uint64_t>());
    if (seeds.empty()) throw PipelineError(Status::Usage, "empty seed list");
  }

  struct SeedRun {
    uint64_t seed;
    eval::Campaign campaign;
    eval::TrainTestSplit split;
    std::map<SliceId, eval::ModelPair> models;
  };
  std::vector<SeedRun> runs;
  try {
    for (uint64_t seed : seeds) {
      SeedRun run;
      run.seed = seed;
      auto cfg = base;
      cfg.seed = seed;
      run.campaign = eval::run_campaign(cfg);
      run.split = eval::split_dataset(run.campaign.dataset, 0.2, seed);
      run.models = eval::train_slice_models(run.split.train, seed, full_cv);
      runs.push_back(std::move(run));
    }
  } catch (const std::exception& e) {
    throw PipelineError(Status::Data, e.what());
  }

  std::vector<ManifestOutput> outputs;
  std::ostringstream text;
  text << "slice spoofing detection study, desk scale\n";
  text << "seeds:";
  for (uint64_t s : seeds) text << " " << s;
  text << "; duration " << base.duration_s << " s; intensity " << base.intensity
       << "\n\n";

  // Per-slice metrics table across seeds.
  json table;
  table["per_seed"] = json::array();
  std::map<std::string, std::vector<double>> f1_acc;
  for (auto& run : runs) {
    for (auto& [slice, pair] : run.models) {
      for (const auto* art : {&pair.lr, &pair.rf}) {
        auto outcome = eval::evaluate_model(*art, run.split.test);
        json e;
        e["seed"] = run.seed;
        e["slice"] = slice_name(slice);
        e["model"] = model_kind_name(art->kind);
        e["metrics"] = metrics_json(outcome.metrics);
        table["per_seed"].push_back(e);
        f1_acc[std::string(slice_name(slice)) + "/" + model_kind_name(art->kind)]
            .push_back(outcome.metrics.f1);
      }
    }
  }
  json means;
  text << "mean F1 over seeds\n";
  for (const auto& [key, f1s] : f1_acc) {
    double m = 0;
    for (double f : f1s) m += f;
    m /= static_cast<double>(f1s.size());
    means[key] = m;
    text << "  " << key << ": " << m << "\n";
  }
  table["mean_f1"] = means;
  {
    std::string path = out_dir + "/metrics_table.json";
    write_text_file(path, table.dump(2) + "\n");
    outputs.push_back(raw_output(path));
  }

  // ROC points per slice (first seed, RF).
  {
    json roc;
    for (auto& [slice, pair] : runs.front().models) {
      auto outcome = eval::evaluate_model(pair.rf, runs.front().split.test);
      json pts = json::array();
      for (auto [fpr, tpr] : outcome.roc.points) pts.push_back({fpr, tpr});
      roc[slice_name(slice)] = pts;
    }
    std::string path = out_dir + "/roc.json";
    write_text_file(path, roc.dump(2) + "\n");
    outputs.push_back(raw_output(path));
  }

  // RF feature importances per slice (first seed).
  {
    json imp;
    for (auto& [slice, pair] : runs.front().models) {
      auto values = learn::feature_importance(pair.rf.rf);
      json e;
      for (int f = 0; f < features::kNumFeatures; ++f)
        e[features::kFeatureNames[f]] = values[f];
      imp[slice_name(slice)] = e;
    }
    std::string path = out_dir + "/importance.json";
    write_text_file(path, imp.dump(2) + "\n");
    outputs.push_back(raw_output(path));
  }

  // Slice-aware vs pooled comparison.
  {
    json cmp_opts;
    cmp_opts["out"] = out_dir + "/comparison.json";
    cmp_opts["seeds"] = seeds;
    cmp_opts["duration_s"] = base.duration_s;
    cmp_opts["intensity"] = base.intensity;
    cmp_opts["full_cv"] = full_cv;
    json cmp = json::parse(op_compare(cmp_opts.dump()));
    outputs.push_back(raw_output(out_dir + "/comparison.json"));
    text << "\nslice-aware vs pooled: mean gain "
         << cmp["mean_gain_pp"].get<double>() << " pp, p = "
         << cmp["p_value"].get<double>() << "\n";
  }

  // Temporal confidence traces (first seed, eMBB).
  {
    auto temporal = eval::temporal_confidence(runs.front().campaign,
                                              runs.front().models, SliceId::eMBB);
    json t;
    t["mean_delay_windows"] = temporal.mean_delay_windows;
    t["max_delay_windows"] = temporal.max_delay_windows;
    t["mean_post_detection_confidence"] = temporal.mean_post_detection_confidence;
    t["detected_fraction"] = temporal.detected_fraction;
    t["traces"] = json::array();
    for (const auto& trace : temporal.traces) {
      json e;
      e["event_id"] = trace.event_id;
      e["onset_window"] = trace.onset_window;
      e["delay_windows"] = trace.delay_windows;
      e["confidence"] = trace.confidence;
      t["traces"].push_back(e);
    }
    std::string path = out_dir + "/temporal.json";
    write_text_file(path, t.dump(2) + "\n");
    outputs.push_back(raw_output(path));
    text << "temporal: mean delay " << temporal.mean_delay_windows
         << " windows, post-detection confidence "
         << temporal.mean_post_detection_confidence << "\n";
  }

  // Rule-baseline comparison on the first seed.
  {
    auto rule = eval::fit_rule_baseline(runs.front().split.train);
    json b;
    for (auto& [slice, pair] : runs.front().models) {
      std::vector<features::FeatureVector> subset;
      for (const auto& fv : runs.front().split.test)
        if (fv.slice == slice) subset.push_back(fv);
      auto preds = eval::rule_predict(rule, subset);
      std::vector<int> labels;
      for (const auto& fv : subset)
        labels.push_back(fv.label == WindowLabel::Spoofed ? 1 : 0);
      auto rule_m = eval::compute_metrics(preds, labels);
      auto rf_m = eval::evaluate_model(pair.rf, runs.front().split.test).metrics;
      json e;
      e["rule_f1"] = rule_m.f1;
      e["rf_f1"] = rf_m.f1;
      e["gap_pp"] = (rf_m.f1 - rule_m.f1) * 100.0;
      b[slice_name(slice)] = e;
    }
    std::string path = out_dir + "/baseline.json";
    write_text_file(path, b.dump(2) + "\n");
    outputs.push_back(raw_output(path));
  }

  {
    std::string path = out_dir + "/summary.txt";
    write_text_file(path, text.str());
    outputs.push_back(raw_output(path));
  }

  write_manifest("report", opts, outputs,
                 opts.value("manifest", out_dir + "/report.manifest.json"));
  json summary;
  summary["out_dir"] = out_dir;
  summary["outputs"] = json::array();
  for (const auto& o : outputs) summary["outputs"].push_back(o.path);
  return summary.dump();
}

std::string op_repro(const std::string& opts_json) {
  auto opts = parse_opts(opts_json, {"manifest", "check"});
  std::string manifest_path = require_string(opts, "manifest");
  bool check = opts.value("check", true);

  json manifest;
  try {
    manifest = json::parse(read_text_file(manifest_path));
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(Status::Data, std::string("bad manifest: ") + e.what());
  }
  if (manifest.value("format", "") != "sliceguard-manifest")
    throw PipelineError(Status::Data, "not a sliceguard manifest");

  std::string op = manifest.value("op", "");
  if (op == "repro") throw PipelineError(Status::Usage, "cannot repro a repro");
  run_op(op, manifest["options"].dump());

  json result;
  result["op"] = op;
  result["checked"] = json::array();
  bool ok = true;
  for (const auto& rec : manifest["outputs"]) {
    std::string path = rec["path"].get<std::string>();
    std::string want = rec["digest"].get<std::string>();
    std::string got = rec.value("canonical", false)
                          ? verdicts_canonical_digest(path)
                          : file_digest(path);
    json e;
    e["path"] = path;
    e["expected"] = want;
    e["actual"] = got;
    e["match"] = (want == got);
    result["checked"].push_back(e);
    if (want != got) ok = false;
  }
  result["ok"] = ok;
  if (check && !ok)
    throw PipelineError(Status::CheckFailed,
                        "repro check failed: " + result.dump());
  return result.dump();
}

std::string run_op(const std::string& op, const std::string& opts_json) {
  if (op == "generate") return op_generate(opts_json);
  if (op == "inject") return op_inject(opts_json);
  if (op == "featurize") return op_featurize(opts_json);
  if (op == "train") return op_train(opts_json);
  if (op == "evaluate") return op_evaluate(opts_json);
  if (op == "compare") return op_compare(opts_json);
  if (op == "sweep") return op_sweep(opts_json);
  if (op == "serve") return op_serve(opts_json);
  if (op == "report") return op_report(opts_json);
  if (op == "repro") return op_repro(opts_json);
  throw PipelineError(Status::Usage, "unknown operation: " + op);
}

}  // namespace sliceguard::pipeline
