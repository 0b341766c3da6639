#pragma once

#include <stdexcept>
#include <string>

namespace sliceguard::pipeline {

// Mirrors the CLI exit codes.
enum class Status : int {
  Ok = 0,
  Usage = 1,
  Data = 2,
  CheckFailed = 3,
  Internal = 4,
};

class PipelineError : public std::runtime_error {
 public:
  PipelineError(Status status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  Status status() const { return status_; }

 private:
  Status status_;
};

// Every operation takes a JSON options object (as text), reads/writes the
// declared files, records a manifest next to its primary output, and
// returns a JSON summary. Unknown option keys are rejected.
std::string op_generate(const std::string& opts_json);
std::string op_inject(const std::string& opts_json);
std::string op_featurize(const std::string& opts_json);
std::string op_train(const std::string& opts_json);
std::string op_evaluate(const std::string& opts_json);
std::string op_compare(const std::string& opts_json);
std::string op_sweep(const std::string& opts_json);
std::string op_serve(const std::string& opts_json);
std::string op_report(const std::string& opts_json);

// Re-runs the operation recorded in a manifest and verifies that every
// recorded output digest is reproduced. check=false only re-runs.
std::string op_repro(const std::string& opts_json);

// Dispatch by name; throws PipelineError(Usage) on an unknown op.
std::string run_op(const std::string& op, const std::string& opts_json);

// FNV-1a over the raw file bytes, hex encoded.
std::string file_digest(const std::string& path);

}  // namespace sliceguard::pipeline
