#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ratiotv/solver.hpp"
#include "ratiotv/types.hpp"

namespace ratiotv {

// Flat key-value experiment configuration. Every read records the value that
// was actually used (supplied or default), so a run can serialize its fully
// resolved configuration and be replayed bit-for-bit later.
class ExperimentConfig {
 public:
  ExperimentConfig() = default;
  explicit ExperimentConfig(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  static ExperimentConfig from_file(const std::string& path);

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  double get_num(const std::string& key, double fallback) const;
  Index get_int(const std::string& key, Index fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_str(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_num_list(const std::string& key, const std::string& fallback) const;
  std::vector<std::string> get_str_list(const std::string& key, const std::string& fallback) const;

  const std::map<std::string, std::string>& resolved() const { return resolved_; }
  const std::map<std::string, std::string>& supplied() const { return kv_; }
  // Keys that were supplied but never read by the runner; nonempty means a typo.
  std::vector<std::string> unused_keys() const;

 private:
  std::string fetch(const std::string& key, const std::string& fallback) const;
  std::map<std::string, std::string> kv_;
  mutable std::map<std::string, std::string> resolved_;
};

struct ResultRow {
  std::string method;
  std::vector<std::pair<std::string, std::string>> instance;  // ordered extra columns
  double re = 0.0;
  double psnr = 0.0;
  bool exact_recovery = false;  // re < 1e-6
  int iters = 0;
  long inner_iters = 0;
  bool diverged = false;
  double seconds = 0.0;
};

struct RunOutput {
  std::vector<ResultRow> rows;
  // trace id -> JSON record (objective/re/feasibility vs wall time, run metadata)
  std::vector<std::pair<std::string, nlohmann::json>> traces;
};

ResultRow make_result_row(std::string method, std::vector<std::pair<std::string, std::string>> instance,
                          const ImageXd& u, const ImageXd& truth, const Diagnostics& diag);

// Experiment drivers. Each consumes the config keys documented in the README
// and returns rows ordered deterministically by cell index.
RunOutput run_onebar_sweep(const ExperimentConfig& cfg);
RunOutput run_twobar_sweep(const ExperimentConfig& cfg);
RunOutput run_superres(const ExperimentConfig& cfg);
RunOutput run_mri_radial(const ExperimentConfig& cfg);
RunOutput run_ct_limited(const ExperimentConfig& cfg);
RunOutput run_sensitivity_grid(const ExperimentConfig& cfg);
RunOutput run_ablations(const ExperimentConfig& cfg);

// Worker count for sweep cells: RATIOTV_WORKERS, else hardware concurrency.
int worker_count();

// Runs f(0..count-1) on a bounded pool; results must be stored by index.
void parallel_for_cells(Index count, int workers, const std::function<void(Index)>& f);

// Deterministic per-cell seed derived from the experiment seed.
std::uint64_t cell_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t restart = 0);

// CSV table: method,<instance columns>,re,psnr,exact_recovery,iters,seconds.
std::string rows_to_csv(const std::vector<ResultRow>& rows);

// Full experiment entry point used by the CLI: validates, runs, writes
// results.csv, trace_<id>.json files, and manifest.json under out_dir.
int run_experiment(const std::string& subcommand, ExperimentConfig cfg, const std::string& out_dir);

// argv-style front end (excluding the program name). Returns the exit code.
int cli_main(const std::vector<std::string>& args);

}  // namespace ratiotv
