#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tspeval/analysis.hpp"
#include "tspeval/dataset.hpp"
#include "tspeval/llm.hpp"

namespace tspeval {

struct RunConfig {
  std::filesystem::path corpus;
  std::vector<std::string> techniques = {"zero_shot", "zero_shot_cot", "few_shot",
                                         "few_shot_cot"};
  BackendConfig backend;
  int k = 11;
  std::vector<int> ensemble_sizes = {1, 3, 5, 7, 9, 11};
  int randomness_n = 1000;
  int exact_limit = kDefaultExactLimit;
  int heuristic_restarts = 8;
  std::uint64_t seed = 0;
  std::filesystem::path out = "run";
};

// Stable 16-hex digest of the canonical config JSON. Identifies a run
// directory; a resume against a different config is refused.
std::string config_hash(const RunConfig& config);

// One response attempt, as stored on disk. Scores are absent when the
// response is invalid.
struct RunRecord {
  std::string run;
  std::string instance_id;
  int size = 0;
  std::string technique;
  int attempt = 0;
  std::string prompt_hash;
  std::string raw;
  std::string finish;
  bool valid = false;
  std::vector<std::string> reasons;
  std::optional<double> cost;
  std::optional<double> gap;
  std::optional<double> randomness;
  double ref_cost = 0.0;
  bool ref_exact = true;
  double latency_ms = 0.0;
};

struct RunSummary {
  std::string run_id;
  int issued = 0;   // attempts sent to the backend this invocation
  int skipped = 0;  // attempts already present in the store
  int total = 0;    // records in the store afterwards
};

// Evaluates the corpus: one prompt per (instance, technique), k sampled
// responses each, scored and appended to <out>/records.jsonl. Re-running
// with the same config issues only the missing attempts.
RunSummary run_eval(const RunConfig& config, std::ostream* log = nullptr);

std::vector<RunRecord> load_records(const std::filesystem::path& out_dir);

// Re-derives verdicts and scores from the stored raw texts, rewriting the
// store in place. Raw responses, finishes and latencies are kept.
RunSummary rescore(const std::filesystem::path& out_dir,
                   const std::optional<std::filesystem::path>& corpus_override = {},
                   std::ostream* log = nullptr);

// good_order.csv, gap_stats.csv, randomness_stats.csv,
// ensemble_curves.csv and summary.json under <out_dir>/report/.
void write_report(const std::filesystem::path& out_dir, std::ostream* log = nullptr);

EvalRecord to_eval_record(const RunRecord& r);

}  // namespace tspeval
