#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tspeval/core.hpp"
#include "tspeval/dataset.hpp"
#include "tspeval/solver.hpp"

namespace tspeval {

enum class TechniqueKind { ZeroShot, ZeroShotCot, FewShot, FewShotCot };

struct Technique {
  TechniqueKind kind = TechniqueKind::ZeroShot;
  int exemplar_count = 5;  // few-shot kinds only

  bool few_shot() const {
    return kind == TechniqueKind::FewShot || kind == TechniqueKind::FewShotCot;
  }
};

std::string technique_name(TechniqueKind kind);
Technique parse_technique(const std::string& name);

// A solved size-10 journey shown before the target in few-shot prompts.
// `answer` is the rendered answer JSON the model is expected to imitate.
struct Exemplar {
  Instance instance;
  std::string answer;
};

struct PromptBundle {
  std::string instance_id;
  Technique technique;
  std::string text;
  std::vector<std::string> exemplar_ids;
};

struct PromptOptions {
  // The stock templates quote a distance formula whose second term reads
  // (Y1 - Y1); set true to substitute (Y1 - Y2) instead.
  bool corrected_formula = false;
};

enum class ListStyle { Spaced, Compact };

// "station 0 (46, 61), station 1 (39, 56), ..., and station 9 (91, 95)."
std::string render_stations(const Instance& inst);

std::string render_matrix(const DistanceMatrix& d, ListStyle style);
std::string render_order(const std::vector<int>& order, ListStyle style);

// {"distance_matrix": "...", "minimum_distance_order": [...], "traveling_cost": ...}
std::string render_answer_json(const DistanceMatrix& d, const Tour& tour,
                               double cost, ListStyle style);

PromptBundle build_prompt(const Instance& inst, Technique technique,
                          const std::vector<Exemplar>& exemplars = {},
                          const PromptOptions& options = {});

// The five built-in solved exemplars, answers computed once by the exact
// solver. Thread-safe.
const std::vector<Exemplar>& default_exemplars();

// One training line per instance: messages [system, user, assistant] with
// the assistant answer computed by the exact solver. Instances the solver
// refuses (over exact_limit) are skipped with a notice on `log`. Returns
// the number of lines written.
int export_finetune_jsonl(const Corpus& corpus, const std::filesystem::path& path,
                          int exact_limit = kDefaultExactLimit,
                          std::ostream* log = nullptr);

// Single exported line for one instance (no trailing newline).
std::string finetune_line(const Instance& inst, const SolverResult& solved);

}  // namespace tspeval
