#include "tspeval/prompt.hpp"

#include <fstream>
#include <mutex>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace tspeval {

namespace {

// In-context templates. The wording, including its grammatical quirks and
// the (Y1 - Y1) formula, is load-bearing: downstream golden files and any
// recorded model traffic depend on these exact bytes.
constexpr const char* kFormulaStock = "((X1 - X2) ^ 2 + (Y1 - Y1) ^ 2) ^ 0.5";
constexpr const char* kFormulaCorrected = "((X1 - X2) ^ 2 + (Y1 - Y2) ^ 2) ^ 0.5";

const std::string kContextHead =
    "In two-dimensional space, you will visit variable number of stations. You "
    "must visit each station once and return to the starting station at the end. "
    "Each station is represented with a 2-dimensional Cartesian point (x, y) "
    "where x is the coordinate on the X-axis and y is the coordinate on the "
    "Y-axis. The formula calculates the Euclidean distance between stations is \" ";

const std::string kContextTail = " \".";

const std::string kTask =
    "Your task is to find the visiting order for the stations that minimizes the "
    "total distance you will travel to finish the journey.";

const std::string kCot =
    "Let's work this out step-by-step to ensure we have the correct answer. "
    "First, calculate the Euclidean distance between all pairs of stations using "
    "the Euclidean distance formula and make a matrix of the calculated "
    "distances. Then, compare all the possible stations' orders to find the "
    "order that costs the minimum total traveling distance of the journey. At "
    "last, Sum the distances between the stations according to the order you "
    "find.";

const std::string kPlainFormat =
    "The answer format should be as follows: distance matrix, Stations' order "
    "with minimum total traveling distance, and traveling distance.";

const std::string kJsonFormat =
    "The answer format should strictly follows a json format with no "
    "description as follows: distance_matrix, Stations' order with minimum "
    "total traveling distance as minimum_distance_order, and traveling_cost.";

// Fine-tuning template. Kept separate from the in-context wording: the
// training system message hard-codes the station count, spells the
// travelling-cost step differently, and quotes a shorter formula string.
const std::string kFtContextA =
    "In two-dimensional space, you will visit ";
const std::string kFtContextB =
    " stations. You must visit each station once and return to the starting "
    "station at the end. Each station is represented with a 2-dimensional "
    "Cartesian point ( x , y ) where x is the coordinate on the X-axis and y is "
    "the coordinate on the Y-axis. The formula calculates the Euclidean "
    "distance between stations is \" ( X1 - X2 ) ^ 2 + ( Y1 - Y1 ) ^ 2 ) ^ 0.5 "
    "\".";
const std::string kFtCot =
    "Let's work this out step-by-step to ensure we have the correct answer. "
    "First, calculate the Euclidean distance between all pairs of stations using "
    "the Euclidean distance formula and make a matrix of the calculated "
    "distances. Then, compare all the possible stations' orders to find the "
    "order that costs the minimum total travelling distance of the journey. At "
    "last, Sum the distances between the stations according to the order you "
    "find.";

std::string context_paragraph(const PromptOptions& options) {
  return kContextHead +
         (options.corrected_formula ? kFormulaCorrected : kFormulaStock) +
         kContextTail;
}

const char* style_sep(ListStyle style) {
  return style == ListStyle::Spaced ? ", " : ",";
}

Instance exemplar_instance(const char* id,
                           std::initializer_list<std::pair<int, int>> pts) {
  Instance inst;
  inst.id = id;
  inst.source = Source::Inline;
  for (const auto& [x, y] : pts) inst.points.push_back(Point{x, y});
  return inst;
}

}  // namespace

std::string technique_name(TechniqueKind kind) {
  switch (kind) {
    case TechniqueKind::ZeroShot: return "zero_shot";
    case TechniqueKind::ZeroShotCot: return "zero_shot_cot";
    case TechniqueKind::FewShot: return "few_shot";
    case TechniqueKind::FewShotCot: return "few_shot_cot";
  }
  return "zero_shot";
}

Technique parse_technique(const std::string& name) {
  for (TechniqueKind kind :
       {TechniqueKind::ZeroShot, TechniqueKind::ZeroShotCot, TechniqueKind::FewShot,
        TechniqueKind::FewShotCot}) {
    if (name == technique_name(kind)) return Technique{kind};
  }
  throw std::invalid_argument("unknown technique: " + name);
}

std::string render_stations(const Instance& inst) {
  const int n = inst.size();
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i > 0) out += ", ";
    if (i == n - 1) out += "and ";
    out += "station " + std::to_string(i) + " (" + std::to_string(inst.points[i].x) +
           ", " + std::to_string(inst.points[i].y) + ")";
  }
  out += ".";
  return out;
}

std::string render_matrix(const DistanceMatrix& d, ListStyle style) {
  const char* sep = style_sep(style);
  std::string out = "[";
  for (int i = 0; i < d.size(); ++i) {
    if (i > 0) out += sep;
    out += "[";
    for (int j = 0; j < d.size(); ++j) {
      if (j > 0) out += sep;
      out += format_number(d.at(i, j));
    }
    out += "]";
  }
  out += "]";
  return out;
}

std::string render_order(const std::vector<int>& order, ListStyle style) {
  const char* sep = style_sep(style);
  std::string out = "[";
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0) out += sep;
    out += std::to_string(order[i]);
  }
  out += "]";
  return out;
}

std::string render_answer_json(const DistanceMatrix& d, const Tour& tour,
                               double cost, ListStyle style) {
  const bool spaced = style == ListStyle::Spaced;
  std::string out = "{\"distance_matrix\": \"";
  out += render_matrix(d, style);
  out += spaced ? "\", \"minimum_distance_order\": " : "\",\"minimum_distance_order\":";
  out += render_order(tour.order, style);
  out += spaced ? ", \"traveling_cost\": " : ",\"traveling_cost\":";
  out += format_number(cost);
  out += "}";
  return out;
}

PromptBundle build_prompt(const Instance& inst, Technique technique,
                          const std::vector<Exemplar>& exemplars,
                          const PromptOptions& options) {
  if (inst.size() < 3) {
    throw std::invalid_argument("instance '" + inst.id + "' needs at least 3 points");
  }
  PromptBundle bundle;
  bundle.instance_id = inst.id;
  bundle.technique = technique;

  std::string text = context_paragraph(options);
  text += "\n\n";
  switch (technique.kind) {
    case TechniqueKind::ZeroShot:
      text += kTask + "\n\n" + kPlainFormat;
      break;
    case TechniqueKind::ZeroShotCot:
      text += kTask + "\n\n" + kCot + "\n\n" + kPlainFormat;
      break;
    case TechniqueKind::FewShot:
      text += kTask + "\n\n" + kJsonFormat;
      break;
    case TechniqueKind::FewShotCot:
      text += kTask + " " + kCot + "\n\n" + kJsonFormat;
      break;
  }
  text += "\n\n";

  if (technique.few_shot()) {
    if (static_cast<int>(exemplars.size()) != technique.exemplar_count) {
      throw std::invalid_argument(
          "few-shot prompt needs " + std::to_string(technique.exemplar_count) +
          " exemplars, got " + std::to_string(exemplars.size()));
    }
    for (const auto& ex : exemplars) {
      text += render_stations(ex.instance) + "\n\n" + ex.answer + "\n\n";
      bundle.exemplar_ids.push_back(ex.instance.id);
    }
  }
  text += render_stations(inst);
  bundle.text = std::move(text);
  return bundle;
}

const std::vector<Exemplar>& default_exemplars() {
  static std::once_flag once;
  static std::vector<Exemplar> exemplars;
  std::call_once(once, [] {
    const std::vector<Instance> instances = {
        exemplar_instance("exemplar-0", {{4, 5}, {5, 6}, {1, 1}, {5, 6}, {1, 9},
                                         {1, 1}, {7, 5}, {7, 8}, {4, 3}, {1, 2}}),
        exemplar_instance("exemplar-1", {{3, 1}, {4, 1}, {6, 6}, {8, 3}, {0, 9},
                                         {8, 9}, {3, 3}, {3, 1}, {2, 9}, {5, 0}}),
        exemplar_instance("exemplar-2", {{5, 1}, {0, 0}, {4, 8}, {3, 4}, {6, 0},
                                         {1, 2}, {9, 4}, {8, 8}, {5, 1}, {6, 5}}),
        exemplar_instance("exemplar-3", {{7, 3}, {7, 8}, {5, 3}, {8, 6}, {7, 9},
                                         {4, 4}, {9, 1}, {1, 7}, {2, 7}, {6, 4}}),
        exemplar_instance("exemplar-4", {{7, 6}, {7, 5}, {5, 8}, {8, 5}, {7, 3},
                                         {4, 1}, {9, 4}, {1, 6}, {2, 0}, {0, 7}}),
    };
    for (const auto& inst : instances) {
      const SolverResult solved = solve_held_karp(inst);
      const DistanceMatrix d = distance_matrix(inst);
      exemplars.push_back(Exemplar{
          inst, render_answer_json(d, solved.tour, solved.cost, ListStyle::Spaced)});
    }
  });
  return exemplars;
}

std::string finetune_line(const Instance& inst, const SolverResult& solved) {
  std::string system = kFtContextA + std::to_string(inst.size()) + kFtContextB +
                       "\n\n" + kTask + "\n\n" + kFtCot + "\n\n" + kPlainFormat + "\n";

  // Training stations are spelled "station 0 ( 8775, 9800 )".
  std::string user;
  const int n = inst.size();
  for (int i = 0; i < n; ++i) {
    if (i > 0) user += ", ";
    if (i == n - 1) user += "and ";
    user += "station " + std::to_string(i) + " ( " + std::to_string(inst.points[i].x) +
            ", " + std::to_string(inst.points[i].y) + " )";
  }
  user += ".";

  const DistanceMatrix d = distance_matrix(inst);
  const std::string assistant =
      render_answer_json(d, solved.tour, solved.cost, ListStyle::Compact);

  nlohmann::ordered_json line;
  line["messages"] = {
      {{"role", "system"}, {"content", system}},
      {{"role", "user"}, {"content", user}},
      {{"role", "assistant"}, {"content", assistant}},
  };
  return line.dump();
}

int export_finetune_jsonl(const Corpus& corpus, const std::filesystem::path& path,
                          int exact_limit, std::ostream* log) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path.string());
  }
  int written = 0;
  for (const auto& inst : corpus.instances) {
    SolverResult solved;
    try {
      solved = solve_held_karp(inst, exact_limit);
    } catch (const std::exception& e) {
      if (log) *log << "[export] skipped '" << inst.id << "': " << e.what() << "\n";
      continue;
    }
    out << finetune_line(inst, solved) << "\n";
    ++written;
  }
  return written;
}

}  // namespace tspeval
