#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tspeval/core.hpp"
#include "tspeval/llm.hpp"
#include "tspeval/solver.hpp"

namespace tspeval {

struct ParsedTour {
  std::vector<int> order;
  std::string key_used;
  bool found = false;
};

enum class Reason {
  MissingOrder,
  MissedVisit,
  MultipleVisit,
  NoReturn,
  IndexOutOfRange,
  Truncated,
};

std::string to_string(Reason r);
Reason reason_from_string(const std::string& s);

struct Verdict {
  bool valid = false;
  std::set<Reason> reasons;
};

// Extraction pattern: a quoted key from {order, path}, optionally prefixed
// by minimum_distance_ or optimal_, then a colon and a bracketed
// comma-separated integer list. First match wins.
ParsedTour parse_order(const std::string& raw_text);

// A response is valid iff an order was found, the response completed, and
// the order is a closed Hamiltonian cycle over the instance's stations.
Verdict validate(const Instance& inst, const ParsedTour& parsed, Finish finish);

// (model_cost - reference_cost) / reference_cost. Throws when the
// reference cost is zero.
double gap(TourCost model_cost, TourCost reference_cost);

// Fraction of random tour costs <= model_cost: the empirical p-value for
// the null hypothesis that the model returns a random ordering.
double randomness_score(TourCost model_cost, const RandomCostSample& sample);

inline constexpr double kRandomnessRejectThreshold = 0.05;

// One scored response attempt.
struct EvalRecord {
  std::string instance_id;
  int size = 0;
  std::string tag;  // technique or model label
  int attempt = 0;
  Verdict verdict;
  std::optional<TourCost> cost;        // present iff valid
  std::optional<double> gap;           // present only when cost is
  std::optional<double> randomness;    // present only when cost is
  bool ref_exact = true;
};

struct EnsembleChoice {
  bool any_valid = false;
  int attempt = -1;        // attempt index of the chosen response
  TourCost cost = 0.0;     // meaningful only when any_valid
};

// Takes the first B responses in attempt order, drops invalid ones, and
// returns the cheapest (earliest attempt on ties).
EnsembleChoice self_ensemble(const std::vector<EvalRecord>& responses, int ensemble_size);

enum class Metric { Gap, Randomness, GoodOrderPct };

std::string to_string(Metric m);

struct GroupStats {
  int size = 0;
  std::string metric;
  std::optional<double> median;  // absent when no valid records
  std::optional<double> iqr;
  int count_valid = 0;
  int count_total = 0;
};

// Per-size statistics over valid records; records are re-sorted by
// (size, instance_id, attempt) first so input order does not matter.
std::vector<GroupStats> group_stats(const std::vector<EvalRecord>& records, Metric metric);

// Quantile by linear interpolation between closest ranks: position
// q*(n-1) into the sorted values.
double quantile(std::vector<double> values, double q);

}  // namespace tspeval
