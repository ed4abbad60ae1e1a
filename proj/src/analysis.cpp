#include "tspeval/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <regex>
#include <stdexcept>

namespace tspeval {

std::string to_string(Reason r) {
  switch (r) {
    case Reason::MissingOrder: return "missing_order";
    case Reason::MissedVisit: return "missed_visit";
    case Reason::MultipleVisit: return "multiple_visit";
    case Reason::NoReturn: return "no_return";
    case Reason::IndexOutOfRange: return "index_out_of_range";
    case Reason::Truncated: return "truncated";
  }
  throw std::invalid_argument("unknown reason");
}

Reason reason_from_string(const std::string& s) {
  if (s == "missing_order") return Reason::MissingOrder;
  if (s == "missed_visit") return Reason::MissedVisit;
  if (s == "multiple_visit") return Reason::MultipleVisit;
  if (s == "no_return") return Reason::NoReturn;
  if (s == "index_out_of_range") return Reason::IndexOutOfRange;
  if (s == "truncated") return Reason::Truncated;
  throw std::invalid_argument("unknown reason: " + s);
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::Gap: return "gap";
    case Metric::Randomness: return "randomness";
    case Metric::GoodOrderPct: return "good_order_pct";
  }
  throw std::invalid_argument("unknown metric");
}

ParsedTour parse_order(const std::string& raw_text) {
  static const std::regex pattern(
      R"re("((?:minimum_distance_|optimal_)?(?:order|path))"\s*:\s*\[(\s*\d+(?:\s*,\s*\d+)*\s*)\])re");
  ParsedTour out;
  std::smatch m;
  if (!std::regex_search(raw_text, m, pattern)) return out;
  out.found = true;
  out.key_used = m[1].str();
  const std::string body = m[2].str();
  std::size_t pos = 0;
  while (pos < body.size()) {
    while (pos < body.size() && !std::isdigit(static_cast<unsigned char>(body[pos]))) ++pos;
    if (pos >= body.size()) break;
    std::size_t end = pos;
    while (end < body.size() && std::isdigit(static_cast<unsigned char>(body[end]))) ++end;
    long long v = 0;
    try {
      v = std::stoll(body.substr(pos, end - pos));
    } catch (const std::out_of_range&) {
      v = std::numeric_limits<int>::max();
    }
    if (v > std::numeric_limits<int>::max()) v = std::numeric_limits<int>::max();
    out.order.push_back(static_cast<int>(v));
    pos = end;
  }
  return out;
}

Verdict validate(const Instance& inst, const ParsedTour& parsed, Finish finish) {
  Verdict v;
  if (finish == Finish::Error) {
    v.reasons.insert(Reason::MissingOrder);
    return v;
  }
  if (finish == Finish::Truncated) v.reasons.insert(Reason::Truncated);
  if (!parsed.found || parsed.order.empty()) {
    v.reasons.insert(Reason::MissingOrder);
    return v;
  }

  const auto& order = parsed.order;
  const int n = static_cast<int>(inst.size());
  const bool closed = order.size() >= 2 && order.front() == order.back();
  if (!closed) v.reasons.insert(Reason::NoReturn);

  // The closing repeat of the start station is not a visit.
  const std::size_t visit_len = closed ? order.size() - 1 : order.size();
  std::vector<int> visits(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < visit_len; ++i) {
    const int s = order[i];
    if (s < 0 || s >= n) {
      v.reasons.insert(Reason::IndexOutOfRange);
      continue;
    }
    ++visits[static_cast<std::size_t>(s)];
  }
  for (int c : visits) {
    if (c == 0) v.reasons.insert(Reason::MissedVisit);
    if (c > 1) v.reasons.insert(Reason::MultipleVisit);
  }
  v.valid = v.reasons.empty();
  return v;
}

double gap(TourCost model_cost, TourCost reference_cost) {
  if (!(reference_cost > 0.0)) throw std::invalid_argument("reference cost must be positive");
  return (model_cost - reference_cost) / reference_cost;
}

double randomness_score(TourCost model_cost, const RandomCostSample& sample) {
  if (sample.costs.empty()) throw std::invalid_argument("empty random cost sample");
  std::size_t at_or_below = 0;
  for (double c : sample.costs) {
    if (c <= model_cost) ++at_or_below;
  }
  return static_cast<double>(at_or_below) / static_cast<double>(sample.costs.size());
}

EnsembleChoice self_ensemble(const std::vector<EvalRecord>& responses, int ensemble_size) {
  if (ensemble_size <= 0) throw std::invalid_argument("ensemble size must be positive");
  std::vector<const EvalRecord*> sorted;
  sorted.reserve(responses.size());
  for (const auto& r : responses) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const EvalRecord* a, const EvalRecord* b) { return a->attempt < b->attempt; });
  if (sorted.size() > static_cast<std::size_t>(ensemble_size)) {
    sorted.resize(static_cast<std::size_t>(ensemble_size));
  }

  EnsembleChoice choice;
  for (const EvalRecord* r : sorted) {
    if (!r->verdict.valid || !r->cost.has_value()) continue;
    if (!choice.any_valid || *r->cost < choice.cost) {
      choice.any_valid = true;
      choice.attempt = r->attempt;
      choice.cost = *r->cost;
    }
  }
  return choice;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty set");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile fraction out of range");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0 || lo + 1 >= values.size()) return values[lo];
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

std::vector<GroupStats> group_stats(const std::vector<EvalRecord>& records, Metric metric) {
  std::vector<const EvalRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const EvalRecord* a, const EvalRecord* b) {
    if (a->size != b->size) return a->size < b->size;
    if (a->instance_id != b->instance_id) return a->instance_id < b->instance_id;
    return a->attempt < b->attempt;
  });

  std::vector<GroupStats> out;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const int size = sorted[i]->size;
    GroupStats g;
    g.size = size;
    g.metric = to_string(metric);
    std::vector<double> values;
    for (; i < sorted.size() && sorted[i]->size == size; ++i) {
      const EvalRecord& r = *sorted[i];
      ++g.count_total;
      if (!r.verdict.valid) continue;
      ++g.count_valid;
      if (metric == Metric::Gap && r.gap.has_value()) values.push_back(*r.gap);
      if (metric == Metric::Randomness && r.randomness.has_value()) values.push_back(*r.randomness);
    }
    if (metric == Metric::GoodOrderPct) {
      if (g.count_total > 0) {
        g.median = 100.0 * static_cast<double>(g.count_valid) / static_cast<double>(g.count_total);
      }
    } else if (!values.empty()) {
      g.median = quantile(values, 0.5);
      g.iqr = quantile(values, 0.75) - quantile(values, 0.25);
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace tspeval
