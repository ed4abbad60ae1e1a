#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "tspeval/analysis.hpp"

using namespace tspeval;

namespace {

Instance n_station_instance(int n) {
  Instance inst;
  inst.id = "n" + std::to_string(n);
  for (int i = 0; i < n; ++i) inst.points.push_back({i * 10, (i * i) % 7});
  return inst;
}

ParsedTour as_parsed(std::vector<int> order) {
  ParsedTour p;
  p.order = std::move(order);
  p.found = true;
  return p;
}

EvalRecord record(int attempt, bool valid, double cost) {
  EvalRecord r;
  r.instance_id = "x";
  r.size = 5;
  r.attempt = attempt;
  r.verdict.valid = valid;
  if (valid) r.cost = cost;
  return r;
}

// Ground truth stated independently of validate(): a closed Hamiltonian
// cycle repeats its first station last and visits every station once.
bool hamiltonian_cycle(const std::vector<int>& order, int n) {
  if (static_cast<int>(order.size()) != n + 1) return false;
  if (order.front() != order.back()) return false;
  std::set<int> seen;
  for (int i = 0; i < n; ++i) {
    const int s = order[static_cast<std::size_t>(i)];
    if (s < 0 || s >= n) return false;
    if (!seen.insert(s).second) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("order extraction handles the observed key spellings") {
  const char* texts[] = {
      R"({"minimum_distance_order": [0, 1, 2, 0]})",
      R"({"optimal_order": [0,1,2,0]})",
      R"(the best "order":[ 0 , 1 , 2 , 0 ] overall)",
      R"({"optimal_path"  :  [0, 1, 2, 0]})",
      R"({"minimum_distance_path": [0, 1, 2, 0]})",
  };
  const char* keys[] = {"minimum_distance_order", "optimal_order", "order", "optimal_path",
                        "minimum_distance_path"};
  for (int i = 0; i < 5; ++i) {
    CAPTURE(i);
    const ParsedTour p = parse_order(texts[i]);
    REQUIRE(p.found);
    CHECK(p.key_used == keys[i]);
    CHECK(p.order == std::vector<int>{0, 1, 2, 0});
  }
}

TEST_CASE("the first order in the text wins") {
  const ParsedTour p = parse_order(
      R"({"order": [0, 2, 1, 0]} and later {"optimal_order": [0, 1, 2, 0]})");
  REQUIRE(p.found);
  CHECK(p.key_used == "order");
  CHECK(p.order == std::vector<int>{0, 2, 1, 0});
}

TEST_CASE("texts without an order list parse as not found") {
  CHECK_FALSE(parse_order("").found);
  CHECK_FALSE(parse_order("no json here").found);
  CHECK_FALSE(parse_order(R"({"order": "0,1,2"})").found);
  CHECK_FALSE(parse_order(R"({"order": []})").found);
  CHECK_FALSE(parse_order(R"({"disorder": [0,1,2]})").found);
  // Truncated list, bracket never closes.
  CHECK_FALSE(parse_order(R"({"minimum_distance_order": [0, 1, 2)").found);
}

TEST_CASE("huge station numbers do not overflow the parser") {
  const ParsedTour p = parse_order(R"({"order": [0, 99999999999999999999, 1, 0]})");
  REQUIRE(p.found);
  REQUIRE(p.order.size() == 4);
  CHECK(p.order[1] == std::numeric_limits<int>::max());
}

TEST_CASE("the published hallucination is rejected for exactly two reasons") {
  const Instance inst = n_station_instance(11);
  const Verdict v =
      validate(inst, as_parsed({0, 3, 5, 10, 9, 4, 6, 7, 8, 10, 3, 0}), Finish::Complete);
  CHECK_FALSE(v.valid);
  CHECK(v.reasons == std::set<Reason>{Reason::MissedVisit, Reason::MultipleVisit});

  const Verdict repaired =
      validate(inst, as_parsed({0, 3, 5, 10, 9, 4, 6, 7, 8, 2, 1, 0}), Finish::Complete);
  CHECK(repaired.valid);
  CHECK(repaired.reasons.empty());
}

TEST_CASE("single validation defects are reported precisely") {
  const Instance inst = n_station_instance(4);
  SUBCASE("no return to start") {
    const Verdict v = validate(inst, as_parsed({0, 1, 2, 3}), Finish::Complete);
    CHECK(v.reasons == std::set<Reason>{Reason::NoReturn});
  }
  SUBCASE("out of range index") {
    const Verdict v = validate(inst, as_parsed({0, 1, 2, 7, 0}), Finish::Complete);
    CHECK(v.reasons.count(Reason::IndexOutOfRange) == 1);
    CHECK(v.reasons.count(Reason::MissedVisit) == 1);  // station 3 never visited
  }
  SUBCASE("missing order") {
    const Verdict v = validate(inst, ParsedTour{}, Finish::Complete);
    CHECK(v.reasons == std::set<Reason>{Reason::MissingOrder});
  }
  SUBCASE("truncated response with a parseable prefix") {
    const Verdict v = validate(inst, as_parsed({0, 1, 2, 3, 0}), Finish::Truncated);
    CHECK_FALSE(v.valid);
    CHECK(v.reasons == std::set<Reason>{Reason::Truncated});
  }
  SUBCASE("error responses collapse to missing order") {
    const Verdict v = validate(inst, as_parsed({0, 1, 2, 3, 0}), Finish::Error);
    CHECK(v.reasons == std::set<Reason>{Reason::MissingOrder});
  }
}

TEST_CASE("validity equals the independent Hamiltonian-cycle predicate") {
  // Every sequence of length 0..6 over stations {0..3} plus one
  // out-of-range value, against a 4-station instance.
  const Instance inst = n_station_instance(4);
  const int alphabet = 5;
  long long checked = 0;
  for (int len = 0; len <= 6; ++len) {
    long long total = 1;
    for (int i = 0; i < len; ++i) total *= alphabet;
    for (long long code = 0; code < total; ++code) {
      std::vector<int> order(static_cast<std::size_t>(len));
      long long rest = code;
      for (int i = 0; i < len; ++i) {
        order[static_cast<std::size_t>(i)] = static_cast<int>(rest % alphabet);
        rest /= alphabet;
      }
      ParsedTour parsed;
      parsed.order = order;
      parsed.found = !order.empty();
      const Verdict v = validate(inst, parsed, Finish::Complete);
      if (v.valid != hamiltonian_cycle(order, 4)) {
        CAPTURE(len);
        CAPTURE(code);
        REQUIRE(v.valid == hamiltonian_cycle(order, 4));
      }
      ++checked;
    }
  }
  CHECK(checked == 19531);
}

TEST_CASE("reason labels round-trip") {
  for (Reason r : {Reason::MissingOrder, Reason::MissedVisit, Reason::MultipleVisit,
                   Reason::NoReturn, Reason::IndexOutOfRange, Reason::Truncated}) {
    CHECK(reason_from_string(to_string(r)) == r);
  }
  CHECK_THROWS_AS(reason_from_string("bogus"), std::invalid_argument);
}

TEST_CASE("gap is the relative excess over the reference") {
  CHECK(gap(110.0, 100.0) == doctest::Approx(0.10).epsilon(1e-15));
  CHECK(gap(4090.54, 4090.54) == 0.0);
  CHECK(gap(90.0, 100.0) == doctest::Approx(-0.10).epsilon(1e-15));
  CHECK_THROWS_AS(gap(100.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gap(100.0, -5.0), std::invalid_argument);
}

TEST_CASE("randomness score counts random tours at or below the model cost") {
  RandomCostSample sample;
  sample.costs = {3.0, 4.0, 5.0};
  CHECK(randomness_score(4.0, sample) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(randomness_score(2.9, sample) == 0.0);
  CHECK(randomness_score(5.0, sample) == 1.0);
  CHECK_THROWS_AS(randomness_score(1.0, RandomCostSample{}), std::invalid_argument);
}

TEST_CASE("randomness score is monotone in the model cost") {
  RandomCostSample sample;
  for (int i = 0; i < 100; ++i) sample.costs.push_back(100.0 + i);
  CHECK(randomness_score(99.0, sample) <= randomness_score(150.0, sample));
  CHECK(randomness_score(150.0, sample) <= randomness_score(500.0, sample));
}

TEST_CASE("self-ensemble picks the cheapest valid attempt in the window") {
  const std::vector<EvalRecord> attempts = {
      record(0, false, 0.0), record(1, true, 50.0), record(2, true, 40.0),
      record(3, true, 60.0), record(4, true, 30.0),
  };
  const EnsembleChoice b1 = self_ensemble(attempts, 1);
  CHECK_FALSE(b1.any_valid);
  const EnsembleChoice b2 = self_ensemble(attempts, 2);
  CHECK(b2.any_valid);
  CHECK(b2.attempt == 1);
  CHECK(b2.cost == 50.0);
  const EnsembleChoice b3 = self_ensemble(attempts, 3);
  CHECK(b3.attempt == 2);
  const EnsembleChoice b5 = self_ensemble(attempts, 5);
  CHECK(b5.attempt == 4);
  CHECK(b5.cost == 30.0);
  const EnsembleChoice beyond = self_ensemble(attempts, 50);
  CHECK(beyond.attempt == 4);
}

TEST_CASE("self-ensemble breaks cost ties toward the earliest attempt") {
  const std::vector<EvalRecord> attempts = {
      record(0, true, 25.0), record(1, true, 25.0), record(2, true, 25.0)};
  CHECK(self_ensemble(attempts, 3).attempt == 0);

  // Input order must not matter.
  const std::vector<EvalRecord> shuffled = {
      record(2, true, 25.0), record(0, true, 25.0), record(1, true, 25.0)};
  CHECK(self_ensemble(shuffled, 3).attempt == 0);
  CHECK(self_ensemble(shuffled, 1).attempt == 0);
}

TEST_CASE("self-ensemble rejects nonsense sizes and empty windows") {
  CHECK_THROWS_AS(self_ensemble({}, 0), std::invalid_argument);
  CHECK_THROWS_AS(self_ensemble({}, -3), std::invalid_argument);
  CHECK_FALSE(self_ensemble({}, 5).any_valid);
  CHECK_FALSE(self_ensemble({record(0, false, 0.0)}, 5).any_valid);
}

TEST_CASE("quantiles interpolate between closest ranks") {
  CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
  CHECK(quantile({1, 2, 3, 4}, 0.75) == doctest::Approx(3.25));
  CHECK(quantile({5}, 0.5) == 5.0);
  CHECK(quantile({4, 1, 3, 2}, 0.0) == 1.0);
  CHECK(quantile({4, 1, 3, 2}, 1.0) == 4.0);
  CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(quantile({1.0}, 1.5), std::invalid_argument);
}

TEST_CASE("group stats summarize per size over valid records") {
  std::vector<EvalRecord> records;
  for (int i = 0; i < 4; ++i) {
    EvalRecord r = record(i, i != 3, 0.0);
    r.size = 10;
    r.instance_id = "a" + std::to_string(i);
    if (r.verdict.valid) r.gap = 0.1 * i;  // 0.0, 0.1, 0.2
    records.push_back(r);
  }
  EvalRecord other = record(0, true, 0.0);
  other.size = 12;
  other.instance_id = "b";
  other.gap = 0.5;
  records.push_back(other);

  const auto stats = group_stats(records, Metric::Gap);
  REQUIRE(stats.size() == 2);
  CHECK(stats[0].size == 10);
  CHECK(stats[0].count_total == 4);
  CHECK(stats[0].count_valid == 3);
  CHECK(stats[0].median == doctest::Approx(0.1));
  CHECK(stats[0].iqr == doctest::Approx(0.1));
  CHECK(stats[1].size == 12);
  CHECK(stats[1].median == doctest::Approx(0.5));
  CHECK(stats[1].iqr == doctest::Approx(0.0));

  const auto pct = group_stats(records, Metric::GoodOrderPct);
  CHECK(pct[0].median == doctest::Approx(75.0));
  CHECK_FALSE(pct[0].iqr.has_value());
  CHECK(pct[1].median == doctest::Approx(100.0));
}

TEST_CASE("groups with no valid records have empty statistics") {
  std::vector<EvalRecord> records = {record(0, false, 0.0)};
  records[0].size = 9;
  const auto stats = group_stats(records, Metric::Gap);
  REQUIRE(stats.size() == 1);
  CHECK(stats[0].count_valid == 0);
  CHECK_FALSE(stats[0].median.has_value());
  CHECK_FALSE(stats[0].iqr.has_value());
}
