#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "tspeval/dataset.hpp"
#include "tspeval/rng.hpp"
#include "tspeval/solver.hpp"

using namespace tspeval;

namespace {

Instance square() {
  Instance inst;
  inst.id = "square";
  inst.points = {{0, 0}, {10, 0}, {10, 10}, {0, 10}};
  return inst;
}

Instance random_instance(int n, std::uint64_t seed) {
  DatasetSpec spec;
  spec.sizes = {n};
  spec.per_size = 1;
  spec.coord_min = 0;
  spec.coord_max = 1000;
  spec.seed = seed;
  return generate_random(spec).instances.front();
}

bool is_closed_permutation(const Tour& t, int n) {
  if (static_cast<int>(t.order.size()) != n + 1) return false;
  if (t.order.front() != t.order.back()) return false;
  std::set<int> seen(t.order.begin(), t.order.end() - 1);
  if (static_cast<int>(seen.size()) != n) return false;
  return *seen.begin() == 0 && *seen.rbegin() == n - 1;
}

}  // namespace

TEST_CASE("brute force solves the unit square") {
  const auto r = solve_brute_force(square());
  CHECK(r.cost == doctest::Approx(40.0).epsilon(1e-12));
  CHECK(r.exact);
  CHECK(r.method == SolveMethod::BruteForce);
  CHECK(r.tour.order == std::vector<int>{0, 1, 2, 3, 0});
}

TEST_CASE("held-karp solves the unit square") {
  const auto r = solve_held_karp(square());
  CHECK(r.cost == doctest::Approx(40.0).epsilon(1e-12));
  CHECK(r.exact);
  CHECK(is_closed_permutation(r.tour, 4));
}

TEST_CASE("the two exact solvers agree on random instances") {
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 4 + trial % 6;
    const Instance inst = random_instance(n, 5000 + trial);
    const auto bf = solve_brute_force(inst);
    const auto hk = solve_held_karp(inst);
    CAPTURE(inst.id);
    CHECK(std::abs(bf.cost - hk.cost) <= 1e-9 * std::max(1.0, bf.cost));
    CHECK(is_closed_permutation(hk.tour, n));
    CHECK(tour_cost(inst, hk.tour) == doctest::Approx(hk.cost).epsilon(1e-12));
  }
}

TEST_CASE("solver tours are normalized: anchored at 0, fixed direction") {
  for (int trial = 0; trial < 6; ++trial) {
    const Instance inst = random_instance(7, 600 + trial);
    for (const auto& r : {solve_brute_force(inst), solve_held_karp(inst),
                          solve_heuristic(inst, 4, trial)}) {
      REQUIRE(r.tour.order.size() == 8);
      CHECK(r.tour.order.front() == 0);
      CHECK(r.tour.order.back() == 0);
      CHECK(r.tour.order[1] < r.tour.order[6]);
    }
  }
}

TEST_CASE("size guards") {
  CHECK_THROWS_AS(solve_brute_force(random_instance(12, 1)), std::invalid_argument);
  CHECK_THROWS_AS(solve_held_karp(random_instance(12, 2), 11), std::invalid_argument);
  CHECK_NOTHROW(solve_held_karp(random_instance(12, 3), 12));
}

TEST_CASE("normalize_tour rotates and reflects to canonical form") {
  const Tour canonical = normalize_tour(Tour{{2, 3, 0, 1, 4, 2}});
  CHECK(canonical.order.front() == 0);
  CHECK(canonical.order.back() == 0);
  CHECK(canonical.order[1] < canonical.order[canonical.order.size() - 2]);
  // Same cycle traversed backwards normalizes identically.
  const Tour reversed = normalize_tour(Tour{{2, 4, 1, 0, 3, 2}});
  CHECK(canonical.order == reversed.order);
}

TEST_CASE("heuristic tours are valid and 2-opt optimal") {
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 10 + trial;
    const Instance inst = random_instance(n, 70 + trial);
    const auto r = solve_heuristic(inst, 8, 42);
    CHECK_FALSE(r.exact);
    CHECK(is_closed_permutation(r.tour, n));
    CHECK(two_opt_optimal(distance_matrix(inst), r.tour));
    CHECK(tour_cost(inst, r.tour) == doctest::Approx(r.cost).epsilon(1e-12));
  }
}

TEST_CASE("heuristic never beats the optimum and is deterministic") {
  for (int trial = 0; trial < 8; ++trial) {
    const Instance inst = random_instance(8, 900 + trial);
    const auto exact = solve_brute_force(inst);
    const auto h1 = solve_heuristic(inst, 8, 7);
    const auto h2 = solve_heuristic(inst, 8, 7);
    CHECK(h1.cost >= exact.cost - 1e-9);
    CHECK(h1.tour.order == h2.tour.order);
  }
}

TEST_CASE("more restarts never worsen the heuristic") {
  const Instance inst = random_instance(13, 31);
  const auto few = solve_heuristic(inst, 1, 5);
  const auto many = solve_heuristic(inst, 16, 5);
  CHECK(many.cost <= few.cost + 1e-12);
}

TEST_CASE("reference solve picks the exact solver when allowed") {
  const Instance small = random_instance(9, 11);
  const auto exact_ref = solve_reference(small, 20, 4, 0);
  CHECK(exact_ref.exact);
  CHECK(exact_ref.method == SolveMethod::HeldKarp);
  CHECK(exact_ref.cost == doctest::Approx(solve_brute_force(small).cost).epsilon(1e-12));

  const auto heur_ref = solve_reference(small, 8, 4, 0);
  CHECK_FALSE(heur_ref.exact);
  CHECK(heur_ref.method == SolveMethod::Heuristic);
  CHECK(heur_ref.cost >= exact_ref.cost - 1e-9);
}

TEST_CASE("nearest neighbor starts where told and visits everything") {
  const Instance inst = random_instance(9, 77);
  const auto d = distance_matrix(inst);
  for (int start = 0; start < 9; ++start) {
    const auto order = nearest_neighbor_order(d, start);
    REQUIRE(order.size() == 9);
    CHECK(order.front() == start);
    std::set<int> seen(order.begin(), order.end());
    CHECK(seen.size() == 9);
  }
}

TEST_CASE("random cost samples are deterministic per seed and plausible") {
  const Instance inst = random_instance(10, 123);
  const auto a = sample_random_costs(inst, 500, 9);
  const auto b = sample_random_costs(inst, 500, 9);
  const auto c = sample_random_costs(inst, 500, 10);
  REQUIRE(a.n_samples() == 500);
  CHECK(a.costs == b.costs);
  CHECK(a.costs != c.costs);

  const double optimum = solve_held_karp(inst).cost;
  int strictly_above = 0;
  for (double cost : a.costs) {
    CHECK(cost >= optimum - 1e-9);
    if (cost > optimum + 1e-9) ++strictly_above;
  }
  // Uniformly random size-10 tours essentially never hit the optimum.
  CHECK(strictly_above > 450);
}

TEST_CASE("random cost sample rejects nonsense") {
  const Instance inst = random_instance(5, 5);
  CHECK_THROWS_AS(sample_random_costs(inst, 0, 1), std::invalid_argument);
}
