#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tspeval/core.hpp"

namespace tspeval {

inline constexpr int kBruteForceLimit = 11;
inline constexpr int kDefaultExactLimit = 20;

enum class SolveMethod { BruteForce, HeldKarp, Heuristic };

std::string to_string(SolveMethod m);

struct SolverResult {
  Tour tour;        // closed, anchored at station 0, direction-normalized
  TourCost cost = 0.0;
  SolveMethod method = SolveMethod::Heuristic;
  bool exact = false;
};

// Costs of uniformly random closed tours, used for the randomness score.
struct RandomCostSample {
  std::vector<TourCost> costs;
  std::uint64_t seed = 0;

  int n_samples() const { return static_cast<int>(costs.size()); }
};

// Open greedy order from `start` (must be in [0, n)), nearest unvisited
// station next, lowest index on ties.
std::vector<int> nearest_neighbor_order(const DistanceMatrix& d, int start);

// Exhaustive enumeration over (n-1)!/2 direction-normalized tours.
// Guarded at n <= 11.
SolverResult solve_brute_force(const Instance& inst);

// Exact O(n^2 * 2^n) dynamic program over subsets. Guarded at n <= limit.
SolverResult solve_held_karp(const Instance& inst, int limit = kDefaultExactLimit);

// Multi-start nearest-neighbor + 2-opt. `restarts` is the number of
// starts (0 behaves as 1); starts rotate through the stations and fall
// back to seeded random initial tours once every station has been tried.
SolverResult solve_heuristic(const Instance& inst, int restarts = 1,
                             std::uint64_t seed = 0);

// Exact solve when n fits under exact_limit, heuristic reference above it.
SolverResult solve_reference(const Instance& inst, int exact_limit = kDefaultExactLimit,
                             int restarts = 8, std::uint64_t seed = 0);

RandomCostSample sample_random_costs(const Instance& inst, int n_samples,
                                     std::uint64_t seed);

// Rotate a closed tour so it starts at station 0 and reverse it if needed
// so the second visited index is smaller than the last visited one.
Tour normalize_tour(const Tour& t);

// True when no 2-opt move improves the closed tour by more than eps.
bool two_opt_optimal(const DistanceMatrix& d, const Tour& t, double eps = 1e-9);

}  // namespace tspeval
