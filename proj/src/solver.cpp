#include "tspeval/solver.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tspeval/rng.hpp"

namespace tspeval {

// Nearest unvisited station, lowest index on ties.
std::vector<int> nearest_neighbor_order(const DistanceMatrix& d, int start) {
  const int n = d.size();
  std::vector<int> order;
  order.reserve(n);
  std::vector<char> visited(n, 0);
  int current = start;
  order.push_back(current);
  visited[current] = 1;
  for (int step = 1; step < n; ++step) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (!visited[j] && d.at(current, j) < best_d) {
        best_d = d.at(current, j);
        best = j;
      }
    }
    current = best;
    visited[current] = 1;
    order.push_back(current);
  }
  return order;
}

namespace {

Tour close_at_front(std::vector<int> order) {
  order.push_back(order.front());
  return Tour{std::move(order)};
}

// In-place 2-opt to a local optimum on an open order (closing edge implied).
void two_opt(const DistanceMatrix& d, std::vector<int>& order) {
  const int n = static_cast<int>(order.size());
  bool improved = true;
  while (improved) {
    improved = false;
    for (int i = 0; i < n - 1; ++i) {
      for (int j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;  // same edge pair
        const int a = order[i], b = order[i + 1];
        const int c = order[j], e = order[(j + 1) % n];
        const double delta = d.at(a, c) + d.at(b, e) - d.at(a, b) - d.at(c, e);
        if (delta < -1e-12) {
          std::reverse(order.begin() + i + 1, order.begin() + j + 1);
          improved = true;
        }
      }
    }
  }
}

}  // namespace

std::string to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::BruteForce: return "brute_force";
    case SolveMethod::HeldKarp: return "held_karp";
    case SolveMethod::Heuristic: return "heuristic";
  }
  return "heuristic";
}

Tour normalize_tour(const Tour& t) {
  if (!t.closed() || t.order.size() < 4) return t;
  std::vector<int> open(t.order.begin(), t.order.end() - 1);
  const int n = static_cast<int>(open.size());
  auto zero = std::find(open.begin(), open.end(), 0);
  if (zero == open.end()) return t;
  std::rotate(open.begin(), zero, open.end());
  if (open[1] > open[n - 1]) {
    std::reverse(open.begin() + 1, open.end());
  }
  return close_at_front(std::move(open));
}

SolverResult solve_brute_force(const Instance& inst) {
  const int n = inst.size();
  if (n > kBruteForceLimit) {
    throw std::invalid_argument("brute force limited to " +
                                std::to_string(kBruteForceLimit) + " stations, got " +
                                std::to_string(n));
  }
  const DistanceMatrix d = distance_matrix(inst);

  std::vector<int> perm(n - 1);
  std::iota(perm.begin(), perm.end(), 1);
  std::vector<int> best_perm = perm;
  double best = std::numeric_limits<double>::infinity();
  do {
    if (perm.front() > perm.back()) continue;  // direction-normalized half
    double c = d.at(0, perm.front());
    for (int i = 0; i + 1 < n - 1; ++i) c += d.at(perm[i], perm[i + 1]);
    c += d.at(perm.back(), 0);
    if (c < best) {
      best = c;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<int> order;
  order.reserve(n + 1);
  order.push_back(0);
  order.insert(order.end(), best_perm.begin(), best_perm.end());
  Tour tour = normalize_tour(close_at_front(std::move(order)));
  return SolverResult{std::move(tour), best, SolveMethod::BruteForce, true};
}

SolverResult solve_held_karp(const Instance& inst, int limit) {
  const int n = inst.size();
  if (limit > 24) {
    throw std::invalid_argument("exact limit above 24 is not supported");
  }
  if (n > limit) {
    throw std::invalid_argument("instance size " + std::to_string(n) +
                                " exceeds exact solver limit " + std::to_string(limit));
  }
  const DistanceMatrix d = distance_matrix(inst);
  const int m = n - 1;  // stations 1..n-1 mapped to bits 0..m-1
  const std::size_t full = std::size_t{1} << m;
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> dp(full * m, inf);
  std::vector<std::int8_t> parent(full * m, -1);
  for (int j = 0; j < m; ++j) {
    dp[(std::size_t{1} << j) * m + j] = d.at(0, j + 1);
  }
  for (std::size_t mask = 1; mask < full; ++mask) {
    for (int j = 0; j < m; ++j) {
      if (!(mask & (std::size_t{1} << j))) continue;
      const double base = dp[mask * m + j];
      if (base == inf) continue;
      for (int t = 0; t < m; ++t) {
        if (mask & (std::size_t{1} << t)) continue;
        const std::size_t next = mask | (std::size_t{1} << t);
        const double cand = base + d.at(j + 1, t + 1);
        if (cand < dp[next * m + t]) {
          dp[next * m + t] = cand;
          parent[next * m + t] = static_cast<std::int8_t>(j);
        }
      }
    }
  }

  const std::size_t all = full - 1;
  int last = 0;
  double best = inf;
  for (int j = 0; j < m; ++j) {
    const double cand = dp[all * m + j] + d.at(j + 1, 0);
    if (cand < best) {
      best = cand;
      last = j;
    }
  }

  std::vector<int> rev;
  std::size_t mask = all;
  int j = last;
  while (j >= 0) {
    rev.push_back(j + 1);
    const int p = parent[mask * m + j];
    mask &= ~(std::size_t{1} << j);
    j = p;
  }
  std::vector<int> order;
  order.reserve(n + 1);
  order.push_back(0);
  order.insert(order.end(), rev.rbegin(), rev.rend());
  Tour tour = normalize_tour(close_at_front(std::move(order)));
  return SolverResult{std::move(tour), best, SolveMethod::HeldKarp, true};
}

SolverResult solve_heuristic(const Instance& inst, int restarts, std::uint64_t seed) {
  const int n = inst.size();
  if (n < 3) {
    throw std::invalid_argument("instance needs at least 3 points");
  }
  const DistanceMatrix d = distance_matrix(inst);
  const int passes = std::max(1, restarts);

  std::vector<int> best_order;
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < passes; ++r) {
    std::vector<int> order;
    if (r < n) {
      order = nearest_neighbor_order(d, r);
    } else {
      order.resize(n);
      std::iota(order.begin(), order.end(), 0);
      Rng rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
      rng.shuffle(order);
    }
    two_opt(d, order);
    double c = 0.0;
    for (int i = 0; i < n; ++i) c += d.at(order[i], order[(i + 1) % n]);
    if (c < best - 1e-12) {
      best = c;
      best_order = order;
    }
  }
  Tour tour = normalize_tour(close_at_front(std::move(best_order)));
  return SolverResult{std::move(tour), best, SolveMethod::Heuristic, false};
}

SolverResult solve_reference(const Instance& inst, int exact_limit, int restarts,
                             std::uint64_t seed) {
  if (inst.size() <= exact_limit) {
    return solve_held_karp(inst, exact_limit);
  }
  return solve_heuristic(inst, restarts, seed);
}

RandomCostSample sample_random_costs(const Instance& inst, int n_samples,
                                     std::uint64_t seed) {
  if (n_samples < 1) {
    throw std::invalid_argument("n_samples must be at least 1");
  }
  const DistanceMatrix d = distance_matrix(inst);
  const int n = d.size();
  Rng rng(seed);
  RandomCostSample sample;
  sample.seed = seed;
  sample.costs.reserve(n_samples);
  std::vector<int> order(n);
  for (int s = 0; s < n_samples; ++s) {
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    double c = 0.0;
    for (int i = 0; i < n; ++i) c += d.at(order[i], order[(i + 1) % n]);
    sample.costs.push_back(c);
  }
  return sample;
}

bool two_opt_optimal(const DistanceMatrix& d, const Tour& t, double eps) {
  if (!t.closed()) return false;
  std::vector<int> order(t.order.begin(), t.order.end() - 1);
  const int n = static_cast<int>(order.size());
  for (int i = 0; i < n - 1; ++i) {
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      const int a = order[i], b = order[i + 1];
      const int c = order[j], e = order[(j + 1) % n];
      if (d.at(a, c) + d.at(b, e) - d.at(a, b) - d.at(c, e) < -eps) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace tspeval
