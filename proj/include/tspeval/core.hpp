#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tspeval {

struct Point {
  std::int64_t x = 0;
  std::int64_t y = 0;
  bool operator==(const Point&) const = default;
};

enum class Source { Tsplib, Random, Inline };

std::string to_string(Source s);
Source source_from_string(const std::string& s);

// A journey: labeled 2-D stations, indices 0..n-1 given by list position.
// Duplicate coordinates are allowed.
struct Instance {
  std::string id;
  std::vector<Point> points;
  Source source = Source::Inline;

  int size() const { return static_cast<int>(points.size()); }
};

// Symmetric pairwise Euclidean distances, full double precision.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(int n, std::vector<double> data);

  int size() const { return n_; }
  double at(int i, int j) const { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  const std::vector<double>& data() const { return data_; }

 private:
  int n_ = 0;
  std::vector<double> data_;
};

// A visiting order over station indices. A closed tour repeats its start
// index as the final element (length n+1 when it covers all stations).
struct Tour {
  std::vector<int> order;

  bool closed() const { return order.size() >= 2 && order.front() == order.back(); }
  int stops() const { return static_cast<int>(order.size()); }
};

using TourCost = double;

double euclidean(Point a, Point b);

// Requires at least 3 points.
DistanceMatrix distance_matrix(const Instance& inst);

// Sum of consecutive edge distances along t.order. Throws on out-of-range
// indices; does not check that the order is a Hamiltonian cycle.
TourCost tour_cost(const Instance& inst, const Tour& t);
TourCost tour_cost(const DistanceMatrix& d, const Tour& t);

// Rendering convention for prompts and answers: fixed decimals, then
// trailing zeros (and a bare point) trimmed, so 200.00 -> "200" and
// 728.0109 -> "728.01".
std::string format_number(double v, int decimals = 2);

}  // namespace tspeval
