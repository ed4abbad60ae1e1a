#include "tspeval/core.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace tspeval {

std::string to_string(Source s) {
  switch (s) {
    case Source::Tsplib: return "tsplib";
    case Source::Random: return "random";
    case Source::Inline: return "inline";
  }
  return "inline";
}

Source source_from_string(const std::string& s) {
  if (s == "tsplib") return Source::Tsplib;
  if (s == "random") return Source::Random;
  if (s == "inline") return Source::Inline;
  throw std::invalid_argument("unknown instance source: " + s);
}

DistanceMatrix::DistanceMatrix(int n, std::vector<double> data)
    : n_(n), data_(std::move(data)) {
  if (n_ < 0 || data_.size() != static_cast<std::size_t>(n_) * n_) {
    throw std::invalid_argument("distance matrix data does not match size");
  }
}

double euclidean(Point a, Point b) {
  const double dx = static_cast<double>(a.x - b.x);
  const double dy = static_cast<double>(a.y - b.y);
  return std::hypot(dx, dy);
}

DistanceMatrix distance_matrix(const Instance& inst) {
  const int n = inst.size();
  if (n < 3) {
    throw std::invalid_argument("instance '" + inst.id + "' needs at least 3 points");
  }
  std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = euclidean(inst.points[i], inst.points[j]);
      d[static_cast<std::size_t>(i) * n + j] = v;
      d[static_cast<std::size_t>(j) * n + i] = v;
    }
  }
  return DistanceMatrix(n, std::move(d));
}

TourCost tour_cost(const Instance& inst, const Tour& t) {
  const int n = inst.size();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < t.order.size(); ++i) {
    const int a = t.order[i];
    const int b = t.order[i + 1];
    if (a < 0 || a >= n || b < 0 || b >= n) {
      throw std::invalid_argument("malformed tour: station index out of range");
    }
    total += euclidean(inst.points[a], inst.points[b]);
  }
  return total;
}

TourCost tour_cost(const DistanceMatrix& d, const Tour& t) {
  const int n = d.size();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < t.order.size(); ++i) {
    const int a = t.order[i];
    const int b = t.order[i + 1];
    if (a < 0 || a >= n || b < 0 || b >= n) {
      throw std::invalid_argument("malformed tour: station index out of range");
    }
    total += d.at(a, b);
  }
  return total;
}

std::string format_number(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

}  // namespace tspeval
