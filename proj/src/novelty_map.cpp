#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "neuroevo/spectrum.hpp"

namespace neuroevo {

NoveltyMap::NoveltyMap(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("novelty map capacity must be positive");
}

std::size_t NoveltyMap::nearest(std::span<const double> point) const {
  if (cells_.empty()) throw std::logic_error("novelty map is empty");
  std::size_t best = 0;
  double best_distance = euclidean_distance(point, cells_[0]);
  for (std::size_t k = 1; k < cells_.size(); ++k) {
    const double d = euclidean_distance(point, cells_[k]);
    if (d < best_distance) {
      best = k;
      best_distance = d;
    }
  }
  return best;
}

std::size_t NoveltyMap::present(std::span<const double> point) {
  if (!cells_.empty() && point.size() != cells_.front().size()) {
    throw std::invalid_argument("point dimension differs from stored cells");
  }
  const bool stored = std::ranges::any_of(
      cells_, [&](const std::vector<double>& c) { return std::ranges::equal(c, point); });

  if (!stored) {
    if (cells_.size() < capacity_) {
      cells_.emplace_back(point.begin(), point.end());
    } else {
      // Least unique stored cell, lowest index on ties.
      std::size_t victim = 0;
      double victim_uniqueness = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < cells_.size(); ++k) {
        const double u = uniqueness(cells_, k);
        if (u < victim_uniqueness) {
          victim = k;
          victim_uniqueness = u;
        }
      }
      double candidate = std::numeric_limits<double>::infinity();
      for (const auto& c : cells_) candidate = std::min(candidate, euclidean_distance(point, c));
      if (candidate > victim_uniqueness) cells_[victim].assign(point.begin(), point.end());
    }
  }
  return nearest(point);
}

void NoveltyMap::dump(std::ostream& out) const {
  char buf[32];
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    out << k;
    for (double v : cells_[k]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ' ' << buf;
    }
    out << '\n';
  }
}

NoveltyMap NoveltyMap::restore(std::istream& in, std::size_t capacity) {
  NoveltyMap map(capacity);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) break;
    std::istringstream fields(line);
    std::size_t id = 0;
    if (!(fields >> id) || id != map.cells_.size()) {
      throw std::runtime_error("novelty map dump: cells must be listed in order");
    }
    std::vector<double> cell;
    for (double v; fields >> v;) cell.push_back(v);
    map.cells_.push_back(std::move(cell));
  }
  if (map.cells_.size() > capacity) throw std::runtime_error("novelty map dump exceeds capacity");
  return map;
}

}  // namespace neuroevo
