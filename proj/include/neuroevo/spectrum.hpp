#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "neuroevo/model.hpp"

namespace neuroevo {

// Counts over hidden neurons, in the order
// [identity, sigmoid, threshold, random, control, slow].
// A neuron with adaptation speed above one also counts as slow.
using Spectrum = std::array<int, 6>;

Spectrum compute_spectrum(const Genome& genome);

std::vector<double> as_point(const Spectrum& spectrum);

double euclidean_distance(std::span<const double> a, std::span<const double> b);

// Minimum distance from set[index] to every other element; +inf for a lone
// element.
double uniqueness(std::span<const std::vector<double>> set, std::size_t index);

// Bounded table of the most novel points seen so far. A presented point either
// fills a free cell, replaces the least unique cell when it is more unique
// than that cell, or is discarded; the nearest cell is returned either way.
class NoveltyMap {
 public:
  explicit NoveltyMap(std::size_t capacity = 20);

  std::size_t present(std::span<const double> point);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return cells_.size(); }
  std::span<const std::vector<double>> cells() const { return cells_; }

  std::size_t nearest(std::span<const double> point) const;

  // `cell_id v0 v1 ...` per line.
  void dump(std::ostream& out) const;
  static NoveltyMap restore(std::istream& in, std::size_t capacity);

  friend bool operator==(const NoveltyMap&, const NoveltyMap&) = default;

 private:
  std::size_t capacity_;
  std::vector<std::vector<double>> cells_;
};

}  // namespace neuroevo
