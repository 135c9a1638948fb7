#include <cmath>

#include "neuroevo/spectrum.hpp"

namespace neuroevo {

Spectrum compute_spectrum(const Genome& genome) {
  Spectrum counts{};
  for (const auto& n : genome.neurons()) {
    if (n.is_interface()) continue;
    ++counts[static_cast<std::size_t>(n.activation)];
    if (n.adaptation_speed > 1) ++counts[5];
  }
  return counts;
}

std::vector<double> as_point(const Spectrum& spectrum) {
  return {spectrum.begin(), spectrum.end()};
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double uniqueness(std::span<const std::vector<double>> set, std::size_t index) {
  if (index >= set.size()) throw std::out_of_range("uniqueness index");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (k == index) continue;
    best = std::min(best, euclidean_distance(set[index], set[k]));
  }
  return best;
}

}  // namespace neuroevo
