#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace neuroevo {

// Maximum of each consecutive block of `window` values; a trailing partial
// block is padded with its last value.
std::vector<double> best_of_window(std::span<const double> series, std::size_t window = 100);

enum class Alternative { less, greater, two_sided };

struct MannWhitneyResult {
  double u = 0.0;  // pairs with a > b, ties counted one half
  double p = 1.0;
  bool exact = false;
};

// Exact permutation distribution (midranks under ties) when n*m <= 400,
// otherwise the tie-corrected normal approximation with continuity correction.
// `less` tests whether a tends to be smaller than b.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 Alternative alternative);

inline constexpr double kSignificance = 0.05;

double mean(std::span<const double> values);

// Relative change of the ablated mean against the control, in percent; the
// sign says better (positive) or worse for larger-is-better rewards.
double percentage_change(double control_mean, double ablated_mean);

struct Comparison {
  double control_mean = 0.0;
  double ablated_mean = 0.0;
  double percent = 0.0;
  double p_worse = 1.0;   // one-sided, ablated < control
  double p_better = 1.0;  // one-sided, ablated > control
  std::string tag;        // "W(p)", "B(p)" or "()"
};

Comparison compare_samples(std::span<const double> control, std::span<const double> ablated);

}  // namespace neuroevo
