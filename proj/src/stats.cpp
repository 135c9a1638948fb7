#include "neuroevo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace neuroevo {

std::vector<double> best_of_window(std::span<const double> series, std::size_t window) {
  if (series.empty()) throw std::invalid_argument("best_of_window: empty series");
  if (window == 0) throw std::invalid_argument("best_of_window: zero window");
  std::vector<double> out;
  for (std::size_t begin = 0; begin < series.size(); begin += window) {
    const std::size_t end = std::min(series.size(), begin + window);
    out.push_back(*std::max_element(series.begin() + static_cast<std::ptrdiff_t>(begin),
                                    series.begin() + static_cast<std::ptrdiff_t>(end)));
  }
  return out;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 Alternative alternative) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: empty sample");
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t total = n + m;

  // Doubled midranks keep every rank sum integral.
  std::vector<std::pair<double, bool>> pooled;
  pooled.reserve(total);
  for (double v : a) pooled.emplace_back(v, true);
  for (double v : b) pooled.emplace_back(v, false);
  std::ranges::sort(pooled, {}, &std::pair<double, bool>::first);
  std::vector<long> rank2(total);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < total;) {
    std::size_t j = i;
    while (j < total && pooled[j].first == pooled[i].first) ++j;
    const long midrank2 = static_cast<long>(i + 1 + j);  // (i+1 + j) = 2 * midrank
    for (std::size_t k = i; k < j; ++k) rank2[k] = midrank2;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  long observed2 = 0;
  for (std::size_t k = 0; k < total; ++k) {
    if (pooled[k].second) observed2 += rank2[k];
  }

  MannWhitneyResult result;
  const double offset = static_cast<double>(n * (n + 1)) / 2.0;
  result.u = static_cast<double>(observed2) / 2.0 - offset;

  double p_less = 1.0;
  double p_greater = 1.0;
  if (n * m <= 400) {
    // counts[k][s]: subsets of size k whose doubled rank sum is s, built over
    // the smaller sample's size.
    const long total2 = std::accumulate(rank2.begin(), rank2.end(), 0L);
    const bool flip = n > m;
    const std::size_t k_max = flip ? m : n;
    const long target2 = flip ? total2 - observed2 : observed2;
    std::vector<std::vector<double>> counts(k_max + 1, std::vector<double>(static_cast<std::size_t>(total2) + 1, 0.0));
    counts[0][0] = 1.0;
    for (std::size_t item = 0; item < total; ++item) {
      const auto r = static_cast<std::size_t>(rank2[item]);
      for (std::size_t k = std::min(k_max, item + 1); k >= 1; --k) {
        auto& row = counts[k];
        const auto& prev = counts[k - 1];
        for (std::size_t s = static_cast<std::size_t>(total2); s >= r; --s) {
          if (prev[s - r] != 0.0) row[s] += prev[s - r];
          if (s == r) break;
        }
      }
    }
    double all = 0.0;
    double at_most = 0.0;
    double at_least = 0.0;
    for (std::size_t s = 0; s < counts[k_max].size(); ++s) {
      const double c = counts[k_max][s];
      if (c == 0.0) continue;
      all += c;
      if (static_cast<long>(s) <= target2) at_most += c;
      if (static_cast<long>(s) >= target2) at_least += c;
    }
    // A small rank sum for b is a large one for a.
    p_less = (flip ? at_least : at_most) / all;
    p_greater = (flip ? at_most : at_least) / all;
    result.exact = true;
  } else {
    const double nm = static_cast<double>(n * m);
    const double nt = static_cast<double>(total);
    const double mu = nm / 2.0;
    const double variance = nm / 12.0 * ((nt + 1.0) - tie_term / (nt * (nt - 1.0)));
    if (variance <= 0.0) {
      p_less = p_greater = 1.0;
    } else {
      const double sd = std::sqrt(variance);
      p_less = normal_cdf((result.u + 0.5 - mu) / sd);
      p_greater = 1.0 - normal_cdf((result.u - 0.5 - mu) / sd);
    }
  }

  switch (alternative) {
    case Alternative::less: result.p = p_less; break;
    case Alternative::greater: result.p = p_greater; break;
    case Alternative::two_sided: result.p = std::min(1.0, 2.0 * std::min(p_less, p_greater)); break;
  }
  return result;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double percentage_change(double control_mean, double ablated_mean) {
  if (control_mean == 0.0) return ablated_mean == 0.0 ? 0.0 : std::copysign(INFINITY, ablated_mean);
  return (ablated_mean - control_mean) / std::abs(control_mean) * 100.0;
}

Comparison compare_samples(std::span<const double> control, std::span<const double> ablated) {
  Comparison c;
  c.control_mean = mean(control);
  c.ablated_mean = mean(ablated);
  c.percent = percentage_change(c.control_mean, c.ablated_mean);
  c.p_worse = mann_whitney_u(ablated, control, Alternative::less).p;
  c.p_better = mann_whitney_u(ablated, control, Alternative::greater).p;
  char buf[48];
  if (c.p_worse < kSignificance) {
    std::snprintf(buf, sizeof buf, "W(%.3g)", c.p_worse);
  } else if (c.p_better < kSignificance) {
    std::snprintf(buf, sizeof buf, "B(%.3g)", c.p_better);
  } else {
    std::snprintf(buf, sizeof buf, "()");
  }
  c.tag = buf;
  return c;
}

}  // namespace neuroevo
