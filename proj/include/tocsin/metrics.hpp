#pragma once

// Reducers over completed score lists: AUROC, Pearson correlation and
// equal-width histograms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "tocsin/errors.hpp"

namespace tocsin {

/// P(pos > neg) + 0.5 * P(pos == neg), via mid-ranks of the pooled sample
/// (Mann-Whitney U). Exact: the numerator is accumulated in doubled integer
/// ranks.
inline double auroc(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty() || neg.empty()) throw InputError("auroc requires non-empty positive and negative sets");
  struct Item {
    double score;
    bool positive;
  };
  std::vector<Item> pooled;
  pooled.reserve(pos.size() + neg.size());
  for (double s : pos) {
    if (!std::isfinite(s)) throw InputError("auroc requires finite scores");
    pooled.push_back({s, true});
  }
  for (double s : neg) {
    if (!std::isfinite(s)) throw InputError("auroc requires finite scores");
    pooled.push_back({s, false});
  }
  std::sort(pooled.begin(), pooled.end(), [](const Item& a, const Item& b) { return a.score < b.score; });

  // Sum of doubled mid-ranks (1-based) of the positives.
  std::uint64_t rank_sum2 = 0;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    std::size_t positives = 0;
    while (j < pooled.size() && pooled[j].score == pooled[i].score) {
      if (pooled[j].positive) ++positives;
      ++j;
    }
    // Ranks i+1 .. j share the mid-rank (i + 1 + j) / 2.
    rank_sum2 += static_cast<std::uint64_t>(positives) * (i + 1 + j);
    i = j;
  }
  const auto np = static_cast<std::uint64_t>(pos.size());
  const auto nn = static_cast<std::uint64_t>(neg.size());
  // 2U = 2 * R_pos - np * (np + 1)
  const std::uint64_t u2 = rank_sum2 - np * (np + 1);
  return static_cast<double>(u2) / (2.0 * static_cast<double>(np * nn));
}

/// Sample Pearson correlation. Throws InputError for unequal lengths, fewer
/// than two points, or a constant input.
inline double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("pearson requires equal lengths");
  if (a.size() < 2) throw InputError("pearson requires at least two points");
  const auto n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw InputError("undefined correlation: constant input");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

struct Histogram {
  std::vector<double> edges;        // bins + 1 edges, shared by both labels
  std::vector<std::size_t> human;   // counts per bin
  std::vector<std::size_t> llm;
};

/// Equal-width bins over the pooled [min, max]; the last bin is closed. When
/// every value is equal a single bin [v, v] holds everything.
inline Histogram export_histograms(std::span<const double> human, std::span<const double> llm,
                                   std::size_t bins) {
  if (bins == 0) throw InputError("bins must be >= 1");
  if (human.empty() && llm.empty()) throw InputError("histogram requires values");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (auto side : {human, llm}) {
    for (double x : side) {
      if (!std::isfinite(x)) throw InputError("histogram requires finite values");
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  Histogram h;
  if (lo == hi) {
    h.edges = {lo, hi};
    h.human = {human.size()};
    h.llm = {llm.size()};
    return h;
  }
  const double step = (hi - lo) / static_cast<double>(bins);
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i < bins; ++i) h.edges[i] = lo + static_cast<double>(i) * step;
  h.edges[bins] = hi;

  const double norm = static_cast<double>(bins) / (hi - lo);
  const auto bin_of = [&](double x) {
    auto idx = static_cast<std::size_t>(std::min((x - lo) * norm, static_cast<double>(bins - 1)));
    // Settle rounding at the edges against the edge values themselves.
    if (idx > 0 && x < h.edges[idx]) --idx;
    if (idx + 1 < bins && x >= h.edges[idx + 1]) ++idx;
    return idx;
  };
  h.human.assign(bins, 0);
  h.llm.assign(bins, 0);
  for (double x : human) ++h.human[bin_of(x)];
  for (double x : llm) ++h.llm[bin_of(x)];
  return h;
}

/// Histogram intersection of the two label distributions, each normalized to
/// unit mass. 1 means identical binned distributions, 0 means disjoint.
inline double histogram_overlap(const Histogram& h) {
  const auto nh = std::accumulate(h.human.begin(), h.human.end(), std::size_t{0});
  const auto nl = std::accumulate(h.llm.begin(), h.llm.end(), std::size_t{0});
  if (nh == 0 || nl == 0) throw InputError("overlap requires values for both labels");
  double total = 0.0;
  for (std::size_t b = 0; b < h.human.size(); ++b) {
    total += std::min(static_cast<double>(h.human[b]) / static_cast<double>(nh),
                      static_cast<double>(h.llm[b]) / static_cast<double>(nl));
  }
  return total;
}

}  // namespace tocsin
