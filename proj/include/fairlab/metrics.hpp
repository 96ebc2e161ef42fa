#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairlab/dataset.hpp"
#include "fairlab/errors.hpp"

namespace fairlab {

// Ratio of between-group to within-group sum of squares of the feature V:
//   SSB = sum_i N_i (mu_i - mean)^2,  SSW = sum_i sum_j (x_ij - mu_i)^2.
// No degrees-of-freedom normalization; weights are ignored.
inline double group_skew(const Dataset& data) {
  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
  };
  std::map<int, Acc> acc;
  double total = 0.0;
  for (const auto& r : data.records) {
    auto& a = acc[r.g];
    a.sum += r.v;
    ++a.n;
    total += r.v;
  }
  if (acc.size() < 2) throw UndefinedMetric("group skew needs at least two groups");
  const double grand = total / static_cast<double>(data.size());

  std::map<int, double> mean;
  double ssb = 0.0;
  for (const auto& [g, a] : acc) {
    const double mu = a.sum / static_cast<double>(a.n);
    mean[g] = mu;
    ssb += static_cast<double>(a.n) * (mu - grand) * (mu - grand);
  }
  double ssw = 0.0;
  for (const auto& r : data.records) {
    const double d = r.v - mean[r.g];
    ssw += d * d;
  }
  if (!(ssw > 0.0)) throw DegenerateVariance("within-group sum of squares is zero");
  return ssb / ssw;
}

// Pr(Y=1 | G=g), by counts or by weight totals.
inline double favorable_rate(const Dataset& data, int g, bool weighted = false) {
  const auto t = count_cells(data, weighted);
  if (!(t.group(g) > 0.0)) {
    throw UndefinedMetric("group " + std::to_string(g) + " is absent (or has zero total weight)");
  }
  return t.cell[g][1] / t.group(g);
}

// Pr(Y=1|G=0) - Pr(Y=1|G=1).
inline double statistical_parity_difference(const Dataset& data, bool weighted = false) {
  return favorable_rate(data, 0, weighted) - favorable_rate(data, 1, weighted);
}

// Pr(Y=1|G=0) / Pr(Y=1|G=1).
inline double disparate_impact_ratio(const Dataset& data, bool weighted = false) {
  const double p0 = favorable_rate(data, 0, weighted);
  const double p1 = favorable_rate(data, 1, weighted);
  if (!(p1 > 0.0)) throw UndefinedRatio("group 1 has no favorable outcomes");
  return p0 / p1;
}

// Pearson correlation of G and Y over the 2x2 table.
inline double phi_coefficient(const Dataset& data, bool weighted = false) {
  const auto t = count_cells(data, weighted);
  const double g1 = t.group(1), g0 = t.group(0), y1 = t.outcome(1), y0 = t.outcome(0);
  if (!(g1 > 0.0 && g0 > 0.0 && y1 > 0.0 && y0 > 0.0)) {
    throw UndefinedMetric("phi needs both groups and both outcomes present");
  }
  const double num = t.cell[1][1] * t.cell[0][0] - t.cell[1][0] * t.cell[0][1];
  return num / std::sqrt(g1 * g0 * y1 * y0);
}

inline double accuracy(std::span<const int> truth, std::span<const int> pred) {
  if (truth.empty() || truth.size() != pred.size()) {
    throw InvalidArgument("accuracy needs equal, nonzero lengths");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == pred[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

inline double weighted_accuracy(std::span<const int> truth, std::span<const int> pred,
                                std::span<const double> weights) {
  if (truth.empty() || truth.size() != pred.size() || truth.size() != weights.size()) {
    throw InvalidArgument("weighted accuracy needs equal, nonzero lengths");
  }
  double hit = 0.0, total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    total += weights[i];
    if (truth[i] == pred[i]) hit += weights[i];
  }
  if (!(total > 0.0)) throw DegenerateWeights("total weight is zero");
  return hit / total;
}

// max over y of |Pr(pred=1 | G=1, Y=y) - Pr(pred=1 | G=0, Y=y)|.
inline double equalized_odds_gap(std::span<const int> truth, std::span<const int> pred,
                                 std::span<const int> groups) {
  if (truth.empty() || truth.size() != pred.size() || truth.size() != groups.size()) {
    throw InvalidArgument("equalized odds needs equal, nonzero lengths");
  }
  double positive[2][2] = {};
  double count[2][2] = {};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    count[groups[i]][truth[i]] += 1.0;
    positive[groups[i]][truth[i]] += pred[i] == 1;
  }
  double gap = 0.0;
  for (int y = 0; y < 2; ++y) {
    for (int g = 0; g < 2; ++g) {
      if (count[g][y] == 0.0) {
        throw UndefinedMetric("equalized odds: cell (g=" + std::to_string(g) + ", y=" + std::to_string(y) +
                              ") is empty");
      }
    }
    gap = std::max(gap, std::abs(positive[1][y] / count[1][y] - positive[0][y] / count[0][y]));
  }
  return gap;
}

// Earth mover's distance between two empirical distributions on the line:
// the integral over t in [0,1] of |Qa(t) - Qb(t)| with step quantile functions.
inline double wasserstein_1d(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("wasserstein_1d needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto n = static_cast<std::uint64_t>(a.size());
  const auto m = static_cast<std::uint64_t>(b.size());
  std::uint64_t i = 0, j = 0;
  double t = 0.0, dist = 0.0;
  while (i < n && j < m) {
    // Compare the next breakpoints (i+1)/n and (j+1)/m exactly.
    const std::uint64_t lhs = (i + 1) * m, rhs = (j + 1) * n;
    const double next = lhs <= rhs ? static_cast<double>(i + 1) / static_cast<double>(n)
                                   : static_cast<double>(j + 1) / static_cast<double>(m);
    dist += (next - t) * std::abs(a[i] - b[j]);
    t = next;
    if (lhs <= rhs) ++i;
    if (rhs <= lhs) ++j;
  }
  return dist;
}

// Same distance for weighted samples, as the integral over x of
// |Fa(x) - Fb(x)| between the weighted empirical CDFs.
inline double wasserstein_1d_weighted(std::span<const double> a, std::span<const double> wa,
                                      std::span<const double> b, std::span<const double> wb) {
  if (a.empty() || b.empty()) throw InvalidArgument("wasserstein_1d needs nonempty samples");
  if (a.size() != wa.size() || b.size() != wb.size()) throw InvalidArgument("weights must match samples");
  // (value, signed normalized mass): + for a, - for b.
  std::vector<std::pair<double, double>> pts;
  pts.reserve(a.size() + b.size());
  const double ta = std::accumulate(wa.begin(), wa.end(), 0.0);
  const double tb = std::accumulate(wb.begin(), wb.end(), 0.0);
  if (!(ta > 0.0 && tb > 0.0)) throw DegenerateWeights("wasserstein_1d needs positive total weight");
  for (std::size_t i = 0; i < a.size(); ++i) pts.emplace_back(a[i], wa[i] / ta);
  for (std::size_t i = 0; i < b.size(); ++i) pts.emplace_back(b[i], -wb[i] / tb);
  std::sort(pts.begin(), pts.end());
  double cdf_gap = 0.0, dist = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    cdf_gap += pts[i].second;
    dist += std::abs(cdf_gap) * (pts[i + 1].first - pts[i].first);
  }
  return dist;
}

// Per-group distortion between original and transformed feature values,
// summed over groups present in both. With `weighted`, record weights define
// both empirical distributions.
inline double distortion(const Dataset& original, const Dataset& transformed, bool weighted = false) {
  double sum = 0.0;
  for (int g = 0; g < 2; ++g) {
    if (!weighted) {
      auto a = values_of_group(original, g);
      auto b = values_of_group(transformed, g);
      if (a.empty() || b.empty()) continue;
      sum += wasserstein_1d(std::move(a), std::move(b));
      continue;
    }
    std::vector<double> a, wa, b, wb;
    for (const auto& r : original.records) {
      if (r.g == g) a.push_back(r.v), wa.push_back(r.w);
    }
    for (const auto& r : transformed.records) {
      if (r.g == g) b.push_back(r.v), wb.push_back(r.w);
    }
    if (a.empty() || b.empty()) continue;
    sum += wasserstein_1d_weighted(a, wa, b, wb);
  }
  return sum;
}

struct HistogramData {
  int group_id = 0;
  std::vector<double> bin_edges;
  std::vector<std::uint64_t> counts;
};

// Bins are [e_i, e_{i+1}) except the last, which is closed. Out-of-range
// values are clamped into the end bins.
inline HistogramData histogram(std::span<const double> values, std::size_t bins, double lo, double hi,
                               int group_id = 0) {
  if (bins < 1) throw InvalidArgument("histogram needs at least one bin");
  if (!(lo < hi)) throw InvalidArgument("histogram range must satisfy lo < hi");
  HistogramData h;
  h.group_id = group_id;
  h.bin_edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i < bins; ++i) h.bin_edges[i] = lo + width * static_cast<double>(i);
  h.bin_edges[bins] = hi;
  h.counts.assign(bins, 0);

  for (double x : values) {
    std::size_t idx = 0;
    if (x >= hi) {
      idx = bins - 1;
    } else if (x > lo) {
      idx = std::min(static_cast<std::size_t>((x - lo) / width), bins - 1);
      // Settle floating-point disagreement with the stored edges.
      while (idx > 0 && x < h.bin_edges[idx]) --idx;
      while (idx + 1 < bins && x >= h.bin_edges[idx + 1]) ++idx;
    }
    ++h.counts[idx];
  }
  return h;
}

inline void to_json(nlohmann::json& j, const HistogramData& h) {
  j = {{"group_id", h.group_id}, {"bin_edges", h.bin_edges}, {"counts", h.counts}};
}

struct MetricsReport {
  std::optional<double> group_skew;
  std::optional<double> spd;
  std::optional<double> di;
  std::optional<double> eo_gap;
  std::optional<double> phi;
  std::optional<double> accuracy;
};

namespace detail {

template <typename F>
std::optional<double> try_metric(F&& f) {
  try {
    return f();
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline nlohmann::json opt_json(const std::optional<double>& x) {
  return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

}  // namespace detail

// Dataset-level metrics; any metric undefined on this data is left empty.
inline MetricsReport compute_report(const Dataset& data, bool weighted = false) {
  MetricsReport m;
  m.group_skew = detail::try_metric([&] { return group_skew(data); });
  m.spd = detail::try_metric([&] { return statistical_parity_difference(data, weighted); });
  m.di = detail::try_metric([&] { return disparate_impact_ratio(data, weighted); });
  m.phi = detail::try_metric([&] { return phi_coefficient(data, weighted); });
  return m;
}

// Adds prediction-based metrics (accuracy, equalized-odds gap).
inline MetricsReport compute_report(const Dataset& data, std::span<const int> predictions) {
  MetricsReport m = compute_report(data);
  const auto truth = outcomes(data);
  const auto grp = groups(data);
  m.accuracy = detail::try_metric([&] { return accuracy(truth, predictions); });
  m.eo_gap = detail::try_metric([&] { return equalized_odds_gap(truth, predictions, grp); });
  return m;
}

inline void to_json(nlohmann::json& j, const MetricsReport& m) {
  j = {{"group_skew", detail::opt_json(m.group_skew)}, {"spd", detail::opt_json(m.spd)},
       {"di", detail::opt_json(m.di)},                 {"eo_gap", detail::opt_json(m.eo_gap)},
       {"phi", detail::opt_json(m.phi)},               {"accuracy", detail::opt_json(m.accuracy)}};
}

}  // namespace fairlab
