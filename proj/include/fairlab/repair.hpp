#pragma once

// Value repair (disparate impact remover) and the weight-based repairers
// (reweighing, FairBalance and its variant).

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "fairlab/dataset.hpp"
#include "fairlab/errors.hpp"
#include "fairlab/io.hpp"

namespace fairlab {

namespace detail {

// Empirical quantile function with order statistic i placed at (i + 0.5) / n
// and linear interpolation in between; constant beyond the extremes.
inline double midpoint_quantile(const std::vector<double>& sorted, double q) {
  const auto n = sorted.size();
  const double h = q * static_cast<double>(n) - 0.5;
  if (h <= 0.0) return sorted.front();
  if (h >= static_cast<double>(n - 1)) return sorted.back();
  const auto lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const auto n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

inline std::string level_tag(double x) { return format_double(x); }

}  // namespace detail

// Geometric quantile repair. Each value x at mid-rank quantile q of its group
// moves to (1 - lambda) x + lambda * median_g Q_g(q). Only v changes, and the
// within-group order of v is preserved.
inline Dataset dir_repair(const Dataset& data, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("repair level must lie in [0, 1]");

  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < data.size(); ++i) members[data.records[i].g].push_back(i);
  for (int g = 0; g < 2; ++g) {
    if (members[g].empty()) throw UndefinedRepair("group " + std::to_string(g) + " is empty");
  }

  std::map<int, std::vector<double>> sorted_values;
  std::vector<double> quantile(data.size());
  for (auto& [g, idx] : members) {
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return data.records[a].v < data.records[b].v; });
    auto& sv = sorted_values[g];
    sv.reserve(idx.size());
    for (auto i : idx) sv.push_back(data.records[i].v);

    // Tied values share the average of their ranks.
    const double n = static_cast<double>(idx.size());
    for (std::size_t s = 0; s < idx.size();) {
      std::size_t e = s;
      while (e + 1 < idx.size() && sv[e + 1] == sv[s]) ++e;
      const double mid_rank = 0.5 * static_cast<double>(s + e) + 1.0;
      for (std::size_t k = s; k <= e; ++k) quantile[idx[k]] = (mid_rank - 0.5) / n;
      s = e + 1;
    }
  }

  Dataset out = data;
  out.provenance = data.provenance + "-DIR-" + detail::level_tag(lambda);
  std::vector<double> at_q;
  at_q.reserve(sorted_values.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    at_q.clear();
    for (const auto& [g, sv] : sorted_values) at_q.push_back(detail::midpoint_quantile(sv, quantile[i]));
    const double target = detail::median_of(at_q);
    const double x = data.records[i].v;
    out.records[i].v = (1.0 - lambda) * x + lambda * target;
  }
  return out;
}

// Kamiran-Calders reweighing: each record in cell (g, y) is multiplied by
// W_g W_y / (W W_gy), using weight totals (record counts for unit weights).
// Under the new weights G and Y are independent.
inline Dataset reweigh(const Dataset& data) {
  if (data.empty()) throw InvalidArgument("cannot reweigh an empty dataset");
  const auto t = count_cells(data, true);
  const double total = t.total();
  if (!(total > 0.0)) throw DegenerateWeights("total weight is zero");
  Dataset out = data;
  out.provenance = data.provenance + "-reweigh";
  for (auto& r : out.records) {
    const double cell = t.cell[r.g][r.y];
    r.w = cell > 0.0 ? r.w * (t.group(r.g) * t.outcome(r.y)) / (total * cell) : 0.0;
  }
  return out;
}

// FairBalance: record in cell (g, y) is multiplied by W_g / W_gy, so both
// classes carry weight W_g inside group g. The variant uses 1 / W_gy, giving
// every cell total weight 1.
inline Dataset fair_balance(const Dataset& data, bool variant) {
  const auto t = count_cells(data, true);
  for (int g = 0; g < 2; ++g) {
    if (t.group(g) == 0.0) continue;
    for (int y = 0; y < 2; ++y) {
      if (!(t.cell[g][y] > 0.0)) {
        throw UndefinedRepair("fair balance: cell (g=" + std::to_string(g) + ", y=" + std::to_string(y) +
                              ") is empty");
      }
    }
  }
  if (data.empty()) throw UndefinedRepair("fair balance: dataset is empty");
  Dataset out = data;
  out.provenance = data.provenance + (variant ? "-fairbalance-variant" : "-fairbalance");
  for (auto& r : out.records) {
    const double cell = t.cell[r.g][r.y];
    r.w *= variant ? 1.0 / cell : t.group(r.g) / cell;
  }
  return out;
}

}  // namespace fairlab
