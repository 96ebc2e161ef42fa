#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "fairlab/errors.hpp"
#include "fairlab/random.hpp"

namespace fairlab {

// One row: sensitive group g, real feature v, binary outcome y, weight w.
struct Record {
  int g = 0;
  double v = 0.0;
  int y = 0;
  double w = 1.0;

  friend bool operator==(const Record&, const Record&) = default;
};

struct Dataset {
  std::vector<Record> records;
  std::string provenance;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
};

struct GroupSpec {
  int group_id = 0;
  std::size_t size = 0;
  double mean = 0.0;
  double std = 1.0;
  double p_favorable = 0.5;
};

struct DatasetSpec {
  std::string name;
  std::vector<GroupSpec> groups;
  std::uint64_t seed = 0;
};

struct SplitPair {
  Dataset train;
  Dataset test;
};

inline bool is_binary(int x) noexcept { return x == 0 || x == 1; }

inline void validate(const Record& r) {
  if (!is_binary(r.g)) throw InvalidArgument("group id must be 0 or 1, got " + std::to_string(r.g));
  if (!is_binary(r.y)) throw InvalidArgument("outcome must be 0 or 1, got " + std::to_string(r.y));
  if (!(r.w >= 0.0) || !std::isfinite(r.w)) throw InvalidArgument("weight must be finite and nonnegative");
  if (!std::isfinite(r.v)) throw InvalidArgument("feature value must be finite");
}

inline void validate(const DatasetSpec& spec) {
  if (spec.groups.size() != 2) {
    throw InvalidSpec("dataset spec '" + spec.name + "' must have exactly two groups");
  }
  if (spec.groups[0].group_id == spec.groups[1].group_id) {
    throw InvalidSpec("dataset spec '" + spec.name + "' has duplicate group ids");
  }
  for (const auto& gs : spec.groups) {
    const std::string where = "group " + std::to_string(gs.group_id) + " of '" + spec.name + "'";
    if (!is_binary(gs.group_id)) throw InvalidSpec(where + ": group id must be 0 or 1");
    if (gs.size == 0) throw InvalidSpec(where + ": size must be at least 1");
    if (!(gs.std > 0.0) || !std::isfinite(gs.std)) throw InvalidSpec(where + ": std must be positive");
    if (!std::isfinite(gs.mean)) throw InvalidSpec(where + ": mean must be finite");
    if (!(gs.p_favorable >= 0.0 && gs.p_favorable <= 1.0)) {
      throw InvalidSpec(where + ": p_favorable must lie in [0, 1]");
    }
  }
}

// 2x2 contingency table of (g, y), either record counts or weight totals.
struct CellTable {
  // cell[g][y]
  std::array<std::array<double, 2>, 2> cell{};

  double group(int g) const { return cell[g][0] + cell[g][1]; }
  double outcome(int y) const { return cell[0][y] + cell[1][y]; }
  double total() const { return group(0) + group(1); }
};

inline CellTable count_cells(const Dataset& data, bool weighted = false) {
  CellTable t;
  for (const auto& r : data.records) t.cell[r.g][r.y] += weighted ? r.w : 1.0;
  return t;
}

inline std::vector<double> values_of_group(const Dataset& data, int g) {
  std::vector<double> out;
  for (const auto& r : data.records) {
    if (r.g == g) out.push_back(r.v);
  }
  return out;
}

inline std::vector<int> outcomes(const Dataset& data) {
  std::vector<int> out;
  out.reserve(data.size());
  for (const auto& r : data.records) out.push_back(r.y);
  return out;
}

inline std::vector<int> groups(const Dataset& data) {
  std::vector<int> out;
  out.reserve(data.size());
  for (const auto& r : data.records) out.push_back(r.g);
  return out;
}

// Draws each group's records independently: V ~ Normal(mean, std) and
// Y ~ Bernoulli(p_favorable), with Y independent of V given the group. Each
// group uses its own stream derived from the spec seed and the group's
// position, so output is a pure function of the spec.
inline Dataset generate(const DatasetSpec& spec) {
  validate(spec);
  Dataset out;
  out.provenance = spec.name + "-original";
  std::size_t total = 0;
  for (const auto& gs : spec.groups) total += gs.size;
  out.records.reserve(total);

  for (std::size_t i = 0; i < spec.groups.size(); ++i) {
    const auto& gs = spec.groups[i];
    Rng feature_rng(derive_seed(spec.seed, 2 * i));
    Rng outcome_rng(derive_seed(spec.seed, 2 * i + 1));
    for (std::size_t n = 0; n < gs.size; ++n) {
      Record r;
      r.g = gs.group_id;
      r.v = feature_rng.normal(gs.mean, gs.std);
      r.y = outcome_rng.bernoulli(gs.p_favorable) ? 1 : 0;
      out.records.push_back(r);
    }
  }
  return out;
}

// Stratified split by (g, y) cell. Each cell sends round(size * fraction)
// records to test, capped so at least one record of every cell stays in
// train. Records keep their source order within each partition.
inline SplitPair split(const Dataset& data, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidArgument("test_fraction must lie strictly between 0 and 1");
  }
  std::array<std::array<std::vector<std::size_t>, 2>, 2> cells;
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    const auto& r = data.records[i];
    cells[r.g][r.y].push_back(i);
  }

  std::vector<char> in_test(data.records.size(), 0);
  Rng rng(seed);
  for (auto& by_outcome : cells) {
    for (auto& idx : by_outcome) {
      if (idx.empty()) continue;
      // Fisher-Yates over the cell's indices.
      for (std::size_t i = idx.size(); i > 1; --i) {
        std::swap(idx[i - 1], idx[rng.below(i)]);
      }
      auto take = static_cast<std::size_t>(std::llround(static_cast<double>(idx.size()) * test_fraction));
      take = std::min(take, idx.size() - 1);
      for (std::size_t i = 0; i < take; ++i) in_test[idx[i]] = 1;
    }
  }

  SplitPair out;
  out.train.provenance = data.provenance + "-train";
  out.test.provenance = data.provenance + "-test";
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    (in_test[i] ? out.test : out.train).records.push_back(data.records[i]);
  }
  return out;
}

// Bootstrap of the same size, drawing each record with probability
// proportional to its weight. Output weights are reset to 1.
inline Dataset resample_by_weight(const Dataset& data, std::uint64_t seed) {
  std::vector<double> cumulative;
  cumulative.reserve(data.size());
  double total = 0.0;
  for (const auto& r : data.records) {
    total += r.w;
    cumulative.push_back(total);
  }
  if (!(total > 0.0)) throw DegenerateWeights("total weight must be positive to resample");

  Rng rng(seed);
  Dataset out;
  out.provenance = data.provenance + "-resampled";
  out.records.reserve(data.size());
  for (std::size_t n = 0; n < data.size(); ++n) {
    const double target = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    // upper_bound skips zero-weight records; u * total may round up to total.
    auto pick = static_cast<std::size_t>(it - cumulative.begin());
    if (it == cumulative.end()) {
      pick = data.size() - 1;
      while (data.records[pick].w == 0.0) --pick;
    }
    Record r = data.records[pick];
    r.w = 1.0;
    out.records.push_back(r);
  }
  return out;
}

// The three synthetic datasets of the study, at full size.
namespace builtin_datasets {

inline DatasetSpec d1(std::uint64_t seed) {
  return {"D1", {{1, 10000, 5.5, 0.6, 0.7}, {0, 10000, 6.0, 0.4, 0.5}}, seed};
}

inline DatasetSpec d2(std::uint64_t seed) {
  return {"D2", {{1, 20000, 5.5, 0.3, 0.8}, {0, 9000, 6.0, 0.6, 0.2}}, seed};
}

inline DatasetSpec d3(std::uint64_t seed) {
  return {"D3", {{1, 10000, 5.5, 0.6, 0.5}, {0, 10000, 6.0, 0.3, 0.5}}, seed};
}

// Dataset seeds are derived from a master seed and the dataset's position.
inline std::vector<DatasetSpec> all(std::uint64_t master_seed) {
  return {d1(derive_seed(master_seed, 101)), d2(derive_seed(master_seed, 102)),
          d3(derive_seed(master_seed, 103))};
}

}  // namespace builtin_datasets

}  // namespace fairlab
