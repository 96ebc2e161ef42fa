#pragma once

#include <vector>

#include "fairlab/dataset.hpp"
#include "fairlab/random.hpp"

namespace fairlab::fixtures {

// Six-record reference set: group 1 has v = 1, 2, 3 with y = 1, 1, 0 and
// group 0 has v = 5, 6, 7 with y = 1, 0, 0.
inline Dataset make_s() {
  Dataset d;
  d.provenance = "S";
  d.records = {{1, 1.0, 1, 1.0}, {1, 2.0, 1, 1.0}, {1, 3.0, 0, 1.0},
               {0, 5.0, 1, 1.0}, {0, 6.0, 0, 1.0}, {0, 7.0, 0, 1.0}};
  return d;
}

inline Dataset make_cells(std::size_t n11, std::size_t n10, std::size_t n01, std::size_t n00, double v = 1.0) {
  Dataset d;
  auto add = [&](int g, int y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) d.records.push_back({g, v + static_cast<double>(i), y, 1.0});
  };
  add(1, 1, n11);
  add(1, 0, n10);
  add(0, 1, n01);
  add(0, 0, n00);
  return d;
}

// Random dataset with every (g, y) cell nonempty.
inline Dataset random_dataset(Rng& rng, std::size_t n) {
  Dataset d;
  for (int g = 0; g < 2; ++g) {
    for (int y = 0; y < 2; ++y) d.records.push_back({g, rng.normal(5.0 + g, 1.0), y, 1.0});
  }
  while (d.size() < n) {
    const int g = rng.bernoulli(0.5) ? 1 : 0;
    d.records.push_back({g, rng.normal(5.0 + 0.5 * g, 0.5 + rng.uniform()), rng.bernoulli(0.3 + 0.4 * g) ? 1 : 0, 1.0});
  }
  return d;
}

}  // namespace fairlab::fixtures
