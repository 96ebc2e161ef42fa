#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fairlab/lfr.hpp"
#include "fairlab/metrics.hpp"
#include "fixtures.hpp"

using namespace fairlab;

namespace {

LfrParams small_params(std::size_t k, std::size_t steps) {
  LfrParams p;
  p.k = k;
  p.steps = steps;
  p.seed = 99;
  return p;
}

}  // namespace

TEST(Lfr, SinglePrototypeHasNoParityLoss) {
  Rng rng(1);
  const auto d = fixtures::random_dataset(rng, 60);
  const auto model = lfr_fit(d, small_params(1, 50));
  ASSERT_EQ(model.trace.size(), 51u);
  for (const auto& l : model.trace) EXPECT_EQ(l.parity, 0.0);
}

TEST(Lfr, AnalyticGradientMatchesFiniteDifferences) {
  Rng rng(2024);
  const auto d = fixtures::random_dataset(rng, 20);
  LfrParams p;
  p.k = 4;
  p.a_x = 0.3;
  p.a_y = 1.0;
  p.a_z = 2.0;
  std::vector<double> protos(p.k), labels(p.k);
  for (auto& v : protos) v = rng.normal(5.5, 1.0);
  for (auto& w : labels) w = 0.2 + 0.6 * rng.uniform();

  std::vector<double> gp(p.k), gl(p.k);
  lfr_objective(d, protos, labels, p, gp, gl);

  const double h = 1e-5;
  double worst = 0.0;
  auto check = [&](std::vector<double>& param, std::size_t j, double analytic) {
    const double saved = param[j];
    param[j] = saved + h;
    const double up = lfr_objective(d, protos, labels, p).total;
    param[j] = saved - h;
    const double down = lfr_objective(d, protos, labels, p).total;
    param[j] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    worst = std::max(worst, rel);
  };
  for (std::size_t j = 0; j < p.k; ++j) {
    check(protos, j, gp[j]);
    check(labels, j, gl[j]);
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(Lfr, ReconstructionOnlyObjectiveImproves) {
  Rng rng(3);
  const auto d = fixtures::random_dataset(rng, 200);
  auto p = small_params(3, 300);
  p.a_y = 0.0;
  p.a_z = 0.0;
  p.a_x = 1.0;
  const auto model = lfr_fit(d, p);
  EXPECT_LE(model.trace.back().reconstruction, model.trace.front().reconstruction);
}

TEST(Lfr, Deterministic) {
  Rng rng(4);
  const auto d = fixtures::random_dataset(rng, 100);
  const auto a = lfr_fit(d, small_params(3, 100));
  const auto b = lfr_fit(d, small_params(3, 100));
  EXPECT_EQ(a.prototypes, b.prototypes);
  EXPECT_EQ(a.prototype_labels, b.prototype_labels);
}

TEST(Lfr, LabelsStayInUnitInterval) {
  Rng rng(5);
  const auto d = fixtures::random_dataset(rng, 100);
  auto p = small_params(4, 200);
  p.step_size = 0.5;
  const auto m = lfr_fit(d, p);
  for (double w : m.prototype_labels) {
    EXPECT_GE(w, 0.0);
    EXPECT_LE(w, 1.0);
  }
}

TEST(Lfr, DivergenceIsReported) {
  Rng rng(6);
  const auto d = fixtures::random_dataset(rng, 50);
  auto p = small_params(3, 20);
  p.step_size = 1e306;
  p.a_x = 1e3;
  EXPECT_THROW(lfr_fit(d, p), Divergence);
}

TEST(Lfr, InvalidParameters) {
  const auto s = fixtures::make_s();
  auto p = small_params(0, 10);
  EXPECT_THROW(lfr_fit(s, p), InvalidArgument);
  p = small_params(2, 0);
  EXPECT_THROW(lfr_fit(s, p), InvalidArgument);
  p = small_params(2, 10);
  p.step_size = 0.0;
  EXPECT_THROW(lfr_fit(s, p), InvalidArgument);
  p = small_params(2, 10);
  p.a_z = -1.0;
  EXPECT_THROW(lfr_fit(s, p), InvalidArgument);
  Dataset one;
  one.records = {{1, 1.0, 1, 1.0}, {1, 2.0, 0, 1.0}};
  EXPECT_THROW(lfr_fit(one, small_params(2, 10)), UndefinedRepair);
}

TEST(LfrTransform, SinglePrototypeModel) {
  LfrModel m;
  m.prototypes = {4.25};
  m.prototype_labels = {0.9};
  const auto out = lfr_transform(m, fixtures::make_s(), 0.5);
  for (const auto& r : out.records) {
    EXPECT_EQ(r.v, 4.25);
    EXPECT_EQ(r.y, 1);
  }
  EXPECT_EQ(groups(out), groups(fixtures::make_s()));
  EXPECT_THROW(lfr_transform(m, fixtures::make_s(), 1.2), InvalidArgument);
}

TEST(Lfr, RemovesParityOnD1WithDefaults) {
  const auto d = generate(builtin_datasets::d1(31));
  LfrParams p;
  p.seed = 31;
  const auto model = lfr_fit(d, p);
  EXPECT_LT(model.trace.back().parity, model.trace.front().parity);
  const auto out = lfr_transform(model, d, p.threshold);
  EXPECT_LE(std::abs(statistical_parity_difference(out)), 0.05);
}

TEST(Lfr, ModelJson) {
  Rng rng(7);
  const auto m = lfr_fit(fixtures::random_dataset(rng, 30), small_params(2, 5));
  const nlohmann::json j = m;
  EXPECT_EQ(j["prototypes"].size(), 2u);
  EXPECT_EQ(j["params"]["k"], 2);
  EXPECT_TRUE(j["final_losses"].contains("parity"));
}
