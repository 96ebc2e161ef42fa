#pragma once

// Statistical parity remover based on learned fair representations: each
// value is represented as a softmax mixture over k prototypes in V-space,
// trained so that prototype usage is equal across groups while the mixture
// still reconstructs v and predicts y.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairlab/dataset.hpp"
#include "fairlab/errors.hpp"
#include "fairlab/random.hpp"

namespace fairlab {

struct LfrParams {
  std::size_t k = 5;
  double a_x = 0.01;
  double a_y = 1.0;
  double a_z = 50.0;
  std::size_t steps = 2000;
  double step_size = 0.01;
  std::uint64_t seed = 0;
  double threshold = 0.5;

  friend bool operator==(const LfrParams&, const LfrParams&) = default;
};

// Predictions are clamped to [eps, 1 - eps] before taking logs.
inline constexpr double kLfrEpsilon = 1e-6;

struct LfrLosses {
  double total = 0.0;
  double reconstruction = 0.0;  // L_x
  double prediction = 0.0;      // L_y
  double parity = 0.0;          // L_z
};

struct LfrModel {
  std::vector<double> prototypes;
  std::vector<double> prototype_labels;
  LfrParams params;
  // trace[0] is the loss at initialization, trace[i] after i updates.
  std::vector<LfrLosses> trace;
};

inline void validate(const LfrParams& p) {
  if (p.k < 1) throw InvalidArgument("lfr: k must be at least 1");
  if (!(p.a_x >= 0.0 && p.a_y >= 0.0 && p.a_z >= 0.0)) throw InvalidArgument("lfr: loss weights must be >= 0");
  if (p.steps < 1) throw InvalidArgument("lfr: steps must be at least 1");
  if (!(p.step_size > 0.0)) throw InvalidArgument("lfr: step_size must be positive");
  if (!(p.threshold > 0.0 && p.threshold < 1.0)) throw InvalidArgument("lfr: threshold must lie in (0, 1)");
}

namespace detail {

// Softmax over k of -(x - v_k)^2, written into `out`.
inline void prototype_assignment(double x, std::span<const double> prototypes, std::span<double> out) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < prototypes.size(); ++k) {
    const double d = x - prototypes[k];
    out[k] = -d * d;
    top = std::max(top, out[k]);
  }
  double sum = 0.0;
  for (auto& m : out) {
    m = std::exp(m - top);
    sum += m;
  }
  for (auto& m : out) m /= sum;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

// Objective over per-record means of the reconstruction and prediction terms:
//   L = a_x L_x + a_y L_y + a_z L_z
//   L_x = mean_n (x_n - xhat_n)^2
//   L_y = mean_n -[y ln yhat + (1 - y) ln(1 - yhat)]
//   L_z = sum_k |mean_{g=1} M_nk - mean_{g=0} M_nk|
// When the gradient spans are nonempty they receive dL/dprototypes and
// dL/dlabels. The |.| in L_z uses sign(.) as its derivative.
inline LfrLosses lfr_objective(const Dataset& data, std::span<const double> prototypes,
                               std::span<const double> labels, const LfrParams& params,
                               std::span<double> grad_prototypes = {}, std::span<double> grad_labels = {}) {
  const std::size_t k = prototypes.size();
  const std::size_t n = data.size();
  double group_n[2] = {0.0, 0.0};
  for (const auto& r : data.records) group_n[r.g] += 1.0;
  if (group_n[0] == 0.0 || group_n[1] == 0.0) throw UndefinedRepair("lfr: both groups must be nonempty");

  std::vector<double> assign(n * k);
  std::vector<double> group_mass(2 * k, 0.0);
  LfrLosses loss;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = data.records[i];
    std::span<double> m(assign.data() + i * k, k);
    detail::prototype_assignment(r.v, prototypes, m);
    const double xhat = detail::dot(m, prototypes);
    const double yhat = std::clamp(detail::dot(m, labels), kLfrEpsilon, 1.0 - kLfrEpsilon);
    loss.reconstruction += (r.v - xhat) * (r.v - xhat);
    loss.prediction -= r.y == 1 ? std::log(yhat) : std::log(1.0 - yhat);
    for (std::size_t j = 0; j < k; ++j) group_mass[r.g * k + j] += m[j];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  loss.reconstruction *= inv_n;
  loss.prediction *= inv_n;
  std::vector<double> parity_sign(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double diff = group_mass[k + j] / group_n[1] - group_mass[j] / group_n[0];
    loss.parity += std::abs(diff);
    parity_sign[j] = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
  }
  loss.total = params.a_x * loss.reconstruction + params.a_y * loss.prediction + params.a_z * loss.parity;

  if (grad_prototypes.empty() && grad_labels.empty()) return loss;

  std::fill(grad_prototypes.begin(), grad_prototypes.end(), 0.0);
  std::fill(grad_labels.begin(), grad_labels.end(), 0.0);
  std::vector<double> dm(k);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = data.records[i];
    std::span<const double> m(assign.data() + i * k, k);
    const double xhat = detail::dot(m, prototypes);
    const double raw_yhat = detail::dot(m, labels);

    const double d_xhat = params.a_x * 2.0 * (xhat - r.v) * inv_n;
    double d_yhat = 0.0;
    if (raw_yhat > kLfrEpsilon && raw_yhat < 1.0 - kLfrEpsilon) {
      d_yhat = params.a_y * (r.y == 1 ? -1.0 / raw_yhat : 1.0 / (1.0 - raw_yhat)) * inv_n;
    }
    const double d_parity = params.a_z * (r.g == 1 ? 1.0 / group_n[1] : -1.0 / group_n[0]);

    // dL/dM_nk, then back through the softmax.
    for (std::size_t j = 0; j < k; ++j) {
      dm[j] = d_xhat * prototypes[j] + d_yhat * labels[j] + d_parity * parity_sign[j];
    }
    const double dm_mean = detail::dot(dm, m);
    for (std::size_t j = 0; j < k; ++j) {
      if (!grad_prototypes.empty()) {
        const double dlogit_dv = 2.0 * (r.v - prototypes[j]);
        grad_prototypes[j] += d_xhat * m[j] + m[j] * (dm[j] - dm_mean) * dlogit_dv;
      }
      if (!grad_labels.empty()) grad_labels[j] += d_yhat * m[j];
    }
  }
  return loss;
}

// Full-batch projected gradient descent from a seeded start: prototypes
// uniform on [min v, max v], labels 0.5. Labels are clipped to [0, 1] after
// every step.
inline LfrModel lfr_fit(const Dataset& data, const LfrParams& params) {
  validate(params);
  if (data.empty()) throw UndefinedRepair("lfr: dataset is empty");
  const auto [lo_it, hi_it] = std::minmax_element(
      data.records.begin(), data.records.end(), [](const Record& a, const Record& b) { return a.v < b.v; });
  const double lo = lo_it->v, hi = hi_it->v;

  LfrModel model;
  model.params = params;
  Rng rng(params.seed);
  model.prototypes.resize(params.k);
  for (auto& p : model.prototypes) p = lo + (hi - lo) * rng.uniform();
  model.prototype_labels.assign(params.k, 0.5);
  model.trace.reserve(params.steps + 1);

  std::vector<double> gp(params.k), gl(params.k);
  for (std::size_t step = 0; step <= params.steps; ++step) {
    const bool update = step < params.steps;
    const auto loss = update ? lfr_objective(data, model.prototypes, model.prototype_labels, params, gp, gl)
                             : lfr_objective(data, model.prototypes, model.prototype_labels, params);
    if (!std::isfinite(loss.total)) throw Divergence("lfr: non-finite loss", static_cast<long>(step));
    model.trace.push_back(loss);
    if (!update) break;
    for (std::size_t j = 0; j < params.k; ++j) {
      model.prototypes[j] -= params.step_size * gp[j];
      model.prototype_labels[j] = std::clamp(model.prototype_labels[j] - params.step_size * gl[j], 0.0, 1.0);
    }
  }
  return model;
}

// Replaces v by its reconstruction and y by the thresholded prediction.
inline Dataset lfr_transform(const LfrModel& model, const Dataset& data, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("lfr: threshold must lie in (0, 1)");
  if (model.prototypes.empty() || model.prototypes.size() != model.prototype_labels.size()) {
    throw InvalidArgument("lfr: malformed model");
  }
  Dataset out = data;
  out.provenance = data.provenance + "-lfr";
  std::vector<double> m(model.prototypes.size());
  for (auto& r : out.records) {
    detail::prototype_assignment(r.v, model.prototypes, m);
    const double yhat = detail::dot(m, model.prototype_labels);
    r.v = detail::dot(m, model.prototypes);
    r.y = yhat >= threshold ? 1 : 0;
  }
  return out;
}

inline void to_json(nlohmann::json& j, const LfrParams& p) {
  j = {{"k", p.k},       {"a_x", p.a_x},   {"a_y", p.a_y},   {"a_z", p.a_z},
       {"steps", p.steps}, {"step_size", p.step_size}, {"seed", p.seed}, {"threshold", p.threshold}};
}

inline void from_json(const nlohmann::json& j, LfrParams& p) {
  const LfrParams d;
  p.k = j.value("k", d.k);
  p.a_x = j.value("a_x", d.a_x);
  p.a_y = j.value("a_y", d.a_y);
  p.a_z = j.value("a_z", d.a_z);
  p.steps = j.value("steps", d.steps);
  p.step_size = j.value("step_size", d.step_size);
  p.seed = j.value("seed", d.seed);
  p.threshold = j.value("threshold", d.threshold);
}

inline void to_json(nlohmann::json& j, const LfrLosses& l) {
  j = {{"total", l.total}, {"reconstruction", l.reconstruction}, {"prediction", l.prediction}, {"parity", l.parity}};
}

inline void to_json(nlohmann::json& j, const LfrModel& m) {
  j = {{"prototypes", m.prototypes}, {"labels", m.prototype_labels}, {"params", m.params}};
  j["initial_losses"] = m.trace.empty() ? nlohmann::json(nullptr) : nlohmann::json(m.trace.front());
  j["final_losses"] = m.trace.empty() ? nlohmann::json(nullptr) : nlohmann::json(m.trace.back());
}

}  // namespace fairlab
