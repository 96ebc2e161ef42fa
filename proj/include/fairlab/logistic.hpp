#pragma once

// Weighted binary logistic regression on (v[, g]) fitted by full-batch
// gradient descent. Used as the reference classifier when measuring what a
// repair costs in accuracy.

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairlab/dataset.hpp"
#include "fairlab/errors.hpp"

namespace fairlab {

struct FitConfig {
  bool include_g = false;
  std::size_t steps = 5000;
  double step_size = 0.1;
  double l2 = 1e-6;
  // Initialization is all-zero, so the seed currently has no effect on the fit.
  std::uint64_t seed = 0;
};

struct LogisticModel {
  double bias = 0.0;
  double coef_v = 0.0;
  std::optional<double> coef_g;
  FitConfig config;
};

struct LogisticFit {
  LogisticModel model;
  // loss_trace[0] at initialization, loss_trace[i] after i updates.
  std::vector<double> loss_trace;
};

inline void validate(const FitConfig& c) {
  if (c.steps < 1) throw InvalidArgument("fit: steps must be at least 1");
  if (!(c.step_size > 0.0)) throw InvalidArgument("fit: step_size must be positive");
  if (!(c.l2 >= 0.0)) throw InvalidArgument("fit: l2 must be nonnegative");
}

namespace detail {

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace detail

inline double linear_score(const LogisticModel& m, const Record& r) {
  return m.bias + m.coef_v * r.v + (m.coef_g ? *m.coef_g * r.g : 0.0);
}

struct LogisticGradient {
  double bias = 0.0;
  double coef_v = 0.0;
  double coef_g = 0.0;
};

// Weight-normalized objective: (1/W) sum_i w_i nll_i + l2 * (coef_v^2 + coef_g^2).
// The bias is not penalized. With `with_loss` false only the gradient is
// computed and NaN is returned.
inline double logistic_objective(const Dataset& train, const LogisticModel& m, double l2,
                                 LogisticGradient* grad = nullptr, bool with_loss = true) {
  double total_w = 0.0, loss = 0.0;
  LogisticGradient gsum;
  const double cg = m.coef_g.value_or(0.0);
  for (const auto& r : train.records) {
    const double z = m.bias + m.coef_v * r.v + cg * r.g;
    const double e = std::exp(-std::abs(z));
    total_w += r.w;
    if (with_loss) loss += r.w * (std::max(z, 0.0) + std::log1p(e) - r.y * z);
    if (grad) {
      const double p = z >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
      const double resid = r.w * (p - r.y);
      gsum.bias += resid;
      gsum.coef_v += resid * r.v;
      gsum.coef_g += resid * r.g;
    }
  }
  if (!(total_w > 0.0)) throw DegenerateWeights("fit: total training weight is zero");
  if (grad) {
    grad->bias = gsum.bias / total_w;
    grad->coef_v = gsum.coef_v / total_w + 2.0 * l2 * m.coef_v;
    grad->coef_g = m.coef_g ? gsum.coef_g / total_w + 2.0 * l2 * cg : 0.0;
  }
  if (!with_loss) return std::numeric_limits<double>::quiet_NaN();
  return loss / total_w + l2 * (m.coef_v * m.coef_v + cg * cg);
}

namespace detail {

// Steps between divergence checks when the loss trace is not kept.
inline constexpr std::size_t kLossCheckInterval = 100;

inline LogisticFit fit_logistic_impl(const Dataset& train, const FitConfig& cfg, bool keep_trace) {
  validate(cfg);
  if (train.empty()) throw InvalidArgument("fit: training set is empty");
  if (cfg.include_g) {
    bool seen[2] = {false, false};
    for (const auto& r : train.records) seen[r.g] = true;
    if (!seen[0] || !seen[1]) throw InvalidArgument("fit: include_g requires both groups in training data");
  }

  LogisticFit fit;
  fit.model.config = cfg;
  if (cfg.include_g) fit.model.coef_g = 0.0;
  if (keep_trace) fit.loss_trace.reserve(cfg.steps + 1);
  LogisticGradient grad;
  for (std::size_t step = 0; step <= cfg.steps; ++step) {
    const bool update = step < cfg.steps;
    const bool want_loss = keep_trace || !update || step % kLossCheckInterval == 0;
    const double loss = logistic_objective(train, fit.model, cfg.l2, update ? &grad : nullptr, want_loss);
    if (want_loss) {
      if (!std::isfinite(loss)) throw Divergence("fit: non-finite loss", static_cast<long>(step));
      if (keep_trace || !update) fit.loss_trace.push_back(loss);
    }
    if (!update) break;
    fit.model.bias -= cfg.step_size * grad.bias;
    fit.model.coef_v -= cfg.step_size * grad.coef_v;
    if (fit.model.coef_g) *fit.model.coef_g -= cfg.step_size * grad.coef_g;
  }
  return fit;
}

}  // namespace detail

// Full-batch gradient descent from zero; the gradient is normalized by the
// total weight so the step size does not depend on the weight scale.
inline LogisticFit fit_logistic_traced(const Dataset& train, const FitConfig& cfg) {
  return detail::fit_logistic_impl(train, cfg, true);
}

inline LogisticModel fit_logistic(const Dataset& train, const FitConfig& cfg) {
  return detail::fit_logistic_impl(train, cfg, false).model;
}

inline std::vector<double> predict_proba(const LogisticModel& model, const Dataset& data) {
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& r : data.records) out.push_back(detail::sigmoid(linear_score(model, r)));
  return out;
}

// 1 iff sigmoid(score) >= threshold.
inline std::vector<int> predict(const LogisticModel& model, const Dataset& data, double threshold = 0.5) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("predict: threshold must lie in (0, 1)");
  std::vector<int> out;
  out.reserve(data.size());
  for (const auto& r : data.records) out.push_back(detail::sigmoid(linear_score(model, r)) >= threshold ? 1 : 0);
  return out;
}

inline void to_json(nlohmann::json& j, const FitConfig& c) {
  j = {{"include_g", c.include_g}, {"steps", c.steps}, {"step_size", c.step_size}, {"l2", c.l2}, {"seed", c.seed}};
}

inline void from_json(const nlohmann::json& j, FitConfig& c) {
  const FitConfig d;
  c.include_g = j.value("include_g", d.include_g);
  c.steps = j.value("steps", d.steps);
  c.step_size = j.value("step_size", d.step_size);
  c.l2 = j.value("l2", d.l2);
  c.seed = j.value("seed", d.seed);
}

inline void to_json(nlohmann::json& j, const LogisticModel& m) {
  j = {{"bias", m.bias},
       {"coef_v", m.coef_v},
       {"coef_g", m.coef_g ? nlohmann::json(*m.coef_g) : nlohmann::json(nullptr)},
       {"config", m.config}};
}

}  // namespace fairlab
