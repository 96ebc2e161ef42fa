#pragma once

#include <optional>
#include <string>
#include <type_traits>
#include <variant>

#include <nlohmann/json.hpp>

#include "fairlab/dataset.hpp"
#include "fairlab/errors.hpp"
#include "fairlab/io.hpp"
#include "fairlab/lfr.hpp"
#include "fairlab/repair.hpp"

namespace fairlab {

struct DirRepair {
  double lambda = 1.0;
  friend bool operator==(const DirRepair&, const DirRepair&) = default;
};
struct Reweighing {
  friend bool operator==(const Reweighing&, const Reweighing&) = default;
};
struct FairBalance {
  bool variant = false;
  friend bool operator==(const FairBalance&, const FairBalance&) = default;
};
struct LfrRepair {
  LfrParams params;
  friend bool operator==(const LfrRepair&, const LfrRepair&) = default;
};

using RepairConfig = std::variant<DirRepair, Reweighing, FairBalance, LfrRepair>;

// Weight-based methods leave values alone and only change w.
inline bool is_weighting(const RepairConfig& c) {
  return std::holds_alternative<Reweighing>(c) || std::holds_alternative<FairBalance>(c);
}

inline std::string describe(const RepairConfig& c) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DirRepair>) return "DIR(" + format_double(m.lambda) + ")";
        else if constexpr (std::is_same_v<T, Reweighing>) return "Reweighing";
        else if constexpr (std::is_same_v<T, FairBalance>) return m.variant ? "FairBalanceVariant" : "FairBalance";
        else return "LFR";
      },
      c);
}

// Short filesystem-safe name.
inline std::string slug(const RepairConfig& c) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DirRepair>) return "dir-" + format_double(m.lambda);
        else if constexpr (std::is_same_v<T, Reweighing>) return "reweigh";
        else if constexpr (std::is_same_v<T, FairBalance>) return m.variant ? "fairbalance-variant" : "fairbalance";
        else return "lfr";
      },
      c);
}

inline void validate(const RepairConfig& c) {
  if (const auto* d = std::get_if<DirRepair>(&c); d && !(d->lambda >= 0.0 && d->lambda <= 1.0)) {
    throw InvalidConfig("dir: lambda must lie in [0, 1]");
  }
  if (const auto* l = std::get_if<LfrRepair>(&c)) {
    try {
      validate(l->params);
    } catch (const InvalidArgument& e) {
      throw InvalidConfig(e.what());
    }
  }
}

struct RepairResult {
  Dataset data;
  std::optional<LfrModel> lfr_model;
};

inline RepairResult apply_repair(const RepairConfig& config, const Dataset& data) {
  return std::visit(
      [&](const auto& m) -> RepairResult {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DirRepair>) {
          return {dir_repair(data, m.lambda), std::nullopt};
        } else if constexpr (std::is_same_v<T, Reweighing>) {
          return {reweigh(data), std::nullopt};
        } else if constexpr (std::is_same_v<T, FairBalance>) {
          return {fair_balance(data, m.variant), std::nullopt};
        } else {
          auto model = lfr_fit(data, m.params);
          auto out = lfr_transform(model, data, m.params.threshold);
          return {std::move(out), std::move(model)};
        }
      },
      config);
}

inline void to_json(nlohmann::json& j, const RepairConfig& c) {
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DirRepair>) {
          j = {{"method", "dir"}, {"lambda", m.lambda}};
        } else if constexpr (std::is_same_v<T, Reweighing>) {
          j = {{"method", "reweigh"}};
        } else if constexpr (std::is_same_v<T, FairBalance>) {
          j = {{"method", "fairbalance"}, {"variant", m.variant}};
        } else {
          j = m.params;
          j["method"] = "lfr";
        }
      },
      c);
}

inline RepairConfig repair_config_from_json(const nlohmann::json& j) {
  RepairConfig c;
  try {
    const auto method = j.at("method").get<std::string>();
    if (method == "dir") {
      c = DirRepair{j.at("lambda").get<double>()};
    } else if (method == "reweigh" || method == "reweighing") {
      c = Reweighing{};
    } else if (method == "fairbalance") {
      c = FairBalance{j.value("variant", false)};
    } else if (method == "lfr") {
      c = LfrRepair{j.get<LfrParams>()};
    } else {
      throw InvalidConfig("unknown repair method '" + method + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("repair config: ") + e.what());
  }
  validate(c);
  return c;
}

inline void from_json(const nlohmann::json& j, RepairConfig& c) { c = repair_config_from_json(j); }

}  // namespace fairlab
