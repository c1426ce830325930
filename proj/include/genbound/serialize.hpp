#pragma once

#include <json.hpp>

#include "genbound/types.hpp"

namespace genbound {

using json = nlohmann::json;

inline json to_json(const EvaluatedClass& cls) {
  json j;
  j["envelope"] = cls.envelope();
  j["evals"] = cls.rows();
  if (cls.population_means()) j["population_means"] = *cls.population_means();
  return j;
}

inline json to_json(const SupportTable& table) {
  return json{{"values", table.rows()},
              {"probs", table.probs()},
              {"envelope", table.envelope()},
              {"population_means", table.population_means()}};
}

inline EvaluatedClass class_from_json(const json& j) {
  std::optional<std::vector<double>> means;
  if (j.contains("population_means"))
    means = j.at("population_means").get<std::vector<double>>();
  return EvaluatedClass(j.at("evals").get<std::vector<std::vector<double>>>(),
                        j.at("envelope").get<double>(), std::move(means));
}

}  // namespace genbound
