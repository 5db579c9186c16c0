#pragma once

#include "proxpool/network.hpp"

#include <nlohmann/json.hpp>

namespace proxpool::detail {

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json model_config_to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);

}  // namespace proxpool::detail
