#pragma once

#include <json.hpp>

#include "srad/models.hpp"

namespace srad {

/// Field names match ModelSpec exactly. Absent fields keep their defaults;
/// unknown fields and type errors raise ValidationError naming the field.
nlohmann::json model_to_json(const ModelSpec& spec);
ModelSpec model_from_json(const nlohmann::json& doc);

}  // namespace srad
