#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "levelset/error.hpp"

namespace lsq::schema {

// Names of the embedded schemas (config files per command plus the data formats).
std::vector<std::string> names();

// Throws Config for an unknown name.
const nlohmann::json& get(std::string_view name);

// Validates against a JSON Schema subset: type, properties, required,
// additionalProperties (boolean), items, enum, const, minimum, maximum,
// exclusiveMinimum, exclusiveMaximum, minItems, maxItems, oneOf, anyOf and
// local "#/definitions/..." references. Returns one message per failure.
std::vector<std::string> validate(const nlohmann::json& doc, const nlohmann::json& schema);

// Throws Error(code) listing the failures: Config for config files, Data for
// ingested records.
void require_valid(const nlohmann::json& doc, std::string_view schema_name, ErrorCode code = ErrorCode::Config);

}  // namespace lsq::schema
