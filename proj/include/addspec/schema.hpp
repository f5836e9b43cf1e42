#pragma once

#include <string>
#include <vector>

#include "addspec/errors.hpp"

namespace addspec {

using Json = nlohmann::ordered_json;

// Published shape of each CLI subcommand's JSON report.
Json report_schema(const std::string& subcommand);
std::vector<std::string> schema_names();

// Structural validation against the keyword subset the published schemas use
// (type, properties, required, additionalProperties, items, enum).  Throws
// invalid_argument with a JSON-path detail on the first mismatch.
void validate_schema(const Json& schema, const Json& value);

}  // namespace addspec
