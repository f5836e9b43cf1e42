#include "addspec/schema.hpp"

#include <algorithm>

namespace addspec {

namespace {

Json t(const char* type) { return Json{{"type", type}}; }

Json nullable(const char* type) {
  return Json{{"type", Json::array({type, "null"})}};
}

Json arr(Json items) {
  return Json{{"type", "array"}, {"items", std::move(items)}};
}

Json obj(Json properties, Json required) {
  return Json{{"type", "object"},
              {"properties", std::move(properties)},
              {"required", std::move(required)},
              {"additionalProperties", false}};
}

Json verdict_schema() {
  return obj(Json{{"epsilon", t("number")},
                  {"threshold_index", t("integer")},
                  {"window_end", t("integer")},
                  {"sup_deviation", t("number")},
                  {"holds", t("boolean")},
                  {"limit_points", arr(t("number"))}},
             Json::array({"epsilon", "threshold_index", "window_end", "sup_deviation",
                          "holds"}));
}

Json supersequence_schema() {
  return obj(Json{{"B", arr(t("string"))},
                  {"embedding", arr(t("integer"))},
                  {"filler_count", t("integer")},
                  {"verdict", verdict_schema()}},
             Json::array({"B", "embedding", "filler_count", "verdict"}));
}

Json coverage_schema() {
  return obj(Json{{"h", t("integer")},
                  {"x_max", t("integer")},
                  {"missing", arr(t("integer"))},
                  {"missing_total", t("integer")},
                  {"largest_missing", nullable("integer")},
                  {"n0_window", nullable("integer")},
                  {"is_window_basis", t("boolean")}},
             Json::array({"h", "x_max", "missing", "missing_total", "largest_missing",
                          "n0_window", "is_window_basis"}));
}

Json scan_schema() {
  return obj(Json{{"u", t("integer")},
                  {"v", t("integer")},
                  {"K", t("integer")},
                  {"hits_middle", t("integer")},
                  {"first_violation", nullable("integer")},
                  {"epsilon_star", t("number")},
                  {"min_relative_gap", t("number")},
                  {"gap_k", t("integer")},
                  {"gap_n", t("integer")},
                  {"gap_num", t("string")},
                  {"gap_den", t("string")}},
             Json::array({"u", "v", "K", "hits_middle", "first_violation", "epsilon_star",
                          "min_relative_gap", "gap_k", "gap_n", "gap_num", "gap_den"}));
}

Json witness_schema() {
  return obj(Json{{"u", t("integer")},
                  {"v", t("integer")},
                  {"r", t("integer")},
                  {"s", t("integer")},
                  {"ell", t("integer")},
                  {"distance_num", t("integer")},
                  {"distance_den", t("integer")},
                  {"min_distance", t("number")},
                  {"checked", t("integer")}},
             Json::array({"u", "v", "r", "s", "ell", "distance_num", "distance_den",
                          "min_distance", "checked"}));
}

}  // namespace

Json report_schema(const std::string& subcommand) {
  if (subcommand == "stability") {
    return obj(Json{{"delta", t("number")},
                    {"grid_max", t("number")},
                    {"tolerance", t("number")},
                    {"sup_ratio", t("number")},
                    {"tail_sup_ratio", t("number")},
                    {"stable", t("boolean")},
                    {"trend", arr(arr(t("number")))}},
               Json::array({"delta", "grid_max", "tolerance", "sup_ratio",
                            "tail_sup_ratio", "stable", "trend"}));
  }
  if (subcommand == "rearrange") {
    return obj(Json{{"values", arr(t("string"))},
                    {"sigma", t("object")},
                    {"verdict", verdict_schema()}},
               Json::array({"values", "sigma"}));
  }
  if (subcommand == "supersequence") return supersequence_schema();
  if (subcommand == "sumset") {
    return obj(Json{{"h", t("integer")},
                    {"x_max", t("integer")},
                    {"popcount", t("integer")},
                    {"bitmap_path", t("string")}},
               Json::array({"h", "x_max", "popcount"}));
  }
  if (subcommand == "verify-basis") return coverage_schema();
  if (subcommand == "dilute") {
    return obj(Json{{"h", t("integer")},
                    {"alpha", t("number")},
                    {"beta", t("number")},
                    {"supersequence", supersequence_schema()},
                    {"seed_coverage", coverage_schema()},
                    {"super_coverage", coverage_schema()},
                    {"containment_ok", t("boolean")},
                    {"embedding_ratio_mean", t("number")}},
               Json::array({"h", "alpha", "beta", "supersequence", "seed_coverage",
                            "super_coverage", "containment_ok", "embedding_ratio_mean"}));
  }
  if (subcommand == "spectrum") {
    Json sample = obj(Json{{"alpha", t("number")},
                           {"beta", t("number")},
                           {"ok", t("boolean")},
                           {"sup_deviation", t("number")},
                           {"containment_ok", t("boolean")},
                           {"failure", t("string")}},
                      Json::array({"alpha", "beta", "ok", "sup_deviation",
                                   "containment_ok"}));
    return obj(Json{{"h", t("integer")},
                    {"ceiling", t("number")},
                    {"downward_closed", t("boolean")},
                    {"samples", arr(std::move(sample))}},
               Json::array({"h", "ceiling", "downward_closed", "samples"}));
  }
  if (subcommand == "impossible") {
    Json relation = obj(Json{{"kind", Json{{"enum", Json::array({"perfect_power",
                                                                 "rational_log",
                                                                 "irrational"})}}},
                             {"r", t("integer")},
                             {"s", t("integer")}},
                        Json::array({"kind"}));
    Json embedding = obj(Json{{"base", t("integer")}, {"stride", t("integer")}},
                         Json::array({"base", "stride"}));
    return obj(Json{{"u", t("integer")},
                    {"v", t("integer")},
                    {"relation", std::move(relation)},
                    {"embedding", std::move(embedding)},
                    {"witness", witness_schema()},
                    {"scan", scan_schema()}},
               Json::array({"u", "v", "relation"}));
  }
  if (subcommand == "adversarial") {
    return obj(Json{{"f", t("object")},
                    {"A", arr(t("string"))},
                    {"witness", t("number")},
                    {"margin_half", t("number")},
                    {"margin_step", t("number")}},
               Json::array({"f", "A", "witness", "margin_half", "margin_step"}));
  }
  throw AsError(ErrorCode::invalid_argument, "no schema for subcommand",
                Json{{"subcommand", subcommand}});
}

std::vector<std::string> schema_names() {
  return {"stability", "rearrange", "supersequence", "sumset", "verify-basis",
          "dilute",    "spectrum",  "impossible",    "adversarial"};
}

namespace {

bool type_matches(const std::string& type, const Json& v) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "integer") return v.is_number_integer() || v.is_number_unsigned();
  if (type == "number") return v.is_number();
  throw AsError(ErrorCode::invalid_argument, "unknown schema type", Json{{"type", type}});
}

[[noreturn]] void mismatch(const std::string& path, const std::string& why) {
  throw AsError(ErrorCode::invalid_argument, "schema mismatch",
                Json{{"path", path}, {"why", why}});
}

void validate_at(const Json& schema, const Json& value, const std::string& path) {
  if (schema.contains("type")) {
    const Json& ty = schema["type"];
    bool ok = false;
    if (ty.is_string()) {
      ok = type_matches(ty.get<std::string>(), value);
    } else {
      for (const Json& one : ty)
        if (type_matches(one.get<std::string>(), value)) ok = true;
    }
    if (!ok) mismatch(path, "expected type " + ty.dump());
  }
  if (schema.contains("enum")) {
    const Json& allowed = schema["enum"];
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const Json& e) { return e == value; }))
      mismatch(path, "value not in enum " + allowed.dump());
  }
  if (value.is_object() && schema.contains("properties")) {
    const Json& props = schema["properties"];
    for (auto it = props.begin(); it != props.end(); ++it) {
      if (value.contains(it.key()))
        validate_at(it.value(), value[it.key()], path + "." + it.key());
    }
    if (schema.contains("required")) {
      for (const Json& name : schema["required"])
        if (!value.contains(name.get<std::string>()))
          mismatch(path, "missing required key " + name.get<std::string>());
    }
    if (schema.contains("additionalProperties") &&
        schema["additionalProperties"] == Json(false)) {
      for (auto it = value.begin(); it != value.end(); ++it)
        if (!props.contains(it.key())) mismatch(path, "unexpected key " + it.key());
    }
  }
  if (value.is_array() && schema.contains("items")) {
    std::size_t i = 0;
    for (const Json& elem : value)
      validate_at(schema["items"], elem, path + "[" + std::to_string(i++) + "]");
  }
}

}  // namespace

void validate_schema(const Json& schema, const Json& value) {
  validate_at(schema, value, "$");
}

}  // namespace addspec
