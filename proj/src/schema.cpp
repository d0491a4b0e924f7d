#include "levelset/schema.hpp"

#include <cmath>
#include <map>

#include "levelset/error.hpp"

namespace lsq::schema {

using nlohmann::json;

namespace {

// Shared definitions, injected into every schema.
constexpr const char* kDefinitions = R"({
  "point": {"type": "array", "items": {"type": "number"}, "minItems": 1},
  "simplex": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 2},
  "pair": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 2, "maxItems": 2},
  "bound": {"anyOf": [{"type": "number", "minimum": 0}, {"const": "inf"}]},
  "interval": {"type": "array", "items": {"$ref": "#/definitions/bound"}, "minItems": 2, "maxItems": 2},
  "ratio": {"anyOf": [{"type": "number", "minimum": 0}, {"const": "inf"}, {"type": "null"}]},
  "tie": {"enum": ["lowest", "highest"]},
  "prevalence_grid": {"oneOf": [
    {"type": "object", "additionalProperties": false, "required": ["step"],
     "properties": {"step": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 0.5}}},
    {"type": "object", "additionalProperties": false, "required": ["values"],
     "properties": {"values": {"type": "array", "minItems": 1,
                               "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}}}}
  ]},
  "gaussian_class": {"type": "object", "additionalProperties": false, "required": ["kind", "mean", "cov"],
    "properties": {"kind": {"const": "gaussian"}, "mean": {"$ref": "#/definitions/point"},
                   "cov": {"type": "array", "minItems": 1, "items": {"$ref": "#/definitions/point"}}}},
  "piecewise_class": {"type": "object", "additionalProperties": false, "required": ["kind", "cells", "values"],
    "properties": {"kind": {"const": "piecewise"},
                   "cells": {"type": "array", "minItems": 1, "items": {"type": "object", "additionalProperties": false,
                             "required": ["lo", "hi"],
                             "properties": {"lo": {"$ref": "#/definitions/point"}, "hi": {"$ref": "#/definitions/point"}}}},
                   "values": {"type": "array", "minItems": 1, "items": {"type": "number", "minimum": 0}}}},
  "density_spec": {"oneOf": [
    {"type": "object", "additionalProperties": false, "required": ["builtin"],
     "properties": {"builtin": {"enum": ["gaussian_three_class"]}}},
    {"type": "object", "additionalProperties": false, "required": ["classes"],
     "properties": {"classes": {"type": "array", "minItems": 2, "items": {"oneOf": [
       {"$ref": "#/definitions/gaussian_class"}, {"$ref": "#/definitions/piecewise_class"}]}}}}
  ]},
  "points": {"oneOf": [
    {"type": "object", "additionalProperties": false, "required": ["file"],
     "properties": {"file": {"type": "string"}, "labelled": {"type": "boolean"}}},
    {"type": "object", "additionalProperties": false, "required": ["inline"],
     "properties": {"inline": {"type": "array", "items": {"$ref": "#/definitions/point"}}}},
    {"type": "object", "additionalProperties": false, "required": ["random"],
     "properties": {"random": {"type": "object", "additionalProperties": false, "required": ["n", "lo", "hi"],
       "properties": {"n": {"type": "integer", "minimum": 0}, "lo": {"$ref": "#/definitions/point"},
                      "hi": {"$ref": "#/definitions/point"}, "seed": {"type": "integer", "minimum": 0}}}}}
  ]},
  "schedule": {"type": "object", "additionalProperties": false, "properties": {
    "sigmas": {"type": "array", "minItems": 1, "items": {"type": "number", "exclusiveMinimum": 0}},
    "learning_rate": {"type": "number", "exclusiveMinimum": 0},
    "epochs": {"type": "integer", "minimum": 1},
    "batching": {"enum": ["per_sample", "full"]},
    "cross_entropy_weight": {"type": "number", "minimum": 0}}},
  "bin_edges": {"type": "array", "minItems": 2, "items": {"type": "number", "minimum": 0, "maximum": 1}}
})";

constexpr const char* kSchemas = R"({
  "gaussian-demo": {"type": "object", "additionalProperties": false, "properties": {
    "densities": {"$ref": "#/definitions/density_spec"},
    "lattice": {"type": "object", "additionalProperties": false, "required": ["lo", "hi", "points"],
      "properties": {"lo": {"$ref": "#/definitions/point"}, "hi": {"$ref": "#/definitions/point"},
                     "points": {"type": "array", "minItems": 2, "maxItems": 2,
                                "items": {"type": "integer", "minimum": 2}}}},
    "contours": {"type": "array", "items": {"$ref": "#/definitions/pair"}},
    "chi": {"$ref": "#/definitions/simplex"},
    "tie": {"$ref": "#/definitions/tie"},
    "audit": {"type": "object", "additionalProperties": false, "properties": {
      "random_chi": {"type": "integer", "minimum": 0},
      "seed": {"type": "integer", "minimum": 0}}}}},

  "probe": {"type": "object", "additionalProperties": false, "required": ["classifier", "points"], "properties": {
    "classifier": {"oneOf": [
      {"type": "object", "additionalProperties": false, "required": ["kind", "densities"],
       "properties": {"kind": {"const": "oracle"}, "densities": {"$ref": "#/definitions/density_spec"},
                      "tie": {"$ref": "#/definitions/tie"}}},
      {"type": "object", "additionalProperties": false, "required": ["kind", "files", "num_classes"],
       "properties": {"kind": {"const": "checkpoint"},
                      "files": {"type": "array", "minItems": 1, "items": {"type": "string"}},
                      "num_classes": {"type": "integer", "minimum": 2}}},
      {"type": "object", "additionalProperties": false, "required": ["kind", "command", "num_classes"],
       "properties": {"kind": {"const": "external"},
                      "command": {"type": "array", "minItems": 1, "items": {"type": "string"}},
                      "num_classes": {"type": "integer", "minimum": 2}}}
    ]},
    "points": {"$ref": "#/definitions/points"},
    "grid": {"$ref": "#/definitions/prevalence_grid"},
    "refine_iters": {"type": "integer", "minimum": 0, "maximum": 60}}},

  "audit": {"type": "object", "additionalProperties": false, "required": ["sets", "chi"], "properties": {
    "sets": {"type": "array", "minItems": 1, "items": {"type": "object", "additionalProperties": false,
      "required": ["name", "file"], "properties": {"name": {"type": "string"}, "file": {"type": "string"}}}},
    "chi": {"$ref": "#/definitions/simplex"},
    "tol": {"type": "number", "exclusiveMinimum": 0},
    "bin_edges": {"$ref": "#/definitions/bin_edges"}}},

  "train": {"type": "object", "additionalProperties": false, "required": ["dataset"], "properties": {
    "dataset": {"type": "string"},
    "num_classes": {"type": "integer", "minimum": 2},
    "pairs": {"type": "array", "minItems": 1, "items": {"$ref": "#/definitions/pair"}},
    "scorer": {"type": "object", "additionalProperties": false, "properties": {
      "hidden": {"type": "integer", "minimum": 0, "maximum": 32}}},
    "grid": {"$ref": "#/definitions/prevalence_grid"},
    "schedule": {"$ref": "#/definitions/schedule"},
    "objective": {"enum": ["homotopy", "cross_entropy"]},
    "seed": {"type": "integer", "minimum": 0},
    "probe": {"type": "object", "additionalProperties": false, "required": ["points"], "properties": {
      "points": {"$ref": "#/definitions/points"},
      "grid": {"$ref": "#/definitions/prevalence_grid"},
      "refine_iters": {"type": "integer", "minimum": 0, "maximum": 60},
      "audit": {"type": "object", "additionalProperties": false, "required": ["chi"], "properties": {
        "chi": {"$ref": "#/definitions/simplex"},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "bin_edges": {"$ref": "#/definitions/bin_edges"}}}}},
    "conjecture": {"type": "object", "additionalProperties": false, "required": ["points"], "properties": {
      "points": {"type": "array", "items": {"$ref": "#/definitions/point"}},
      "densities": {"$ref": "#/definitions/density_spec"}}}}},

  "density-spec": {"$ref": "#/definitions/density_spec"},

  "dataset-row": {"description": "One CSV row: feature columns followed by a 1-based integer label. An optional non-numeric header line is skipped.",
    "type": "array", "minItems": 2, "items": {"type": "number"}},

  "interval-record": {"type": "object", "additionalProperties": false, "required": ["r", "intervals"], "properties": {
    "r": {"$ref": "#/definitions/point"},
    "label": {"type": "integer", "minimum": 1},
    "intervals": {"type": "array", "minItems": 2, "items": {"type": "array", "items": {"$ref": "#/definitions/interval"}}},
    "violations": {"type": "integer", "minimum": 0},
    "brackets": {"type": "array", "items": {"type": "object", "additionalProperties": false,
      "required": ["pair", "q_low", "q_high", "regime", "violations", "foreign_labels"], "properties": {
        "pair": {"$ref": "#/definitions/pair"},
        "q_low": {"type": "number", "minimum": 0, "maximum": 1},
        "q_high": {"type": "number", "minimum": 0, "maximum": 1},
        "regime": {"enum": ["interior", "always_j", "always_k"]},
        "violations": {"type": "array", "items": {"type": "number"}},
        "foreign_labels": {"type": "integer", "minimum": 0}}}}}},

  "audit-record": {"type": "object", "additionalProperties": false,
    "required": ["r", "feasible", "violations", "partition", "witness", "u_mean", "u_interval"], "properties": {
    "r": {"$ref": "#/definitions/point"},
    "feasible": {"type": "boolean"},
    "violations": {"type": "integer", "minimum": 0},
    "true_label": {"type": "integer", "minimum": 1},
    "partition": {"anyOf": [{"type": "null"}, {"type": "object", "additionalProperties": false, "required": ["W", "V"],
      "properties": {"W": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                     "V": {"type": "array", "items": {"type": "integer", "minimum": 1}}}}]},
    "witness": {"anyOf": [{"type": "null"},
      {"type": "array", "items": {"type": "array", "items": {"$ref": "#/definitions/ratio"}}}]},
    "u_mean": {"anyOf": [{"type": "null"}, {"type": "number", "minimum": 0, "maximum": 1}]},
    "u_interval": {"anyOf": [{"type": "null"},
      {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "number", "minimum": 0, "maximum": 1}}]},
    "z": {"type": "number"},
    "label": {"type": "integer", "minimum": 1},
    "label_robust": {"type": "boolean"},
    "vertices": {"type": "integer", "minimum": 0},
    "projected_vertices": {"type": "integer", "minimum": 0}}},

  "audit-report": {"type": "object", "additionalProperties": false, "required": ["sets"], "properties": {
    "chi": {"$ref": "#/definitions/simplex"},
    "bin_edges": {"$ref": "#/definitions/bin_edges"},
    "sets": {"type": "array", "items": {"type": "object", "additionalProperties": false,
      "required": ["name", "points", "consistent", "inconsistent", "bins"], "properties": {
        "name": {"type": "string"},
        "points": {"type": "integer", "minimum": 0},
        "consistent": {"type": "integer", "minimum": 0},
        "inconsistent": {"type": "integer", "minimum": 0},
        "labelled": {"type": "integer", "minimum": 0},
        "bins": {"type": "array", "items": {"type": "object", "additionalProperties": false,
          "required": ["range", "count", "straddle", "labelled", "accuracy"], "properties": {
            "range": {"anyOf": [{"const": "remainder"}, {"type": "array", "minItems": 2, "maxItems": 2,
                                                         "items": {"type": "number"}}]},
            "count": {"type": "integer", "minimum": 0},
            "straddle": {"type": "integer", "minimum": 0},
            "labelled": {"type": "integer", "minimum": 0},
            "accuracy": {"anyOf": [{"type": "null"}, {"type": "number", "minimum": 0, "maximum": 1}]}}}}}}}}},

  "checkpoint": {"type": "object", "additionalProperties": false,
    "required": ["format", "architecture", "pair", "grid", "parameters", "provenance"], "properties": {
    "format": {"const": "levelset-family/1"},
    "architecture": {"type": "object", "additionalProperties": false, "required": ["input_dim", "hidden", "classes"],
      "properties": {"input_dim": {"type": "integer", "minimum": 1}, "hidden": {"type": "integer", "minimum": 0},
                     "classes": {"type": "integer", "minimum": 2}}},
    "pair": {"$ref": "#/definitions/pair"},
    "grid": {"type": "array", "minItems": 1, "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}},
    "parameters": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
    "provenance": {"type": "object", "additionalProperties": false,
      "required": ["objective", "seed", "sigmas", "learning_rate", "epochs", "batching", "sigma_history"],
      "properties": {"objective": {"enum": ["homotopy", "cross_entropy"]}, "seed": {"type": "integer", "minimum": 0},
                     "sigmas": {"type": "array", "items": {"type": "number"}},
                     "learning_rate": {"type": "number"}, "epochs": {"type": "integer", "minimum": 1},
                     "batching": {"enum": ["per_sample", "full"]},
                     "sigma_history": {"type": "array", "items": {"type": "number"}}}}}},

  "conjecture-report": {"type": "object", "additionalProperties": false, "required": ["families"], "properties": {
    "families": {"type": "array", "items": {"type": "object", "additionalProperties": false,
      "required": ["pair", "points"], "properties": {
        "pair": {"$ref": "#/definitions/pair"},
        "points": {"type": "array", "items": {"type": "object", "additionalProperties": false,
          "required": ["r", "status"], "properties": {
            "r": {"$ref": "#/definitions/point"},
            "status": {"enum": ["crossing", "no_crossing"]},
            "q_low": {"type": "number"}, "q_high": {"type": "number"}, "crossing": {"type": "number"},
            "analytic": {"type": "number"}, "discrepancy": {"type": "number", "minimum": 0},
            "scaling_reference": {"type": "number"}, "scaling_max_residual": {"type": "number", "minimum": 0}}}}}}}}}
})";

const std::map<std::string, json, std::less<>>& registry() {
  static const auto table = [] {
    const json defs = json::parse(kDefinitions);
    std::map<std::string, json, std::less<>> out;
    const json all = json::parse(kSchemas);
    for (const auto& [name, s] : all.items()) {
      json full = s;
      full["definitions"] = defs;
      out.emplace(name, std::move(full));
    }
    return out;
  }();
  return table;
}

std::string type_of(const json& v) {
  if (v.is_null()) return "null";
  if (v.is_boolean()) return "boolean";
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  return "object";
}

bool type_matches(const json& v, const std::string& t) {
  if (t == "number") return v.is_number();
  if (t == "integer") {
    return v.is_number_integer() || (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>());
  }
  return type_of(v) == t;
}

class Validator {
 public:
  explicit Validator(const json& root) : root_(root) {}

  void check(const json& v, const json& s, const std::string& path, std::vector<std::string>& errs) const {
    if (s.contains("$ref")) {
      check(v, resolve(s["$ref"].get<std::string>()), path, errs);
      return;
    }
    if (s.contains("type")) {
      const json& t = s["type"];
      bool ok = false;
      if (t.is_array()) {
        for (const auto& x : t) ok = ok || type_matches(v, x.get<std::string>());
      } else {
        ok = type_matches(v, t.get<std::string>());
      }
      if (!ok) {
        errs.push_back(path + ": expected " + t.dump() + ", got " + type_of(v));
        return;
      }
    }
    if (s.contains("const") && v != s["const"]) errs.push_back(path + ": must equal " + s["const"].dump());
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s["enum"]) found = found || e == v;
      if (!found) errs.push_back(path + ": must be one of " + s["enum"].dump());
    }
    if (v.is_number()) {
      const double x = v.get<double>();
      if (s.contains("minimum") && x < s["minimum"].get<double>()) errs.push_back(path + ": below minimum");
      if (s.contains("maximum") && x > s["maximum"].get<double>()) errs.push_back(path + ": above maximum");
      if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>()) {
        errs.push_back(path + ": must exceed " + s["exclusiveMinimum"].dump());
      }
      if (s.contains("exclusiveMaximum") && x >= s["exclusiveMaximum"].get<double>()) {
        errs.push_back(path + ": must be below " + s["exclusiveMaximum"].dump());
      }
    }
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) {
        errs.push_back(path + ": needs at least " + s["minItems"].dump() + " items");
      }
      if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>()) {
        errs.push_back(path + ": allows at most " + s["maxItems"].dump() + " items");
      }
      if (s.contains("items")) {
        for (std::size_t i = 0; i < v.size(); ++i) check(v[i], s["items"], path + "/" + std::to_string(i), errs);
      }
    }
    if (v.is_object()) {
      if (s.contains("required")) {
        for (const auto& key : s["required"]) {
          if (!v.contains(key.get<std::string>())) errs.push_back(path + ": missing \"" + key.get<std::string>() + "\"");
        }
      }
      const json* props = s.contains("properties") ? &s["properties"] : nullptr;
      for (const auto& [key, value] : v.items()) {
        if (props && props->contains(key)) {
          check(value, (*props)[key], path + "/" + key, errs);
        } else if (s.contains("additionalProperties") && s["additionalProperties"] == false) {
          errs.push_back(path + ": unknown key \"" + key + "\"");
        }
      }
    }
    if (s.contains("anyOf") || s.contains("oneOf")) {
      const bool one = s.contains("oneOf");
      std::size_t matched = 0;
      std::vector<std::string> best;
      for (const auto& alt : s[one ? "oneOf" : "anyOf"]) {
        std::vector<std::string> sub;
        check(v, alt, path, sub);
        if (sub.empty()) {
          ++matched;
        } else if (best.empty() || sub.size() < best.size()) {
          best = std::move(sub);
        }
      }
      if (matched == 0) {
        // Report the closest alternative rather than all of them.
        errs.insert(errs.end(), best.begin(), best.end());
      } else if (one && matched > 1) {
        errs.push_back(path + ": matches more than one alternative");
      }
    }
  }

 private:
  const json& resolve(const std::string& ref) const {
    const std::string prefix = "#/definitions/";
    if (ref.rfind(prefix, 0) != 0 || !root_.contains("definitions") ||
        !root_["definitions"].contains(ref.substr(prefix.size()))) {
      throw Error(ErrorCode::Config, "unresolvable schema reference " + ref);
    }
    return root_["definitions"][ref.substr(prefix.size())];
  }

  const json& root_;
};

}  // namespace

std::vector<std::string> names() {
  std::vector<std::string> out;
  for (const auto& [name, s] : registry()) out.push_back(name);
  return out;
}

const json& get(std::string_view name) {
  const auto& r = registry();
  const auto it = r.find(name);
  if (it == r.end()) throw Error(ErrorCode::Config, "unknown schema '" + std::string(name) + "'");
  return it->second;
}

std::vector<std::string> validate(const json& doc, const json& schema) {
  std::vector<std::string> errs;
  Validator(schema).check(doc, schema, "", errs);
  for (auto& e : errs) {
    if (e.front() == ':') e = "(root)" + e;
  }
  return errs;
}

void require_valid(const json& doc, std::string_view schema_name, ErrorCode code) {
  const auto errs = validate(doc, get(schema_name));
  if (errs.empty()) return;
  std::string msg = "document does not match schema '" + std::string(schema_name) + "':";
  for (const auto& e : errs) msg += "\n  " + e;
  throw Error(code, msg);
}

}  // namespace lsq::schema
