#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "levelset/consistency.hpp"
#include "levelset/density.hpp"
#include "levelset/probing.hpp"
#include "levelset/training.hpp"

namespace lsq::io {

using nlohmann::json;

// Extended values: numbers, "inf", and null for an indeterminate ratio.
json ratio_to_json(const ExtendedRatio& v);
ExtendedRatio ratio_from_json(const json& j);
json bound_to_json(double v);
double bound_from_json(const json& j);
json ratio_matrix_to_json(const RatioMatrix& m);

// Density specification: {"builtin": "gaussian_three_class"} or
// {"classes": [{"kind": "gaussian", "mean", "cov"} | {"kind": "piecewise", "cells", "values"}]}.
// Throws Config.
DensityList densities_from_json(const json& spec);

// One probe record (1-based pair and label indices).
json interval_record(PointView r, const PointProbe& probe, std::optional<std::size_t> label = std::nullopt);

struct IntervalRecord {
  Point r;
  std::optional<std::size_t> label;  // 0-based
  RatioIntervalMatrix matrix;
};
// Throws Data on malformed records.
IntervalRecord interval_record_from_json(const json& j);

json audit_record(const IntervalRecord& rec, const FeasibleSet& fs);

json family_to_json(const PairwiseFamily& fam, const HomotopySchedule& schedule);
PairwiseFamily family_from_json(const json& j);

// Reads a JSON document; Config on missing file or parse error.
json read_json_file(const std::filesystem::path& path);
// JSON lines; Data on malformed lines.
std::vector<json> read_json_lines(const std::filesystem::path& path);

struct CsvTable {
  std::vector<std::string> header;  // empty when the file has none
  std::vector<std::vector<double>> rows;
};
// Numeric CSV; a first line that does not parse as numbers is taken as a header.
// Throws Data.
CsvTable read_csv(const std::filesystem::path& path);

// Rows of feature columns followed by an integer 1-based label column.
std::vector<LabeledSample> samples_from_csv(const CsvTable& table, std::size_t& num_classes);

}  // namespace lsq::io
