#include "levelset/io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "levelset/error.hpp"

namespace lsq::io {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void data_error(const std::string& what) { throw Error(ErrorCode::Data, what); }
[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::Config, what); }

std::vector<double> number_array(const json& j, const char* what) {
  if (!j.is_array()) data_error(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) data_error(std::string(what) + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

const char* regime_name(SwitchRegime r) {
  switch (r) {
    case SwitchRegime::InteriorSwitch: return "interior";
    case SwitchRegime::AlwaysJ: return "always_j";
    case SwitchRegime::AlwaysK: return "always_k";
  }
  return "interior";
}

}  // namespace

json ratio_to_json(const ExtendedRatio& v) {
  switch (v.kind()) {
    case ExtendedRatio::Kind::Zero: return 0.0;
    case ExtendedRatio::Kind::Finite: return v.value();
    case ExtendedRatio::Kind::Infinite: return "inf";
    case ExtendedRatio::Kind::Indeterminate: return nullptr;
  }
  return nullptr;
}

ExtendedRatio ratio_from_json(const json& j) {
  if (j.is_null()) return ExtendedRatio::indeterminate();
  if (j.is_string() && j.get<std::string>() == "inf") return ExtendedRatio::infinite();
  if (j.is_number() && j.get<double>() >= 0.0) return ExtendedRatio::from_double(j.get<double>());
  data_error("ratio must be a non-negative number, \"inf\" or null");
}

json bound_to_json(double v) { return std::isinf(v) ? json("inf") : json(v); }

double bound_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return kInf;
  if (j.is_number()) return j.get<double>();
  data_error("interval bound must be a number or \"inf\"");
}

json ratio_matrix_to_json(const RatioMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    json row = json::array();
    for (std::size_t c = 0; c < m.size(); ++c) row.push_back(ratio_to_json(m(i, c)));
    rows.push_back(row);
  }
  return rows;
}

DensityList densities_from_json(const json& spec) {
  if (spec.contains("builtin")) {
    if (spec["builtin"] == "gaussian_three_class") return gaussian_three_class_example();
    config_error("unknown builtin density set");
  }
  DensityList out;
  for (const auto& c : spec.at("classes")) {
    const std::string kind = c.at("kind");
    if (kind == "gaussian") {
      out.push_back(std::make_shared<GaussianDensity>(GaussianParams::make(
          c.at("mean").get<std::vector<double>>(), c.at("cov").get<std::vector<std::vector<double>>>())));
    } else if (kind == "piecewise") {
      std::vector<Box> cells;
      for (const auto& cell : c.at("cells")) {
        cells.push_back(Box{cell.at("lo").get<Point>(), cell.at("hi").get<Point>()});
      }
      out.push_back(std::make_shared<PiecewiseConstantDensity>(std::move(cells), c.at("values").get<std::vector<double>>()));
    } else {
      config_error("unknown density kind '" + kind + "'");
    }
  }
  if (out.size() < 2) config_error("a density specification needs at least two classes");
  for (const auto& d : out) {
    if (d->dim() != out.front()->dim()) config_error("class densities differ in dimension");
  }
  return out;
}

json interval_record(PointView r, const PointProbe& probe, std::optional<std::size_t> label) {
  const std::size_t k = probe.matrix.size();
  json rec;
  rec["r"] = std::vector<double>(r.begin(), r.end());
  if (label) rec["label"] = *label + 1;
  json rows = json::array();
  for (std::size_t i = 0; i < k; ++i) {
    json row = json::array();
    for (std::size_t c = 0; c < k; ++c) {
      row.push_back(json::array({bound_to_json(probe.matrix(i, c).lo), bound_to_json(probe.matrix(i, c).hi)}));
    }
    rows.push_back(row);
  }
  rec["intervals"] = rows;
  rec["violations"] = probe.matrix.total_violations();
  json brackets = json::array();
  for (const auto& b : probe.brackets) {
    brackets.push_back({{"pair", {b.j + 1, b.k + 1}},
                        {"q_low", b.q_low},
                        {"q_high", b.q_high},
                        {"regime", regime_name(b.regime)},
                        {"violations", b.violations},
                        {"foreign_labels", b.foreign_labels}});
  }
  rec["brackets"] = brackets;
  return rec;
}

IntervalRecord interval_record_from_json(const json& j) {
  if (!j.is_object() || !j.contains("r") || !j.contains("intervals")) {
    data_error("interval record needs \"r\" and \"intervals\"");
  }
  IntervalRecord rec;
  rec.r = number_array(j["r"], "r");
  const json& rows = j["intervals"];
  if (!rows.is_array() || rows.empty()) data_error("intervals must be a non-empty square array");
  const std::size_t k = rows.size();
  rec.matrix = RatioIntervalMatrix(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!rows[i].is_array() || rows[i].size() != k) data_error("intervals must be square");
    for (std::size_t c = 0; c < k; ++c) {
      const json& iv = rows[i][c];
      if (!iv.is_array() || iv.size() != 2) data_error("each interval is a [lo, hi] pair");
      const double lo = bound_from_json(iv[0]);
      const double hi = bound_from_json(iv[1]);
      if (!(lo >= 0.0) || !(hi >= lo)) data_error("interval bounds must satisfy 0 <= lo <= hi");
      rec.matrix(i, c) = RatioInterval{lo, hi};
    }
  }
  if (j.contains("brackets")) {
    for (const auto& b : j["brackets"]) {
      const auto pair = b.at("pair").get<std::vector<std::size_t>>();
      if (pair.size() != 2 || pair[0] < 1 || pair[1] < 1 || pair[0] > k || pair[1] > k) {
        data_error("bracket pair out of range");
      }
      const std::size_t n = b.at("violations").size();
      rec.matrix.violations(pair[0] - 1, pair[1] - 1) = n;
      rec.matrix.violations(pair[1] - 1, pair[0] - 1) = n;
    }
  }
  if (j.contains("label") && !j["label"].is_null()) {
    if (!j["label"].is_number_integer()) data_error("label must be an integer");
    const auto l = j["label"].get<long long>();
    if (l < 1 || l > static_cast<long long>(k)) data_error("label out of range");
    rec.label = static_cast<std::size_t>(l - 1);
  }
  return rec;
}

json audit_record(const IntervalRecord& rec, const FeasibleSet& fs) {
  auto one_based = [](const std::vector<std::size_t>& v) {
    std::vector<std::size_t> out;
    for (std::size_t i : v) out.push_back(i + 1);
    return out;
  };
  json out;
  out["r"] = rec.r;
  out["feasible"] = fs.feasible;
  out["violations"] = rec.matrix.total_violations();
  if (rec.label) out["true_label"] = *rec.label + 1;
  if (!fs.feasible) {
    out["partition"] = nullptr;
    out["witness"] = nullptr;
    out["u_mean"] = nullptr;
    out["u_interval"] = nullptr;
    return out;
  }
  out["partition"] = {{"W", one_based(fs.partition.w)}, {"V", one_based(fs.partition.v)}};
  out["witness"] = ratio_matrix_to_json(*fs.witness);
  out["u_mean"] = fs.summary_u;
  out["u_interval"] = {fs.u_interval.first, fs.u_interval.second};
  out["z"] = 1.0 - fs.summary_u;
  out["label"] = fs.witness_label + 1;
  out["label_robust"] = fs.label_robust;
  out["vertices"] = fs.vertices.size();
  out["projected_vertices"] = fs.projected_vertices;
  return out;
}

json family_to_json(const PairwiseFamily& fam, const HomotopySchedule& schedule) {
  json models = json::array();
  for (const auto& m : fam.models) {
    const auto p = m.parameters();
    models.push_back(std::vector<double>(p.begin(), p.end()));
  }
  const auto& a = fam.models.empty() ? ScorerArchitecture{} : fam.models.front().architecture();
  return {{"format", "levelset-family/1"},
          {"architecture", {{"input_dim", a.input_dim}, {"hidden", a.hidden}, {"classes", a.classes}}},
          {"pair", {fam.j + 1, fam.k + 1}},
          {"grid", fam.grid.values()},
          {"parameters", models},
          {"provenance",
           {{"objective", fam.objective},
            {"seed", fam.seed},
            {"sigmas", schedule.sigmas},
            {"learning_rate", schedule.learning_rate},
            {"epochs", schedule.epochs},
            {"batching", schedule.batching == Batching::PerSample ? "per_sample" : "full"},
            {"sigma_history", fam.sigma_history}}}};
}

PairwiseFamily family_from_json(const json& j) {
  try {
    if (j.at("format") != "levelset-family/1") data_error("unsupported checkpoint format");
    const json& a = j.at("architecture");
    const ScorerArchitecture arch{a.at("input_dim").get<std::size_t>(), a.at("hidden").get<std::size_t>(),
                                  a.at("classes").get<std::size_t>()};
    PairwiseFamily fam;
    const auto pair = j.at("pair").get<std::vector<std::size_t>>();
    if (pair.size() != 2 || pair[0] < 1 || pair[1] < 1) data_error("checkpoint pair must be two 1-based labels");
    fam.j = pair[0] - 1;
    fam.k = pair[1] - 1;
    fam.grid = PrevalenceGrid::make(j.at("grid").get<std::vector<double>>());
    for (const auto& p : j.at("parameters")) fam.models.emplace_back(arch, p.get<std::vector<double>>());
    const json& prov = j.at("provenance");
    fam.seed = prov.at("seed").get<std::uint64_t>();
    fam.objective = prov.at("objective").get<std::string>();
    fam.sigma_history = prov.at("sigma_history").get<std::vector<double>>();
    if (fam.models.size() != fam.grid.size()) data_error("checkpoint needs one model per grid value");
    return fam;
  } catch (const json::exception& e) {
    data_error(std::string("malformed checkpoint: ") + e.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    config_error(path.string() + ": " + e.what());
  }
}

std::vector<json> read_json_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) data_error("cannot open " + path.string());
  std::vector<json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      data_error(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& out, std::vector<std::string>& fields) {
  out.clear();
  fields.clear();
  std::stringstream ss(line);
  std::string field;
  bool numeric = true;
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    field = b == std::string::npos ? "" : field.substr(b, e - b + 1);
    fields.push_back(field);
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size()) numeric = false;
    out.push_back(v);
  }
  return numeric;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) data_error("cannot open " + path.string());
  CsvTable t;
  std::string line;
  std::size_t n = 0;
  std::vector<double> row;
  std::vector<std::string> fields;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const bool numeric = parse_row(line, row, fields);
    if (!numeric) {
      if (t.rows.empty() && t.header.empty()) {
        t.header = fields;
        continue;
      }
      data_error(path.string() + ":" + std::to_string(n) + ": non-numeric field");
    }
    if (!t.rows.empty() && row.size() != t.rows.front().size()) {
      data_error(path.string() + ":" + std::to_string(n) + ": ragged row");
    }
    if (!t.header.empty() && row.size() != t.header.size()) {
      data_error(path.string() + ":" + std::to_string(n) + ": row width differs from header");
    }
    t.rows.push_back(row);
  }
  return t;
}

std::vector<LabeledSample> samples_from_csv(const CsvTable& table, std::size_t& num_classes) {
  std::vector<LabeledSample> out;
  std::size_t max_label = 0;
  for (const auto& row : table.rows) {
    if (row.size() < 2) data_error("dataset rows need feature columns and a label column");
    const double l = row.back();
    if (l < 1.0 || l != std::floor(l)) data_error("labels must be positive integers");
    LabeledSample s;
    s.point.assign(row.begin(), row.end() - 1);
    s.label = static_cast<std::size_t>(l) - 1;
    max_label = std::max(max_label, s.label + 1);
    out.push_back(std::move(s));
  }
  if (num_classes == 0) num_classes = max_label;
  if (max_label > num_classes) data_error("label exceeds the declared class count");
  return out;
}

}  // namespace lsq::io
