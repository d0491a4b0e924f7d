#include "levelset/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "levelset/bayes.hpp"
#include "levelset/external.hpp"
#include "levelset/kernels.hpp"
#include "levelset/multiclass.hpp"
#include "levelset/schema.hpp"
#include "levelset/training.hpp"

namespace lsq::cli {

namespace fs = std::filesystem;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config:
    case ErrorCode::InteriorRequired:
    case ErrorCode::NegativeWeight:
    case ErrorCode::BadSum:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::BadPair:
      return kExitConfig;
    case ErrorCode::Protocol:
      return kExitProtocol;
    default:
      return kExitData;
  }
}

std::vector<double> default_bin_edges() { return {0.5, 0.6, 0.7, 0.8, 0.9, 0.98}; }

std::size_t z_bin(double z, const std::vector<double>& edges) {
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    if (z >= edges[b] && z < edges[b + 1]) return b;
  }
  return edges.size() - 1;
}

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::Config, what); }
[[noreturn]] void data_error(const std::string& what) { throw Error(ErrorCode::Data, what); }

fs::path resolve(const RunOptions& opts, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : opts.base_dir / path;
}

// Shortest round-trip text for a double, shared by every CSV writer.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  return json(v).dump();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << content)) data_error("cannot write " + path.string());
}

void ensure_out_dir(const RunOptions& opts) {
  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  if (ec) config_error("cannot create output directory " + opts.out_dir.string() + ": " + ec.message());
}

SimplexVector chi_from(const json& j) { return SimplexVector::make(j.get<std::vector<double>>()); }

PrevalenceGrid grid_from(const json& cfg, const char* key) {
  if (!cfg.contains(key)) return PrevalenceGrid::standard();
  const json& g = cfg[key];
  if (g.contains("step")) return PrevalenceGrid::uniform(g["step"].get<double>());
  return PrevalenceGrid::make(g["values"].get<std::vector<double>>());
}

TieRule tie_from(const json& cfg) {
  return cfg.value("tie", "lowest") == "highest" ? TieRule::highest_index() : TieRule::lowest_index();
}

std::vector<double> edges_from(const json& cfg) {
  if (!cfg.contains("bin_edges")) return default_bin_edges();
  auto e = cfg["bin_edges"].get<std::vector<double>>();
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (!(e[i] > e[i - 1])) config_error("bin_edges must be strictly increasing");
  }
  return e;
}

struct PointSet {
  std::vector<Point> points;
  std::vector<std::optional<std::size_t>> labels;  // 0-based
};

PointSet points_from(const json& spec, const RunOptions& opts) {
  PointSet out;
  if (spec.contains("inline")) {
    for (const auto& p : spec["inline"]) out.points.push_back(p.get<Point>());
  } else if (spec.contains("random")) {
    const json& r = spec["random"];
    const auto lo = r["lo"].get<Point>();
    const auto hi = r["hi"].get<Point>();
    if (lo.size() != hi.size()) config_error("random points: lo and hi differ in length");
    const auto n = r["n"].get<std::size_t>();
    const auto seed = r.value("seed", std::uint64_t{0});
    for (std::size_t i = 0; i < n; ++i) {
      CounterRng rng(seed, i);
      Point p(lo.size());
      for (std::size_t d = 0; d < lo.size(); ++d) p[d] = lo[d] + (hi[d] - lo[d]) * rng.uniform01();
      out.points.push_back(std::move(p));
    }
  } else {
    const auto table = io::read_csv(resolve(opts, spec["file"].get<std::string>()));
    const bool labelled = spec.value("labelled", false);
    for (const auto& row : table.rows) {
      if (!labelled) {
        out.points.push_back(row);
        continue;
      }
      if (row.size() < 2) data_error("labelled point rows need features and a label");
      const double l = row.back();
      if (l < 1.0 || l != std::floor(l)) data_error("labels must be positive integers");
      out.points.emplace_back(row.begin(), row.end() - 1);
      out.labels.resize(out.points.size());
      out.labels.back() = static_cast<std::size_t>(l) - 1;
    }
  }
  out.labels.resize(out.points.size());
  for (const auto& p : out.points) {
    if (p.size() != out.points.front().size()) data_error("points differ in dimension");
  }
  return out;
}

void check_dim(const PointSet& ps, std::size_t dim) {
  for (const auto& p : ps.points) {
    if (p.size() != dim) data_error("point dimension " + std::to_string(p.size()) + " differs from " + std::to_string(dim));
  }
}

void check_labels(const PointSet& ps, std::size_t k) {
  for (const auto& l : ps.labels) {
    if (l && *l >= k) data_error("point label exceeds the class count");
  }
}

// Interior chi drawn from the flat Dirichlet; stream i of seed.
SimplexVector random_interior_chi(std::size_t k, std::uint64_t seed, std::uint64_t i) {
  CounterRng rng(seed, i);
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) {
    x = -std::log(1.0 - rng.uniform01());
    total += x;
  }
  for (auto& x : w) x /= total;
  return SimplexVector::make(std::move(w));
}

std::string probe_jsonl(const std::vector<Point>& points, const std::vector<PointProbe>& probes,
                        const std::vector<std::optional<std::size_t>>& labels) {
  std::string out;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    out += io::interval_record(points[i], probes[i], labels[i]).dump();
    out += '\n';
  }
  return out;
}

std::vector<PairwiseFamily> load_families(const std::vector<std::string>& files, const RunOptions& opts) {
  std::vector<PairwiseFamily> out;
  for (const auto& f : files) {
    const fs::path path = resolve(opts, f);
    std::ifstream in(path);
    if (!in) data_error("cannot open checkpoint " + path.string());
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      data_error(path.string() + ": " + e.what());
    }
    schema::require_valid(j, "checkpoint", ErrorCode::Data);
    out.push_back(io::family_from_json(j));
  }
  return out;
}

void require_all_pairs(const std::vector<PairwiseFamily>& families, std::size_t k) {
  std::vector<std::vector<bool>> seen(k, std::vector<bool>(k, false));
  for (const auto& f : families) {
    if (f.j >= k || f.k >= k || f.j == f.k) throw Error(ErrorCode::BadPair, "family pair out of range");
    seen[std::min(f.j, f.k)][std::max(f.j, f.k)] = true;
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      if (!seen[a][b]) {
        config_error("no family for pair (" + std::to_string(a + 1) + ", " + std::to_string(b + 1) +
                     "); probing needs every pair");
      }
    }
  }
}

struct AuditOutput {
  json rollup;
  std::string records;
};

AuditOutput audit_set(const std::string& name, const std::vector<io::IntervalRecord>& recs, const SimplexVector& chi,
                      double tol, const std::vector<double>& edges, Execution exec) {
  std::vector<RatioIntervalMatrix> mats;
  mats.reserve(recs.size());
  for (const auto& r : recs) {
    if (r.matrix.size() != chi.size()) {
      throw Error(ErrorCode::DimensionMismatch, "interval matrix size differs from chi length");
    }
    mats.push_back(r.matrix);
  }
  const auto sets = audit_points(mats, chi, tol, exec);
  AuditOutput out;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    out.records += io::audit_record(recs[i], sets[i]).dump();
    out.records += '\n';
  }
  out.rollup = audit_rollup(name, recs, sets, edges);
  return out;
}

std::vector<io::IntervalRecord> records_from(const std::vector<Point>& points, const std::vector<PointProbe>& probes,
                                             const std::vector<std::optional<std::size_t>>& labels) {
  std::vector<io::IntervalRecord> out;
  for (std::size_t i = 0; i < probes.size(); ++i) out.push_back({points[i], labels[i], probes[i].matrix});
  return out;
}

}  // namespace

json audit_rollup(const std::string& name, const std::vector<io::IntervalRecord>& records,
                  const std::vector<FeasibleSet>& sets, const std::vector<double>& edges) {
  const std::size_t nbins = edges.size();  // edges.size() - 1 ranges plus the remainder
  std::vector<std::size_t> count(nbins, 0), straddle(nbins, 0), labelled(nbins, 0), correct(nbins, 0);
  std::size_t consistent = 0, with_label = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const FeasibleSet& fs = sets[i];
    if (!fs.feasible) continue;
    ++consistent;
    const std::size_t b = z_bin(1.0 - fs.summary_u, edges);
    ++count[b];
    // The Z range of the feasible vertices reaches into another bin.
    if (z_bin(1.0 - fs.u_interval.second, edges) != b || z_bin(1.0 - fs.u_interval.first, edges) != b) ++straddle[b];
    if (records[i].label) {
      ++with_label;
      ++labelled[b];
      if (*records[i].label == fs.witness_label) ++correct[b];
    }
  }
  json bins = json::array();
  for (std::size_t b = 0; b < nbins; ++b) {
    json range = b + 1 < nbins ? json::array({edges[b], edges[b + 1]}) : json("remainder");
    json acc = labelled[b] ? json(static_cast<double>(correct[b]) / static_cast<double>(labelled[b])) : json(nullptr);
    bins.push_back({{"range", range}, {"count", count[b]}, {"straddle", straddle[b]}, {"labelled", labelled[b]},
                    {"accuracy", acc}});
  }
  return {{"name", name},
          {"points", sets.size()},
          {"consistent", consistent},
          {"inconsistent", sets.size() - consistent},
          {"labelled", with_label},
          {"bins", bins}};
}

json cmd_gaussian_demo(const json& config, const RunOptions& opts) {
  schema::require_valid(config, "gaussian-demo");
  const DensityList densities =
      io::densities_from_json(config.value("densities", json{{"builtin", "gaussian_three_class"}}));
  const std::size_t k = densities.size();
  if (densities.front()->dim() != 2) config_error("gaussian-demo draws 2-D maps; densities must be 2-D");

  const json lat = config.value("lattice", json{{"lo", {-2.0, -2.0}}, {"hi", {2.0, 2.0}}, {"points", {101, 101}}});
  const auto lo = lat["lo"].get<Point>();
  const auto hi = lat["hi"].get<Point>();
  const auto shape = lat["points"].get<std::vector<std::size_t>>();
  if (lo.size() != 2 || hi.size() != 2 || !(hi[0] > lo[0]) || !(hi[1] > lo[1])) {
    config_error("lattice needs 2-D lo < hi");
  }
  std::vector<Point> points;
  points.reserve(shape[0] * shape[1]);
  for (std::size_t iy = 0; iy < shape[1]; ++iy) {
    for (std::size_t ix = 0; ix < shape[0]; ++ix) {
      points.push_back({lo[0] + (hi[0] - lo[0]) * static_cast<double>(ix) / static_cast<double>(shape[0] - 1),
                        lo[1] + (hi[1] - lo[1]) * static_cast<double>(iy) / static_cast<double>(shape[1] - 1)});
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (config.contains("contours")) {
    for (const auto& p : config["contours"]) pairs.emplace_back(p[0].get<std::size_t>() - 1, p[1].get<std::size_t>() - 1);
  } else if (k >= 3) {
    pairs = {{0, 1}, {2, 1}, {0, 2}};
  } else {
    pairs = {{0, 1}};
  }
  for (const auto& [a, b] : pairs) {
    if (a >= k || b >= k || a == b) throw Error(ErrorCode::BadPair, "contour pair out of range");
  }

  const SimplexVector chi = config.contains("chi") ? chi_from(config["chi"]) : SimplexVector::uniform(k);
  if (chi.size() != k) throw Error(ErrorCode::DimensionMismatch, "chi length differs from class count");
  if (!chi.interior()) throw Error(ErrorCode::InteriorRequired, "chi must be interior");
  const TieRule tie = tie_from(config);
  const Execution exec = opts.execution();
  ensure_out_dir(opts);

  // (a) prevalence-function contours
  std::vector<std::vector<double>> qvals(points.size(), std::vector<double>(pairs.size()));
  for_each_index(points.size(), exec, [&](std::size_t i) {
    for (std::size_t c = 0; c < pairs.size(); ++c) {
      const auto q = prevalence_function(densities, pairs[c].first, pairs[c].second, points[i]);
      qvals[i][c] = q ? *q : std::nan("");
    }
  });
  std::string csv = "x,y";
  for (const auto& [a, b] : pairs) csv += ",q_" + std::to_string(a + 1) + "_" + std::to_string(b + 1);
  csv += '\n';
  for (std::size_t i = 0; i < points.size(); ++i) {
    csv += num(points[i][0]) + "," + num(points[i][1]);
    for (double q : qvals[i]) csv += "," + num(q);
    csv += '\n';
  }
  write_file(opts.out_dir / "contours.csv", csv);

  // (b) label map at chi
  const ExactPrevalenceTable table(densities);
  const auto map = label_map(table, chi, points, tie, exec);
  csv = "x,y,label";
  for (std::size_t c = 0; c < k; ++c) csv += ",score_" + std::to_string(c + 1);
  csv += ",boundary,off_support\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    csv += num(points[i][0]) + "," + num(points[i][1]) + "," + std::to_string(map[i].decision.label + 1);
    for (std::size_t c = 0; c < k; ++c) csv += "," + (map[i].scores.empty() ? std::string("0") : num(map[i].scores[c]));
    csv += std::string(",") + (map[i].decision.boundary ? "1" : "0") + "," + (map[i].decision.off_support ? "1" : "0");
    csv += '\n';
  }
  write_file(opts.out_dir / "label_map.csv", csv);

  // (c) constructed vs direct oracle
  const json audit_cfg = config.value("audit", json::object());
  const auto extra = audit_cfg.value("random_chi", std::size_t{10});
  const auto seed = audit_cfg.value("seed", std::uint64_t{0});
  std::vector<SimplexVector> chis{chi};
  for (std::size_t i = 0; i < extra; ++i) chis.push_back(random_interior_chi(k, seed, i));
  json runs = json::array();
  std::size_t true_mismatches = 0, tie_mismatches = 0;
  for (const auto& c : chis) {
    const auto rep = equivalence_audit(table, densities, c, points, tie, exec);
    true_mismatches += rep.true_mismatches;
    tie_mismatches += rep.tie_mismatches;
    const auto w = c.weights();
    runs.push_back({{"chi", std::vector<double>(w.begin(), w.end())},
                    {"points", rep.points},
                    {"matches", rep.matches},
                    {"tie_flagged", rep.tie_flagged},
                    {"tie_mismatches", rep.tie_mismatches},
                    {"true_mismatches", rep.true_mismatches}});
  }
  const json audit = {{"runs", runs}, {"true_mismatches", true_mismatches}, {"tie_mismatches", tie_mismatches}};
  write_file(opts.out_dir / "equivalence_audit.json", audit.dump(2) + "\n");

  return {{"command", "gaussian-demo"},
          {"points", points.size()},
          {"chi_runs", chis.size()},
          {"true_mismatches", true_mismatches}};
}

json cmd_probe(const json& config, const RunOptions& opts) {
  schema::require_valid(config, "probe");
  const json& c = config["classifier"];
  const std::string kind = c["kind"];
  const PrevalenceGrid grid = grid_from(config, "grid");
  const auto refine = config.value("refine_iters", std::size_t{0});

  std::unique_ptr<MonotoneClassifier> clf;
  std::optional<std::size_t> dim;
  if (kind == "oracle") {
    auto densities = io::densities_from_json(c["densities"]);
    dim = densities.front()->dim();
    clf = std::make_unique<OracleClassifier>(std::move(densities), tie_from(c));
  } else if (kind == "checkpoint") {
    const auto k = c["num_classes"].get<std::size_t>();
    auto families = load_families(c["files"].get<std::vector<std::string>>(), opts);
    require_all_pairs(families, k);
    dim = families.front().models.front().architecture().input_dim;
    clf = std::make_unique<TrainedFamilyClassifier>(k, std::move(families));
  } else {
    auto argv = c["command"].get<std::vector<std::string>>();
    if (argv[0].find('/') != std::string::npos) argv[0] = resolve(opts, argv[0]).string();
    clf = std::make_unique<SubprocessClassifier>(std::move(argv), c["num_classes"].get<std::size_t>());
  }

  const PointSet ps = points_from(config["points"], opts);
  if (dim) check_dim(ps, *dim);
  check_labels(ps, clf->num_classes());
  ensure_out_dir(opts);
  const auto probes = probe_points(*clf, ps.points, grid, refine, opts.execution());
  write_file(opts.out_dir / "probe.jsonl", probe_jsonl(ps.points, probes, ps.labels));

  std::size_t violations = 0;
  for (const auto& p : probes) violations += p.matrix.total_violations();
  return {{"command", "probe"}, {"points", probes.size()}, {"violations", violations}};
}

json cmd_audit(const json& config, const RunOptions& opts) {
  schema::require_valid(config, "audit");
  const SimplexVector chi = chi_from(config["chi"]);
  if (!chi.interior()) throw Error(ErrorCode::InteriorRequired, "chi must be interior");
  const double tol = config.value("tol", 1e-9);
  const auto edges = edges_from(config);
  ensure_out_dir(opts);

  json sets = json::array();
  for (const auto& s : config["sets"]) {
    const std::string name = s["name"];
    std::vector<io::IntervalRecord> recs;
    for (const auto& line : io::read_json_lines(resolve(opts, s["file"].get<std::string>()))) {
      schema::require_valid(line, "interval-record", ErrorCode::Data);
      recs.push_back(io::interval_record_from_json(line));
    }
    auto out = audit_set(name, recs, chi, tol, edges, opts.execution());
    write_file(opts.out_dir / ("audit_" + name + ".jsonl"), out.records);
    sets.push_back(std::move(out.rollup));
  }
  const auto w = chi.weights();
  const json report = {{"chi", std::vector<double>(w.begin(), w.end())}, {"bin_edges", edges}, {"sets", sets}};
  write_file(opts.out_dir / "audit_report.json", report.dump(2) + "\n");
  return {{"command", "audit"}, {"report", report}};
}

json cmd_train(const json& config, const RunOptions& opts) {
  schema::require_valid(config, "train");
  std::size_t k = config.value("num_classes", std::size_t{0});
  const auto table = io::read_csv(resolve(opts, config["dataset"].get<std::string>()));
  const auto samples = io::samples_from_csv(table, k);
  if (samples.empty()) data_error("dataset is empty");
  const TrainingDataset data = TrainingDataset::from_samples(samples, k);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (config.contains("pairs")) {
    for (const auto& p : config["pairs"]) {
      const auto a = p[0].get<std::size_t>() - 1, b = p[1].get<std::size_t>() - 1;
      if (a >= k || b >= k || a == b) throw Error(ErrorCode::BadPair, "training pair out of range");
      pairs.emplace_back(a, b);
    }
  } else {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) pairs.emplace_back(a, b);
    }
  }

  HomotopySchedule schedule;
  if (config.contains("schedule")) {
    const json& s = config["schedule"];
    if (s.contains("sigmas")) schedule.sigmas = s["sigmas"].get<std::vector<double>>();
    schedule.learning_rate = s.value("learning_rate", schedule.learning_rate);
    schedule.epochs = s.value("epochs", schedule.epochs);
    if (s.contains("batching")) schedule.batching = s["batching"] == "full" ? Batching::FullBatch : Batching::PerSample;
    schedule.cross_entropy_weight = s.value("cross_entropy_weight", schedule.cross_entropy_weight);
  }
  schedule.validate();
  if (schedule.increasing()) {
    std::cerr << "levelset-uq: warning: sigma schedule increases; smoothing widens as training proceeds\n";
  }
  const ScorerArchitecture arch{data.dim(), config.value("scorer", json::object()).value("hidden", std::size_t{0}), 2};
  const PrevalenceGrid grid = grid_from(config, "grid");
  const auto seed = config.value("seed", std::uint64_t{0});
  const bool cross_entropy = config.value("objective", "homotopy") == "cross_entropy";
  ensure_out_dir(opts);

  std::vector<PairwiseFamily> families;
  json checkpoints = json::array();
  for (const auto& [a, b] : pairs) {
    families.push_back(cross_entropy ? train_cross_entropy_family(data, a, b, grid, schedule, arch, seed)
                                     : train_pairwise_family(data, a, b, grid, schedule, arch, seed));
    const std::string file = "checkpoint_" + std::to_string(a + 1) + "_" + std::to_string(b + 1) + ".json";
    write_file(opts.out_dir / file, io::family_to_json(families.back(), schedule).dump(2) + "\n");
    checkpoints.push_back(file);
  }
  json summary = {{"command", "train"}, {"checkpoints", checkpoints}};

  if (config.contains("probe")) {
    const json& pc = config["probe"];
    require_all_pairs(families, k);
    const TrainedFamilyClassifier clf(k, families);
    const PointSet ps = points_from(pc["points"], opts);
    check_dim(ps, data.dim());
    check_labels(ps, k);
    const auto probes =
        probe_points(clf, ps.points, grid_from(pc, "grid"), pc.value("refine_iters", std::size_t{0}), opts.execution());
    write_file(opts.out_dir / "probe.jsonl", probe_jsonl(ps.points, probes, ps.labels));
    summary["probe_points"] = probes.size();
    if (pc.contains("audit")) {
      const json& ac = pc["audit"];
      const SimplexVector chi = chi_from(ac["chi"]);
      if (chi.size() != k) throw Error(ErrorCode::DimensionMismatch, "chi length differs from class count");
      if (!chi.interior()) throw Error(ErrorCode::InteriorRequired, "chi must be interior");
      const auto edges = edges_from(ac);
      auto out = audit_set("train", records_from(ps.points, probes, ps.labels), chi, ac.value("tol", 1e-9), edges,
                           opts.execution());
      write_file(opts.out_dir / "audit_train.jsonl", out.records);
      const auto w = chi.weights();
      const json report = {
          {"chi", std::vector<double>(w.begin(), w.end())}, {"bin_edges", edges}, {"sets", json::array({out.rollup})}};
      write_file(opts.out_dir / "audit_report.json", report.dump(2) + "\n");
      summary["audit"] = report;
    }
  }

  if (config.contains("conjecture")) {
    const json& cc = config["conjecture"];
    std::optional<DensityList> densities;
    if (cc.contains("densities")) {
      densities = io::densities_from_json(cc["densities"]);
      if (densities->size() != k) config_error("conjecture densities differ in class count from the dataset");
    }
    std::vector<Point> pts;
    for (const auto& p : cc["points"]) pts.push_back(p.get<Point>());
    PointSet ps{pts, std::vector<std::optional<std::size_t>>(pts.size())};
    check_dim(ps, data.dim());
    json fams = json::array();
    for (const auto& fam : families) {
      const SoftmaxFamily sf = softmax_family(fam);
      json recs = json::array();
      for (const auto& r : pts) {
        std::optional<double> analytic;
        if (densities) analytic = prevalence_function(*densities, fam.j, fam.k, r);
        json rec = {{"r", r}};
        try {
          const auto rep = conjecture_probe(sf, fam.grid, r, analytic);
          rec["status"] = "crossing";
          rec["q_low"] = rep.q_low;
          rec["q_high"] = rep.q_high;
          rec["crossing"] = rep.crossing;
          if (rep.analytic) rec["analytic"] = *rep.analytic;
          if (rep.discrepancy) rec["discrepancy"] = *rep.discrepancy;
          rec["scaling_reference"] = rep.scaling_reference;
          rec["scaling_max_residual"] = rep.scaling_max_residual;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NoCrossing) throw;
          rec["status"] = "no_crossing";
        }
        recs.push_back(std::move(rec));
      }
      fams.push_back({{"pair", {fam.j + 1, fam.k + 1}}, {"points", recs}});
    }
    const json report = {{"families", fams}};
    write_file(opts.out_dir / "conjecture.json", report.dump(2) + "\n");
    summary["conjecture"] = report;
  }
  return summary;
}

int run(int argc, char** argv) {
  CLI::App app{"Level-set uncertainty quantification from monotone classifiers"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  int jobs = 0;

  const std::vector<std::string> commands{"gaussian-demo", "probe", "audit", "train"};
  for (const auto& name : commands) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--jobs", jobs, "worker threads (1 = serial)")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", out_dir, "output directory");
  }
  std::string schema_name;
  auto* schema_cmd = app.add_subcommand("schema", "print an embedded JSON schema (no name lists them)");
  schema_cmd->add_option("name", schema_name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (schema_cmd->parsed()) {
      if (schema_name.empty()) {
        for (const auto& n : schema::names()) std::cout << n << '\n';
      } else {
        std::cout << schema::get(schema_name).dump(2) << '\n';
      }
      return kExitOk;
    }
    RunOptions opts;
    opts.out_dir = out_dir;
    opts.jobs = jobs;
    opts.base_dir = fs::path(config_path).parent_path();
    if (opts.base_dir.empty()) opts.base_dir = ".";
    if (jobs > 0) set_thread_count(jobs);
    const json config = io::read_json_file(config_path);

    json summary;
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "gaussian-demo") summary = cmd_gaussian_demo(config, opts);
    else if (cmd == "probe") summary = cmd_probe(config, opts);
    else if (cmd == "audit") summary = cmd_audit(config, opts);
    else summary = cmd_train(config, opts);
    std::cout << summary.dump() << '\n';
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "levelset-uq: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const json::exception& e) {
    std::cerr << "levelset-uq: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace lsq::cli
