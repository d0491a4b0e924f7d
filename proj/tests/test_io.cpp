#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "levelset/cli.hpp"
#include "levelset/error.hpp"
#include "levelset/io.hpp"
#include "levelset/kernels.hpp"
#include "levelset/schema.hpp"

using namespace lsq;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Config;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "levelset_test_io";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const auto p = scratch(name);
  std::ofstream(p) << text;
  return p;
}

std::vector<Point> some_points(std::size_t n) {
  std::vector<Point> pts;
  CounterRng rng(31, 0);
  for (std::size_t i = 0; i < n; ++i) pts.push_back({-2.0 + 4.0 * rng.uniform01(), -2.0 + 4.0 * rng.uniform01()});
  return pts;
}

}  // namespace

TEST_CASE("schema registry") {
  const auto names = schema::names();
  for (const char* n : {"gaussian-demo", "probe", "audit", "train", "density-spec", "dataset-row", "interval-record",
                        "audit-record", "audit-report", "checkpoint", "conjecture-report"}) {
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  }
  CHECK(code_of([] { schema::get("nope"); }) == ErrorCode::Config);
}

TEST_CASE("config validation") {
  CHECK(schema::validate(json::object(), schema::get("gaussian-demo")).empty());
  const json audit = {{"sets", {{{"name", "a"}, {"file", "a.jsonl"}}}}, {"chi", {0.2, 0.8}}};
  CHECK(schema::validate(audit, schema::get("audit")).empty());

  json unknown = audit;
  unknown["colour"] = "red";
  const auto errs = schema::validate(unknown, schema::get("audit"));
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].find("colour") != std::string::npos);
  CHECK(code_of([&] { schema::require_valid(unknown, "audit"); }) == ErrorCode::Config);
  CHECK(code_of([&] { schema::require_valid(unknown, "audit", ErrorCode::Data); }) == ErrorCode::Data);

  json missing = audit;
  missing.erase("chi");
  CHECK_FALSE(schema::validate(missing, schema::get("audit")).empty());
  json wrong_type = audit;
  wrong_type["tol"] = "small";
  CHECK_FALSE(schema::validate(wrong_type, schema::get("audit")).empty());
  json bad_tol = audit;
  bad_tol["tol"] = 0.0;
  CHECK_FALSE(schema::validate(bad_tol, schema::get("audit")).empty());

  // oneOf over classifier kinds.
  json probe = {{"classifier", {{"kind", "oracle"}, {"densities", {{"builtin", "gaussian_three_class"}}}}},
                {"points", {{"inline", {{0.0, 0.0}}}}}};
  CHECK(schema::validate(probe, schema::get("probe")).empty());
  probe["classifier"]["kind"] = "magic";
  CHECK_FALSE(schema::validate(probe, schema::get("probe")).empty());
  json ext = json::parse(R"({"classifier": {"kind": "external", "command": ["./clf"], "num_classes": 3},
                              "points": {"random": {"n": 5, "lo": [0.0], "hi": [1.0], "seed": 1}}})");
  CHECK(schema::validate(ext, schema::get("probe")).empty());
  ext["refine_iters"] = 100;
  CHECK_FALSE(schema::validate(ext, schema::get("probe")).empty());

  const json train = {{"dataset", "d.csv"}, {"objective", "homotopy"}, {"schedule", {{"sigmas", {4, 2, 1}}}}};
  CHECK(schema::validate(train, schema::get("train")).empty());
  json bad_obj = train;
  bad_obj["objective"] = "hinge";
  CHECK_FALSE(schema::validate(bad_obj, schema::get("train")).empty());
}

TEST_CASE("extended ratio encoding") {
  for (const auto& v : {ExtendedRatio::zero(), ExtendedRatio::infinite(), ExtendedRatio::indeterminate(),
                        ExtendedRatio::finite(0.1), ExtendedRatio::finite(3.0)}) {
    CHECK(io::ratio_from_json(json::parse(io::ratio_to_json(v).dump())) == v);
  }
  CHECK(io::ratio_to_json(ExtendedRatio::infinite()) == "inf");
  CHECK(io::ratio_to_json(ExtendedRatio::indeterminate()).is_null());
  CHECK(io::bound_from_json(io::bound_to_json(kInf)) == kInf);
  CHECK(io::bound_from_json(io::bound_to_json(0.25)) == 0.25);
  CHECK(code_of([] { io::ratio_from_json("lots"); }) == ErrorCode::Data);
}

TEST_CASE("density specifications") {
  const auto builtin = io::densities_from_json({{"builtin", "gaussian_three_class"}});
  const auto ref = gaussian_three_class_example();
  const double r[] = {0.2, -0.3};
  for (std::size_t j = 0; j < 3; ++j) CHECK(builtin[j]->pdf(r) == ref[j]->pdf(r));

  const json spec = {{"classes",
                      {{{"kind", "gaussian"}, {"mean", {0.0}}, {"cov", {{1.0}}}},
                       {{"kind", "piecewise"}, {"cells", {{{"lo", {0.0}}, {"hi", {2.0}}}}}, {"values", {0.5}}}}}};
  CHECK(schema::validate(spec, schema::get("density-spec")).empty());
  const auto d = io::densities_from_json(spec);
  const double x[] = {1.0};
  CHECK(d[1]->pdf(x) == 0.5);
  CHECK(code_of([] { io::densities_from_json({{"builtin", "moons"}}); }) == ErrorCode::Config);
  const json bad_cov = {{"classes", {{{"kind", "gaussian"}, {"mean", {0.0, 0.0}}, {"cov", {{1.0, 2.0}, {2.0, 1.0}}}}}}};
  CHECK(code_of([&] { io::densities_from_json(bad_cov); }) == ErrorCode::Config);
}

TEST_CASE("interval records round-trip into identical audits") {
  const auto dens = gaussian_three_class_example();
  const OracleClassifier oracle(dens);
  const auto pts = some_points(60);
  const auto probes = serial::probe_points(oracle, pts, PrevalenceGrid::standard(), 5);
  const auto chi = SimplexVector::make({0.25, 0.35, 0.4});

  std::ostringstream lines;
  std::vector<RatioIntervalMatrix> direct;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const json rec = io::interval_record(pts[i], probes[i], i % 3);
    CHECK(schema::validate(rec, schema::get("interval-record")).empty());
    lines << rec.dump() << "\n";
    direct.push_back(probes[i].matrix);
  }
  const auto path = write_file("round.jsonl", lines.str());
  std::vector<io::IntervalRecord> back;
  std::vector<RatioIntervalMatrix> reread;
  for (const auto& j : io::read_json_lines(path)) {
    back.push_back(io::interval_record_from_json(j));
    reread.push_back(back.back().matrix);
  }
  REQUIRE(back.size() == pts.size());
  const auto a = serial::audit_points(direct, chi);
  const auto b = serial::audit_points(reread, chi);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(back[i].r == pts[i]);
    CHECK(*back[i].label == i % 3);
    CHECK(a[i].feasible == b[i].feasible);
    CHECK(a[i].summary_u == b[i].summary_u);
    CHECK(a[i].u_interval == b[i].u_interval);
    CHECK(a[i].witness_label == b[i].witness_label);
    const json ar = io::audit_record(back[i], b[i]);
    CHECK(schema::validate(ar, schema::get("audit-record")).empty());
    CHECK(ar["label"] == b[i].witness_label + 1);
  }

  // Infeasible records keep the schema.
  RatioIntervalMatrix bad(3);
  bad.set_pair(0, 1, {2.0, 3.0});
  bad.set_pair(1, 2, {2.0, 3.0});
  bad.set_pair(0, 2, {1.0, 2.0});
  const io::IntervalRecord rec{{0.0, 0.0}, std::nullopt, bad};
  const json ar = io::audit_record(rec, feasible_set(bad, chi));
  CHECK(schema::validate(ar, schema::get("audit-record")).empty());
  CHECK(ar["feasible"] == false);
  CHECK(ar["witness"].is_null());
}

TEST_CASE("malformed interval records") {
  CHECK(code_of([] { io::interval_record_from_json({{"r", {0.0}}}); }) == ErrorCode::Data);
  CHECK(code_of([] { io::interval_record_from_json({{"r", {0.0}}, {"intervals", {{{1, 1}, {0, 2}}, {{0.5, "inf"}}}}}); }) ==
        ErrorCode::Data);
  CHECK(code_of([] { io::interval_record_from_json({{"r", {0.0}}, {"intervals", {{{1, 1}, {3, 2}}, {{0.5, "inf"}, {1, 1}}}}}); }) ==
        ErrorCode::Data);
  const auto bad_lines = write_file("bad.jsonl", "{\"r\": [0]}\nnot json\n");
  CHECK(code_of([&] { io::read_json_lines(bad_lines); }) == ErrorCode::Data);
  const auto empty = write_file("empty.jsonl", "");
  CHECK(io::read_json_lines(empty).empty());
}

TEST_CASE("checkpoints") {
  std::vector<std::vector<Point>> cls(2);
  for (int i = 0; i < 50; ++i) {
    cls[0].push_back({0.02 * i});
    cls[1].push_back({1.0 + 0.02 * i});
  }
  const auto data = TrainingDataset::make(cls);
  HomotopySchedule sched;
  sched.epochs = 2;
  const auto grid = PrevalenceGrid::make({0.25, 0.5, 0.75});
  const auto fam = train_pairwise_family(data, 0, 1, grid, sched, {1, 3, 2}, 9);
  const json j = io::family_to_json(fam, sched);
  CHECK(schema::validate(j, schema::get("checkpoint")).empty());
  CHECK(j["pair"] == json::array({1, 2}));

  const auto back = io::family_from_json(json::parse(j.dump()));
  REQUIRE(back.models.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(back.models[i] == fam.models[i]);
  CHECK(back.grid.values() == fam.grid.values());
  CHECK(back.sigma_history == fam.sigma_history);

  // Byte-identical across runs with the same seed.
  const auto again = train_pairwise_family(data, 0, 1, grid, sched, {1, 3, 2}, 9);
  CHECK(io::family_to_json(again, sched).dump(2) == j.dump(2));
}

TEST_CASE("csv ingestion") {
  const auto with_header = write_file("h.csv", "x,y,label\n0.5,1.0,1\n-0.5,2.0,2\n");
  const auto t = io::read_csv(with_header);
  CHECK(t.header == std::vector<std::string>{"x", "y", "label"});
  REQUIRE(t.rows.size() == 2);
  std::size_t k = 0;
  const auto s = io::samples_from_csv(t, k);
  CHECK(k == 2);
  CHECK(s[1].label == 1);
  CHECK(s[1].point == Point{-0.5, 2.0});

  const auto plain = write_file("p.csv", "0.5,1\n1.5,1\n");
  CHECK(io::read_csv(plain).header.empty());
  std::size_t three = 3;
  io::samples_from_csv(io::read_csv(plain), three);
  CHECK(three == 3);

  CHECK(code_of([] { io::read_csv(write_file("ragged.csv", "1,2,1\n3,1\n")); }) == ErrorCode::Data);
  CHECK(code_of([] { io::read_csv(write_file("text.csv", "a,b\n1,x\n")); }) == ErrorCode::Data);
  CHECK(code_of([] {
          std::size_t n = 0;
          io::samples_from_csv(io::read_csv(write_file("zero.csv", "1.0,0\n")), n);
        }) == ErrorCode::Data);
  CHECK(code_of([] {
          std::size_t n = 2;
          io::samples_from_csv(io::read_csv(write_file("big.csv", "1.0,3\n")), n);
        }) == ErrorCode::Data);
  CHECK(code_of([] { io::read_csv(scratch("missing.csv")); }) == ErrorCode::Data);
  CHECK(code_of([] { io::read_json_file(scratch("missing.json")); }) == ErrorCode::Config);
  CHECK(code_of([] { io::read_json_file(write_file("broken.json", "{\"a\": ")); }) == ErrorCode::Config);
}

TEST_CASE("z bins and the audit roll-up") {
  const auto edges = cli::default_bin_edges();
  CHECK(edges == std::vector<double>{0.5, 0.6, 0.7, 0.8, 0.9, 0.98});
  CHECK(cli::z_bin(0.5, edges) == 0);
  CHECK(cli::z_bin(0.599, edges) == 0);
  CHECK(cli::z_bin(0.6, edges) == 1);
  CHECK(cli::z_bin(0.979, edges) == 4);
  CHECK(cli::z_bin(0.98, edges) == 5);
  CHECK(cli::z_bin(1.0, edges) == 5);
  CHECK(cli::z_bin(0.4, edges) == 5);

  const auto dens = gaussian_three_class_example();
  const OracleClassifier oracle(dens);
  const auto pts = some_points(200);
  const auto probes = serial::probe_points(oracle, pts, PrevalenceGrid::standard());
  std::vector<io::IntervalRecord> recs;
  std::vector<RatioIntervalMatrix> mats;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    recs.push_back({pts[i], multiclass_bayes_classify(dens, SimplexVector::uniform(3), pts[i], TieRule::lowest_index()).label,
                    probes[i].matrix});
    mats.push_back(probes[i].matrix);
  }
  // One inconsistent point.
  RatioIntervalMatrix bad(3);
  bad.set_pair(0, 1, {2.0, 3.0});
  bad.set_pair(1, 2, {2.0, 3.0});
  bad.set_pair(0, 2, {1.0, 2.0});
  recs.push_back({{0.0, 0.0}, std::nullopt, bad});
  mats.push_back(bad);

  const auto sets = serial::audit_points(mats, SimplexVector::uniform(3));
  const json roll = cli::audit_rollup("train", recs, sets, edges);
  CHECK(roll["points"] == 201);
  CHECK(roll["inconsistent"] == 1);
  CHECK(roll["consistent"] == 200);
  CHECK(roll["labelled"] == 200);
  std::size_t total = 0;
  for (const auto& b : roll["bins"]) {
    total += b["count"].get<std::size_t>();
    CHECK(b["straddle"].get<std::size_t>() <= b["count"].get<std::size_t>());
  }
  CHECK(total == 200);
  CHECK(roll["bins"].back()["range"] == "remainder");
  const json report = {{"chi", {1.0 / 3, 1.0 / 3, 1.0 / 3}}, {"bin_edges", edges}, {"sets", {roll}}};
  CHECK(schema::validate(report, schema::get("audit-report")).empty());
}
