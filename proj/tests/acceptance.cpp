// Acceptance run: one PASS/FAIL line per criterion, with the measured numbers.
// Exit status is 0 when every criterion passes except those listed in
// kKnownRed, which stay red and are reported as such.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "levelset/cli.hpp"
#include "levelset/error.hpp"
#include "levelset/io.hpp"
#include "levelset/kernels.hpp"
#include "levelset/multiclass.hpp"
#include "levelset/rng.hpp"
#include "levelset/schema.hpp"
#include "levelset/training.hpp"

using namespace lsq;
namespace fs = std::filesystem;

namespace {

// Criteria that are known not to hold with the faithful training procedure.
const std::set<int> kKnownRed{11};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kQ = std::numeric_limits<double>::quiet_NaN();

DensityPtr gauss1(double m) { return std::make_shared<GaussianDensity>(GaussianParams::make({m}, {{1.0}})); }

DensityPtr uniform1(double lo, double hi) {
  return std::make_shared<PiecewiseConstantDensity>(std::vector<Box>{Box{{lo}, {hi}}}, std::vector<double>{1.0 / (hi - lo)});
}

SimplexVector exp_chi(CounterRng& rng, std::size_t k) {
  std::vector<double> w(k);
  for (auto& x : w) x = -std::log(1.0 - rng.uniform01()) + 1e-3;
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= s;
  return SimplexVector::make(w);
}

std::vector<Point> square_points(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({-2.0 + 4.0 * rng.uniform01(), -2.0 + 4.0 * rng.uniform01()});
  return pts;
}

std::vector<Point> lattice_points(std::size_t side) {
  std::vector<Point> pts;
  for (std::size_t iy = 0; iy < side; ++iy) {
    for (std::size_t ix = 0; ix < side; ++ix) {
      pts.push_back({-2.0 + 4.0 * static_cast<double>(ix) / static_cast<double>(side - 1),
                     -2.0 + 4.0 * static_cast<double>(iy) / static_cast<double>(side - 1)});
    }
  }
  return pts;
}

std::vector<SimplexVector> ten_chis() {
  CounterRng rng(303, 0);
  std::vector<SimplexVector> out;
  for (int i = 0; i < 10; ++i) out.push_back(exp_chi(rng, 3));
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

Outcome c1_probing_soundness() {
  const auto dens = gaussian_three_class_example();
  const OracleClassifier oracle(dens);
  const auto pts = square_points(200, 101);
  const auto t0 = std::chrono::steady_clock::now();
  const auto probes = probe_points(oracle, pts, PrevalenceGrid::uniform(0.01), 0, Execution::Serial);
  const double secs = seconds_since(t0);
  std::size_t misses = 0, violations = 0, checked = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    violations += probes[i].matrix.total_violations();
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t k = 0; k < 3; ++k) {
        if (j == k) continue;
        ++checked;
        if (!probes[i].matrix(j, k).contains(density_ratio(dens, j, k, pts[i]).value(), 1e-12)) ++misses;
      }
    }
  }
  return {misses == 0 && violations == 0 && secs <= 30.0,
          fmt("%zu/%zu intervals miss the exact ratio, %zu violations, %.2f s serial", misses, checked, violations, secs)};
}

Outcome c2_bisection() {
  const OracleClassifier clf({gauss1(0.0), gauss1(1.0)});
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double r[] = {-1.0 + 3.0 * i / 49.0};
    const auto b = refine_bracket(clf, r, probe_pair(clf, r, 0, 1, PrevalenceGrid::standard()), 30);
    const double analytic = 1.0 / (1.0 + std::exp(0.5 - r[0]));
    worst = std::max(worst, std::abs(0.5 * (b.q_low + b.q_high) - analytic));
  }
  return {worst <= 1e-8, fmt("max |midpoint - q| = %.2e over 50 points", worst)};
}

Outcome c3_equivalence() {
  const auto dens = gaussian_three_class_example();
  const ExactPrevalenceTable table(dens);
  const auto pts = lattice_points(100);
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t true_mm = 0, tie_flagged = 0, tie_mm = 0;
  for (const auto& chi : ten_chis()) {
    const auto rep = equivalence_audit(table, dens, chi, pts);
    true_mm += rep.true_mismatches;
    tie_flagged += rep.tie_flagged;
    tie_mm += rep.tie_mismatches;
  }
  const double secs = seconds_since(t0);
  return {true_mm == 0 && secs <= 60.0,
          fmt("%zu true mismatches over 10 chi x %zu points (%zu tie-flagged, %zu tie mismatches), %.2f s", true_mm,
              pts.size(), tie_flagged, tie_mm, secs)};
}

DensityList disjoint_problem() {
  return {uniform1(0.0, 2.0),
          std::make_shared<PiecewiseConstantDensity>(std::vector<Box>{Box{{1.0}, {2.0}}, Box{{2.0}, {3.0}}},
                                                     std::vector<double>{0.8, 0.2}),
          uniform1(2.5, 4.0)};
}

Outcome c4_disjoint_supports() {
  const auto dens = disjoint_problem();
  const ExactPrevalenceTable table(dens);
  // Class 2 has no mass on [0, 1).
  std::size_t chis = 0, bad = 0;
  for (int a = 1; a < 20; ++a) {
    for (int b = 1; a + b < 20; ++b) {
      const auto chi = SimplexVector::make({0.05 * a, 0.05 * b, 1.0 - 0.05 * (a + b)});
      ++chis;
      for (int i = 0; i < 50; ++i) {
        const double r[] = {(i + 0.5) / 50.0};
        if (construct_label(table, chi, r).label == 1) ++bad;
      }
    }
  }

  CounterRng rng(404, 0);
  std::size_t changed = 0, compared = 0;
  for (int t = 0; t < 100; ++t) {
    double ext[3][3];
    for (auto& row : ext) {
      for (auto& v : row) v = rng.uniform01();
    }
    const ExactPrevalenceTable alt(dens, [ext](std::size_t j, std::size_t k, PointView) { return ext[j][k]; });
    const auto chi = exp_chi(rng, 3);
    for (int i = 0; i < 200; ++i) {
      const double r[] = {-0.5 + 5.0 * (i + 0.5) / 200.0};
      bool supported = false;
      for (const auto& d : dens) supported = supported || d->pdf(r) > 0.0;
      if (!supported) continue;
      ++compared;
      if (construct_label(table, chi, r).label != construct_label(alt, chi, r).label) ++changed;
    }
  }
  return {bad == 0 && changed == 0,
          fmt("class 2 output %zu times on [0,1) over %zu chi; %zu/%zu labels changed by extension perturbations", bad,
              chis, changed, compared)};
}

Outcome c5_total_probability() {
  const auto dens = gaussian_three_class_example();
  const ExactPrevalenceTable table(dens);
  auto pts = square_points(200, 101);
  const auto grid = lattice_points(100);
  pts.insert(pts.end(), grid.begin(), grid.end());
  auto chis = ten_chis();
  chis.push_back(SimplexVector::uniform(3));
  double worst = 0.0;
  for (const auto& chi : chis) {
    for (const auto& p : pts) {
      const auto s = score_vector(table, chi, p);
      worst = std::max(worst, std::abs(std::accumulate(s.begin(), s.end(), 0.0) - 1.0));
    }
  }
  const double eps = 0.01;
  const auto triple = ratio_matrix_from_values({{1.0, eps, 1.0}, {1.0 / eps, 1.0, eps}, {1.0, 1.0 / eps, 1.0}});
  const double residual = total_probability_check(triple, SimplexVector::uniform(3));
  return {worst <= 1e-10 && residual > 0.1,
          fmt("max |sum of scores - 1| = %.2e over %zu points x %zu chi; (eps,eps,1) residual %.4f", worst, pts.size(),
              chis.size(), residual)};
}

Outcome c6_standard_form() {
  const double a = 2.0, b = 3.0, c = 0.5;
  struct Ex {
    RatioMatrix m;
    std::vector<std::size_t> av, bv;
  };
  const std::vector<Ex> examples{
      {ratio_matrix_from_values({{1, 1.5, 0.75}, {1 / 1.5, 1, 0.5}, {1 / 0.75, 2, 1}}), {}, {0, 1, 2}},
      {ratio_matrix_from_values({{1, kInf, kInf}, {0, 1, a}, {0, 1 / a, 1}}), {0}, {1, 2}},
      {ratio_matrix_from_values({{1, kQ, kInf}, {kQ, 1, kInf}, {0, 0, 1}}), {0, 1}, {2}},
      {ratio_matrix_from_values({{1, kInf, kInf, kInf}, {0, 1, a, b}, {0, 1 / a, 1, b / a}, {0, 1 / b, a / b, 1}}),
       {0},
       {1, 2, 3}},
      {ratio_matrix_from_values({{1, kQ, kInf, kInf}, {kQ, 1, kInf, kInf}, {0, 0, 1, c}, {0, 0, 1 / c, 1}}),
       {0, 1},
       {2, 3}},
      {ratio_matrix_from_values({{1, kQ, kQ, kInf}, {kQ, 1, kQ, kInf}, {kQ, kQ, 1, kInf}, {0, 0, 0, 1}}),
       {0, 1, 2},
       {3}},
  };
  std::size_t ok = 0;
  for (const auto& ex : examples) {
    const auto sf = standard_form(ex.m, 1e-12);
    if (!sf) continue;
    auto av = sf->a_block, bv = sf->b_block;
    std::sort(av.begin(), av.end());
    std::sort(bv.begin(), bv.end());
    if (av == ex.av && bv == ex.bv && is_standard_form(permute(ex.m, sf->permutation), av.size(), 1e-12)) ++ok;
  }
  const auto broken = ratio_matrix_from_values({{1, kInf, 1}, {kInf, 1, 1}, {1, 1, 1}});
  const bool rejected = !standard_form(broken, 1e-9).has_value();
  return {ok == examples.size() && rejected,
          fmt("%zu/%zu examples with the expected (A,B) split; reciprocal violation %s", ok, examples.size(),
              rejected ? "rejected" : "accepted")};
}

Outcome c7_feasibility() {
  const auto chi = SimplexVector::uniform(3);
  RatioIntervalMatrix in_box(3);
  in_box.set_pair(0, 1, {0.5, 2.0});
  in_box.set_pair(1, 2, {0.5, 2.0});
  in_box.set_pair(0, 2, {1.0, 1.0});
  RatioIntervalMatrix out_box(3);
  out_box.set_pair(0, 1, {2.0, 3.0});
  out_box.set_pair(1, 2, {2.0, 3.0});
  out_box.set_pair(0, 2, {1.0, 2.0});
  const bool accept = feasible_set(in_box, chi).feasible;
  const bool reject = !feasible_set(out_box, chi).feasible;

  CounterRng rng(707, 0);
  std::size_t agree = 0, total = 0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> p(3);
    for (auto& x : p) x = 0.05 + rng.uniform01();
    std::vector<std::vector<double>> v(3, std::vector<double>(3));
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t m = 0; m < 3; ++m) v[j][m] = p[m] / p[j];
    }
    for (int perturbed = 0; perturbed < 2; ++perturbed) {
      if (perturbed) {
        const std::size_t a = rng.below(3), b = (a + 1 + rng.below(2)) % 3;
        const double f = 1.01 + 0.5 * rng.uniform01();
        v[a][b] *= f;
        v[b][a] /= f;
      }
      RatioIntervalMatrix exact(3);
      for (std::size_t j = 0; j < 3; ++j) {
        for (std::size_t m = 0; m < 3; ++m) exact(j, m) = RatioInterval{v[j][m], v[j][m]};
      }
      const bool feasible = feasible_set(exact, chi).feasible;
      const bool identity = ratio_identity_check(ratio_matrix_from_values(v), 1e-9).passed;
      ++total;
      if (feasible == identity && feasible == !perturbed) ++agree;
    }
  }
  return {accept && reject && agree == total,
          fmt("[0.5,2]^2 box %s, [2,3]^2 box %s; zero-width agreement %zu/%zu", accept ? "accepted" : "rejected",
              reject ? "rejected" : "accepted", agree, total)};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

Outcome c8_reconstruction() {
  // N(0,1) and N(1,1) truncated to [-4, 4].
  const double z1 = normal_cdf(4.0) - normal_cdf(-4.0);
  const double z2 = normal_cdf(3.0) - normal_cdf(-5.0);
  const auto ratio = [&](PointView r) { return z1 / z2 * std::exp(r[0] - 0.5); };
  const TensorGrid grid({-4.0}, {4.0}, {1000});
  const auto rec = reconstruct_binary_densities(ratio, grid);
  const double m1 = rec.p1->total_mass(), m2 = rec.p2->total_mass();

  double sup = 0.0;
  std::size_t mismatches = 0, ties = 0;
  Point c;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.center_into(i, c);
    const double rc = ratio(c);
    sup = std::max(sup, std::abs(rec.p2->pdf(c) / rec.p1->pdf(c) - rc));
    for (int t = 1; t < 100; ++t) {
      const double q = 0.01 * t;
      const double lhs = (1.0 - q) * rc;
      if (std::abs(lhs - q) <= 1e-12 * q) {
        ++ties;
        continue;
      }
      const std::size_t by_ratio = lhs > q ? 1 : 0;
      const auto d = binary_bayes_classify(*rec.p1, *rec.p2, SimplexVector::make({q, 1.0 - q}), c,
                                           TieRule::lowest_index());
      if (d.label != by_ratio) ++mismatches;
    }
  }
  return {std::abs(m1 - 1.0) <= 1e-6 && std::abs(m2 - 1.0) <= 1e-6 && sup <= 1e-6 && mismatches == 0,
          fmt("masses %.12f, %.12f; ratio sup error %.2e; %zu classifier mismatches (%zu exact ties skipped)", m1, m2, sup,
              mismatches, ties)};
}

Outcome c9_homotopy_limit() {
  CounterRng rng(909, 0);
  std::size_t tested = 0, failed = 0;
  double worst = 0.0;
  while (tested < 500) {
    std::vector<double> y(2 + rng.below(4));
    for (auto& v : y) v = rng.uniform01();
    const double s = std::accumulate(y.begin(), y.end(), 0.0);
    for (auto& v : y) v /= s;
    const std::size_t k = rng.below(y.size());
    double other = 0.0;
    for (std::size_t m = 0; m < y.size(); ++m) {
      if (m != k) other = std::max(other, y[m]);
    }
    if (std::abs(y[k] - other) < 0.1) continue;
    ++tested;
    const double limit = 0.5 + 0.5 * (y[k] > other ? 0.0 : 1.0);
    double prev = kInf;
    bool monotone = true;
    for (double sigma : {1e-1, 1e-2, 1e-3}) {
      const double dist = std::abs(homotopy_sample_term(y, k, sigma) - limit);
      monotone = monotone && dist <= prev + 1e-15;
      prev = dist;
    }
    worst = std::max(worst, prev);
    if (!monotone || prev > 1e-3) ++failed;
  }
  return {failed == 0, fmt("%zu/%zu samples off the limit; max distance at sigma=1e-3 is %.2e", failed, tested, worst)};
}

Outcome c10_gradients() {
  CounterRng rng(1010, 0);
  double worst = 0.0;
  for (std::size_t hidden : {0u, 4u}) {
    for (int t = 0; t < 50; ++t) {
      const std::size_t k = 2 + rng.below(2), dim = 1 + rng.below(3);
      std::vector<std::vector<Point>> cls(k);
      for (std::size_t c = 0; c < k; ++c) {
        const std::size_t n = 1 + rng.below(4);
        for (std::size_t i = 0; i < n; ++i) {
          Point p(dim);
          for (auto& x : p) x = rng.normal() + 0.5 * static_cast<double>(c);
          cls[c].push_back(p);
        }
      }
      const auto data = TrainingDataset::make(cls);
      std::vector<double> w(k);
      for (auto& x : w) x = 0.05 + rng.uniform01();
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      for (auto& x : w) x /= total;
      const auto q = SimplexVector::make(w);
      const double sigma = 0.3 + 2.0 * rng.uniform01();
      const auto model = ScorerModel::random({dim, hidden, k}, 2000 + static_cast<std::uint64_t>(t));
      const auto g = loss_gradient(model, data, q, sigma, Execution::Serial);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        ScorerModel plus = model, minus = model;
        plus.parameters()[i] += 1e-5;
        minus.parameters()[i] -= 1e-5;
        const double fd = (homotopy_loss(plus, data, q, sigma, Execution::Serial) -
                           homotopy_loss(minus, data, q, sigma, Execution::Serial)) / 2e-5;
        num += (g[i] - fd) * (g[i] - fd);
        den += fd * fd;
      }
      worst = std::max(worst, std::sqrt(num) / std::max(std::sqrt(den), 1e-6));
    }
  }
  return {worst <= 1e-5, fmt("max relative error %.2e over 100 instances (linear and hidden-layer scorers)", worst)};
}

Outcome c11_class_switching() {
  std::vector<std::vector<Point>> per_class(2);
  CounterRng rng(7, 0);
  for (int i = 0; i < 5000; ++i) per_class[0].push_back({rng.normal()});
  for (int i = 0; i < 5000; ++i) per_class[1].push_back({1.0 + rng.normal()});
  const auto data = TrainingDataset::make(per_class);
  const auto t0 = std::chrono::steady_clock::now();
  auto fam = train_pairwise_family(data, 0, 1, PrevalenceGrid::standard(), HomotopySchedule{}, {1, 0, 2}, 42);
  const double secs = seconds_since(t0);
  const TrainedFamilyClassifier clf(2, {std::move(fam)});
  int hits = 0;
  double worst_gap = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double r[] = {-1.0 + 3.0 * i / 19.0};
    const auto b = probe_pair(clf, r, 0, 1, PrevalenceGrid::standard());
    const double q = 1.0 / (1.0 + std::exp(0.5 - r[0]));
    const double gap = std::max({0.0, b.q_low - q, q - b.q_high});
    worst_gap = std::max(worst_gap, gap);
    if (gap <= 0.02) ++hits;
  }
  return {hits >= 18 && secs <= 300.0,
          fmt("%d/20 probe brackets within 0.02 of the analytic value (need 18); worst gap %.3f; training %.1f s", hits,
              worst_gap, secs)};
}

Outcome c12_calibration() {
  const auto dens = gaussian_three_class_example();
  const auto chi = SimplexVector::uniform(3);
  const auto samples = sample_population(dens, chi, 12000, 1212);
  std::vector<Point> pts;
  for (const auto& s : samples) pts.push_back(s.point);
  const OracleClassifier oracle(dens);
  const auto probes = probe_points(oracle, pts, PrevalenceGrid::standard(), 0, Execution::Parallel);
  std::vector<io::IntervalRecord> records;
  std::vector<RatioIntervalMatrix> mats;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    records.push_back({pts[i], samples[i].label, probes[i].matrix});
    mats.push_back(probes[i].matrix);
  }
  const auto sets = audit_points(mats, chi, 1e-9, Execution::Parallel);
  const auto edges = cli::default_bin_edges();
  const auto rollup = cli::audit_rollup("synthetic", records, sets, edges);
  std::size_t qualified = 0, off = 0;
  std::string per_bin;
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    const auto& bin = rollup["bins"][b];
    if (bin["labelled"].get<std::size_t>() < 100) continue;
    ++qualified;
    const double acc = bin["accuracy"].get<double>();
    const double mid = 0.5 * (edges[b] + edges[b + 1]);
    if (std::abs(acc - mid) > 0.1) ++off;
    per_bin += fmt(" [%.2f,%.2f):%.3f/n=%zu", edges[b], edges[b + 1], acc, bin["labelled"].get<std::size_t>());
  }
  return {qualified > 0 && off == 0, fmt("%zu bins with >=100 points, %zu outside +-0.1;%s", qualified, off, per_bin.c_str())};
}

Outcome c13_conjecture() {
  const fs::path dir = fs::temp_directory_path() / "levelset_acceptance_c13";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "data.csv");
    csv << "x,label\n";
    CounterRng rng(1313, 0);
    for (int i = 0; i < 1000; ++i) csv << rng.normal() << ",1\n" << 1.0 + rng.normal() << ",2\n";
  }
  const auto config = nlohmann::json::parse(R"({
    "dataset": "data.csv",
    "seed": 13,
    "grid": {"step": 0.05},
    "conjecture": {
      "points": [[-0.5], [0.0], [0.5], [1.0], [1.5]],
      "densities": {"classes": [
        {"kind": "gaussian", "mean": [0.0], "cov": [[1.0]]},
        {"kind": "gaussian", "mean": [1.0], "cov": [[1.0]]}]}}
  })");
  cli::RunOptions opts;
  opts.base_dir = dir;
  opts.out_dir = dir / "out";
  cli::cmd_train(config, opts);
  std::ifstream in(opts.out_dir / "conjecture.json");
  const auto report = nlohmann::json::parse(in);
  const auto problems = schema::validate(report, schema::get("conjecture-report"));
  std::size_t points = 0, crossings = 0;
  double worst = 0.0;
  for (const auto& fam : report["families"]) {
    for (const auto& p : fam["points"]) {
      ++points;
      if (p["status"] == "crossing" && p.contains("discrepancy")) {
        ++crossings;
        worst = std::max(worst, p["discrepancy"].get<double>());
      }
    }
  }
  return {problems.empty() && points == 5 && crossings > 0,
          fmt("report %s the schema; %zu points, %zu crossings with discrepancy (max %.3f, reported only)",
              problems.empty() ? "matches" : "violates", points, crossings, worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"probing soundness", c1_probing_soundness},
      {"bisection accuracy", c2_bisection},
      {"construction equivalence", c3_equivalence},
      {"disjoint supports", c4_disjoint_supports},
      {"law of total probability", c5_total_probability},
      {"standard form", c6_standard_form},
      {"interval feasibility", c7_feasibility},
      {"binary reconstruction", c8_reconstruction},
      {"homotopy limit", c9_homotopy_limit},
      {"gradient correctness", c10_gradients},
      {"trained class switching", c11_class_switching},
      {"synthetic calibration", c12_calibration},
      {"conjecture pipeline", c13_conjecture},
  };
  int unexpected = 0, passed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const bool known = kKnownRed.count(id) > 0;
    std::printf("criterion %2d %s  %s: %s%s\n", id, out.pass ? "PASS" : "FAIL", criteria[i].first, out.detail.c_str(),
                !out.pass && known ? "  [known red]" : "");
    std::fflush(stdout);
    if (out.pass) ++passed;
    else if (!known) ++unexpected;
  }
  std::printf("%d/%zu criteria pass; %d unexpected failures\n", passed, criteria.size(), unexpected);
  return unexpected == 0 ? 0 : 1;
}
