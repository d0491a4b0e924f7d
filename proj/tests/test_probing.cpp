#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "levelset/bayes.hpp"
#include "levelset/error.hpp"
#include "levelset/probing.hpp"

using namespace lsq;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

DensityPtr gauss1(double m) { return std::make_shared<GaussianDensity>(GaussianParams::make({m}, {{1.0}})); }

// N(0,1) vs N(1,1): q_{1,2}(r) = P_2 / (P_1 + P_2) = 1 / (1 + exp(0.5 - r)).
double analytic_q(double r) { return 1.0 / (1.0 + std::exp(0.5 - r)); }

class ConstantClassifier final : public MonotoneClassifier {
 public:
  ConstantClassifier(std::size_t k, std::size_t label) : k_(k), label_(label) {}
  std::size_t num_classes() const override { return k_; }
  std::size_t classify(PointView, const SimplexVector&) const override { return label_; }

 private:
  std::size_t k_, label_;
};

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Config;
}

}  // namespace

TEST_CASE("prevalence grid") {
  const auto g = PrevalenceGrid::standard();
  CHECK(g.size() == 99);
  CHECK(g.front() == doctest::Approx(0.01));
  CHECK(g.back() == doctest::Approx(0.99));
  CHECK(code_of([] { PrevalenceGrid::make({0.2, 0.1}); }) == ErrorCode::Config);
  CHECK(code_of([] { PrevalenceGrid::make({0.0, 0.5}); }) == ErrorCode::Config);
  CHECK(code_of([] { PrevalenceGrid::make({0.5, 1.0}); }) == ErrorCode::Config);
}

TEST_CASE("pairwise embedding") {
  const auto q = embed_pairwise(0.25, 0, 2, 3);
  CHECK(q[0] == 0.25);
  CHECK(q[1] == 0.0);
  CHECK(q[2] == 0.75);
  const auto b = embed_pairwise(0.4, 0, 1, 2);
  CHECK(b[0] == 0.4);
  CHECK(b[1] == doctest::Approx(0.6));
  CHECK(code_of([] { embed_pairwise(0.5, 1, 1, 3); }) == ErrorCode::BadPair);
  CHECK(code_of([] { embed_pairwise(0.5, 0, 3, 3); }) == ErrorCode::BadPair);
}

TEST_CASE("brackets from label sequences") {
  const auto grid = PrevalenceGrid::make({0.1, 0.3, 0.5, 0.7, 0.9});
  // k = 1, j = 0. Monotone: k, k, j, j, j.
  std::vector<std::size_t> mono{1, 1, 0, 0, 0};
  auto b = bracket_from_labels(mono, grid, 0, 1);
  CHECK(b.regime == SwitchRegime::InteriorSwitch);
  CHECK(b.q_low == 0.3);
  CHECK(b.q_high == 0.5);
  CHECK(b.monotone());

  std::vector<std::size_t> nonmono{1, 1, 0, 1, 0};
  b = bracket_from_labels(nonmono, grid, 0, 1);
  CHECK_FALSE(b.monotone());
  CHECK(b.q_low == 0.3);   // first switch
  CHECK(b.q_high == 0.9);  // last switch

  std::vector<std::size_t> allj(5, 0), allk(5, 1);
  CHECK(bracket_from_labels(allj, grid, 0, 1).regime == SwitchRegime::AlwaysJ);
  CHECK(bracket_from_labels(allk, grid, 0, 1).regime == SwitchRegime::AlwaysK);

  // Wrong-direction switch is a violation.
  std::vector<std::size_t> reversed{0, 0, 1, 1, 1};
  CHECK_FALSE(bracket_from_labels(reversed, grid, 0, 1).monotone());

  // Foreign labels are counted and skipped.
  std::vector<std::size_t> foreign{1, 2, 0, 0, 0};
  b = bracket_from_labels(foreign, grid, 0, 1);
  CHECK(b.foreign_labels == 1);
  CHECK(b.monotone());
}

TEST_CASE("probe pair on the 1-D oracle") {
  const OracleClassifier clf({gauss1(0.0), gauss1(1.0)});
  const auto grid = PrevalenceGrid::standard();
  const double mid[] = {0.5};
  const auto b = probe_pair(clf, mid, 0, 1, grid);
  CHECK(b.regime == SwitchRegime::InteriorSwitch);
  CHECK(b.q_low <= 0.5);
  CHECK(b.q_high >= 0.5);
  CHECK(b.width() <= 0.01 + 1e-12);
  CHECK(b.monotone());

  const ConstantClassifier cj(2, 0);
  CHECK(probe_pair(cj, mid, 0, 1, grid).regime == SwitchRegime::AlwaysJ);
}

TEST_CASE("bisection recovers the analytic prevalence function") {
  const OracleClassifier clf({gauss1(0.0), gauss1(1.0)});
  const auto grid = PrevalenceGrid::standard();
  for (int i = 0; i < 50; ++i) {
    const double r[] = {-1.0 + 3.0 * i / 49.0};
    const auto b = probe_pair(clf, r, 0, 1, grid);
    REQUIRE(b.regime == SwitchRegime::InteriorSwitch);
    const auto refined = refine_bracket(clf, r, b, 30);
    CHECK(refined.width() <= b.width() * std::ldexp(1.0, -30) * (1 + 1e-4));
    const double midpoint = 0.5 * (refined.q_low + refined.q_high);
    CHECK(std::abs(midpoint - analytic_q(r[0])) <= 1e-8);
    CHECK(refined.q_low <= analytic_q(r[0]) + 1e-15);
    CHECK(refined.q_high >= analytic_q(r[0]) - 1e-15);
  }
  const double r[] = {0.2};
  const auto b = probe_pair(clf, r, 0, 1, grid);
  const auto same = refine_bracket(clf, r, b, 0);
  CHECK(same.q_low == b.q_low);
  CHECK(same.q_high == b.q_high);

  const auto bad = bracket_from_labels(std::vector<std::size_t>{1, 0, 1, 0}, PrevalenceGrid::make({0.2, 0.4, 0.6, 0.8}), 0, 1);
  CHECK(code_of([&] { refine_bracket(clf, r, bad, 5); }) == ErrorCode::NotRefinable);
}

TEST_CASE("ratio intervals") {
  CHECK(prevalence_to_ratio(0.5) == 1.0);
  CHECK(prevalence_to_ratio(1.0) == kInf);
  CHECK(prevalence_to_ratio(0.0) == 0.0);
  const RatioInterval iv{0.0, 2.0};
  CHECK(iv.reciprocal() == RatioInterval{0.5, kInf});
  CHECK(RatioInterval{2.0, kInf}.reciprocal() == RatioInterval{0.0, 0.5});

  const auto grid = PrevalenceGrid::standard();
  SwitchBracket k;
  k.regime = SwitchRegime::AlwaysK;
  const auto ik = interval_from_bracket(k, grid);
  CHECK(ik.lo == doctest::Approx(99.0));
  CHECK(ik.hi == kInf);
  SwitchBracket j;
  j.regime = SwitchRegime::AlwaysJ;
  const auto ij = interval_from_bracket(j, grid);
  CHECK(ij.lo == 0.0);
  CHECK(ij.hi == doctest::Approx(1.0 / 99.0));
}

TEST_CASE("probe all pairs: containment and reciprocity") {
  const auto dens = gaussian_three_class_example();
  const OracleClassifier clf(dens);
  const auto grid = PrevalenceGrid::standard();
  CounterRng rng(17, 0);
  for (int n = 0; n < 100; ++n) {
    const double r[] = {-2.0 + 4.0 * rng.uniform01(), -2.0 + 4.0 * rng.uniform01()};
    const auto m = probe_all_pairs(clf, r, grid);
    CHECK(m.total_violations() == 0);
    for (std::size_t a = 0; a < 3; ++a) {
      CHECK(m(a, a) == RatioInterval{1.0, 1.0});
      for (std::size_t b = 0; b < 3; ++b) {
        if (a == b) continue;
        const double exact = dens[b]->pdf(r) / dens[a]->pdf(r);
        CHECK(m(a, b).contains(exact, 1e-12));
        if (a < b) CHECK(m(b, a) == m(a, b).reciprocal());  // stored from the (a, b) bracket
      }
    }
  }

  // Equal densities: every interval contains 1.
  const OracleClassifier same({gauss1(0.0), gauss1(0.0), gauss1(0.0)});
  const double x[] = {0.7};
  const auto m = probe_all_pairs(same, x, grid);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) CHECK(m(a, b).contains(1.0));
  }

  // P_1 = 0 < P_2: one-sided interval for R_{1,2}.
  const auto zero = std::make_shared<CallbackDensity>(1, [](PointView) { return 0.0; });
  const OracleClassifier one_sided({zero, gauss1(0.0)});
  const auto m2 = probe_all_pairs(one_sided, x, grid);
  CHECK(m2(0, 1).lo == doctest::Approx(99.0));
  CHECK(m2(0, 1).hi == kInf);
}

TEST_CASE("probe point with refinement keeps containment") {
  const auto dens = gaussian_three_class_example();
  const OracleClassifier clf(dens);
  const double r[] = {0.1, 0.1};
  const auto p = probe_point(clf, r, PrevalenceGrid::standard(), 20);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      if (a == b) continue;
      CHECK(p.matrix(a, b).contains(dens[b]->pdf(r) / dens[a]->pdf(r), 1e-12));
    }
  }
  CHECK(p.brackets.size() == 3);
}
