#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "levelset/density.hpp"
#include "levelset/error.hpp"
#include "levelset/grid.hpp"

using namespace lsq;

namespace {

// Closed-form diagonal 2-D normal, written out independently of the library.
double diag_normal(double x, double y, double mx, double my, double vx, double vy) {
  const double dx = x - mx, dy = y - my;
  return std::exp(-0.5 * (dx * dx / vx + dy * dy / vy)) / (2.0 * std::numbers::pi * std::sqrt(vx * vy));
}

double normal1(double x, double m) { return std::exp(-0.5 * (x - m) * (x - m)) / std::sqrt(2.0 * std::numbers::pi); }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Config;
}

DensityPtr gauss1(double m) { return std::make_shared<GaussianDensity>(GaussianParams::make({m}, {{1.0}})); }

}  // namespace

TEST_CASE("simplex construction") {
  const auto s = SimplexVector::make({0.5, 0.5});
  CHECK(s[0] == 0.5);
  CHECK(s.interior());
  const auto u = SimplexVector::make({1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(u[0] + u[1] + u[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(code_of([] { SimplexVector::make({0.2, -0.1, 0.9}); }) == ErrorCode::NegativeWeight);
  CHECK(code_of([] { SimplexVector::make({0.2, 0.2}); }) == ErrorCode::BadSum);
  CHECK_FALSE(SimplexVector::vertex(3, 1).interior());
  // Tiny negative weights are clamped, not rejected.
  const auto c = SimplexVector::make({-1e-13, 1.0});
  CHECK(c[0] == 0.0);
  // Bit-reproducible.
  CHECK(SimplexVector::make({0.1, 0.7, 0.2}) == SimplexVector::make({0.1, 0.7, 0.2}));
}

TEST_CASE("gaussian pdf peak values") {
  const auto p1 = GaussianParams::make({0.0, 1.0}, {{0.49, 0.0}, {0.0, 0.09}});
  const double r1[] = {0.0, 1.0};
  CHECK(gaussian_pdf(p1, r1) == doctest::Approx(1.0 / (2.0 * std::numbers::pi * 0.21)).epsilon(1e-14));
  const auto p3 = GaussianParams::make({1.0, 0.0}, {{0.25, 0.0}, {0.0, 0.01}});
  const double r3[] = {1.0, 0.0};
  CHECK(gaussian_pdf(p3, r3) == doctest::Approx(1.0 / (2.0 * std::numbers::pi * 0.05)).epsilon(1e-14));

  // Decreasing along an eigen-axis.
  double prev = INFINITY;
  for (double t = 0.0; t < 5.0; t += 0.25) {
    const double r[] = {t, 1.0};
    const double v = gaussian_pdf(p1, r);
    CHECK(v < prev);
    prev = v;
  }
  const double bad[] = {0.0};
  CHECK(code_of([&] { gaussian_pdf(p1, bad); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("gaussian parameters are validated") {
  CHECK(code_of([] { GaussianParams::make({0.0, 0.0}, {{1.0, 0.5}, {0.4, 1.0}}); }) == ErrorCode::Config);
  CHECK(code_of([] { GaussianParams::make({0.0, 0.0}, {{1.0, 2.0}, {2.0, 1.0}}); }) == ErrorCode::Config);
  CHECK(code_of([] { GaussianParams::make({0.0}, {{1.0, 0.0}, {0.0, 1.0}}); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("full covariance matches the explicit formula") {
  const auto p = GaussianParams::make({0.5, -0.25}, {{1.0, 0.3}, {0.3, 0.5}});
  const double det = 1.0 * 0.5 - 0.3 * 0.3;
  const double inv[2][2] = {{0.5 / det, -0.3 / det}, {-0.3 / det, 1.0 / det}};
  for (double x : {-1.0, 0.0, 0.7}) {
    for (double y : {-0.5, 0.2, 1.5}) {
      const double dx = x - 0.5, dy = y + 0.25;
      const double quad = dx * (inv[0][0] * dx + inv[0][1] * dy) + dy * (inv[1][0] * dx + inv[1][1] * dy);
      const double expect = std::exp(-0.5 * quad) / (2.0 * std::numbers::pi * std::sqrt(det));
      const double r[] = {x, y};
      CHECK(gaussian_pdf(p, r) == doctest::Approx(expect).epsilon(1e-13));
    }
  }
}

TEST_CASE("gaussian integrates to one on a wide box") {
  const GaussianDensity g(GaussianParams::make({0.0, 1.0}, {{0.49, 0.0}, {0.0, 0.09}}));
  const TensorGrid grid({-8 * 0.7, 1.0 - 8 * 0.3}, {8 * 0.7, 1.0 + 8 * 0.3}, {400, 400});
  double total = 0.0;
  Point c;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.center_into(i, c);
    total += g.pdf(c) * grid.cell_volume();
  }
  CHECK(std::abs(total - 1.0) < 1e-6);
}

TEST_CASE("mixture density") {
  const auto dens = gaussian_three_class_example();
  const auto chi = SimplexVector::uniform(3);
  const double r[] = {0.0, 0.0};
  const double expect = (diag_normal(0, 0, 0, 1, 0.49, 0.09) + diag_normal(0, 0, 0, -1, 0.16, 0.64) +
                         diag_normal(0, 0, 1, 0, 0.25, 0.01)) /
                        3.0;
  CHECK(mixture_density(dens, chi, r) == doctest::Approx(expect).epsilon(1e-14));

  const DensityList same{gauss1(0.0), gauss1(0.0)};
  const double x[] = {0.3};
  CHECK(mixture_density(same, SimplexVector::make({0.2, 0.8}), x) == doctest::Approx(normal1(0.3, 0.0)));
  const DensityList pair{gauss1(0.0), gauss1(3.0)};
  CHECK(mixture_density(pair, SimplexVector::vertex(2, 0), x) == pair[0]->pdf(x));
  CHECK(code_of([&] { mixture_density(pair, SimplexVector::uniform(3), x); }) == ErrorCode::DimensionMismatch);

  // Uniform chi gives the arithmetic mean.
  for (double y : {-1.0, 0.25, 0.9}) {
    const double p[] = {0.4, y};
    double mean = 0.0;
    for (const auto& d : dens) mean += d->pdf(p);
    mean /= 3.0;
    CHECK(mixture_density(dens, chi, p) == doctest::Approx(mean).epsilon(1e-14));
  }
}

TEST_CASE("density ratio conventions") {
  const auto zero = std::make_shared<CallbackDensity>(1, [](PointView) { return 0.0; });
  const auto point3 = std::make_shared<CallbackDensity>(1, [](PointView) { return 0.3; });
  const double r[] = {0.0};
  CHECK(density_ratio(*point3, *point3, r) == ExtendedRatio::finite(1.0));
  CHECK(density_ratio(*zero, *point3, r).kind() == ExtendedRatio::Kind::Infinite);
  CHECK(density_ratio(*point3, *zero, r).kind() == ExtendedRatio::Kind::Zero);
  const auto zero2 = std::make_shared<CallbackDensity>(1, [](PointView) { return 0.0; });
  CHECK(density_ratio(*zero, *zero2, r).kind() == ExtendedRatio::Kind::Indeterminate);
  // Same model twice is the identity.
  CHECK(density_ratio(*zero, *zero, r) == ExtendedRatio::finite(1.0));
  const DensityList list{zero, point3};
  CHECK(density_ratio(list, 0, 0, r) == ExtendedRatio::finite(1.0));

  // Underflow counts as an exact zero.
  const auto tiny = std::make_shared<CallbackDensity>(1, [](PointView) { return 1e-310; });
  CHECK(density_ratio(*tiny, *point3, r).kind() == ExtendedRatio::Kind::Infinite);

  // Reciprocity for finite values.
  const auto a = gauss1(0.0), b = gauss1(1.0);
  for (double x : {-2.0, 0.1, 1.7}) {
    const double p[] = {x};
    const auto ab = density_ratio(*a, *b, p), ba = density_ratio(*b, *a, p);
    CHECK(ab.value() * ba.value() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ab.value() == doctest::Approx(normal1(x, 1.0) / normal1(x, 0.0)).epsilon(1e-13));
  }
}

TEST_CASE("prevalence function") {
  const auto a = gauss1(0.0), b = gauss1(1.0);
  const double mid[] = {0.5};
  CHECK(*prevalence_function(*a, *b, mid) == doctest::Approx(0.5).epsilon(1e-15));
  for (double x : {-1.5, 0.0, 0.8, 2.2}) {
    const double p[] = {x};
    const double expect = normal1(x, 1.0) / (normal1(x, 1.0) + normal1(x, 0.0));
    CHECK(*prevalence_function(*a, *b, p) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(*prevalence_function(*a, *b, p) + *prevalence_function(*b, *a, p) == doctest::Approx(1.0).epsilon(1e-15));
  }
  const DensityList list{a, b};
  CHECK(*prevalence_function(list, 1, 1, mid) == 0.5);
  const auto zero = std::make_shared<CallbackDensity>(1, [](PointView) { return 0.0; });
  CHECK(*prevalence_function(*zero, *a, mid) == 1.0);
  CHECK(*prevalence_function(*a, *zero, mid) == 0.0);
  const auto zero2 = std::make_shared<CallbackDensity>(1, [](PointView) { return 0.0; });
  CHECK_FALSE(prevalence_function(*zero, *zero2, mid).has_value());
}

TEST_CASE("piecewise constant densities") {
  const PiecewiseConstantDensity d({Box{{0.0}, {0.5}}, Box{{0.5}, {1.0}}}, {0.5, 1.5});
  const double in1[] = {0.25}, in2[] = {0.75}, out[] = {1.5};
  CHECK(d.pdf(in1) == 0.5);
  CHECK(d.pdf(in2) == 1.5);
  CHECK(d.pdf(out) == 0.0);
  CHECK_FALSE(d.in_support(out));
  CHECK(d.total_mass() == doctest::Approx(1.0));

  const PiecewiseConstantDensity g(TensorGrid({0.0}, {1.0}, {4}), {0.0, 2.0, 2.0, 0.0});
  const double p[] = {0.3};
  CHECK(g.pdf(p) == 2.0);
  const double q[] = {0.1};
  CHECK_FALSE(g.in_support(q));
}

TEST_CASE("population sampling") {
  const DensityList pair{gauss1(0.0), gauss1(1.0)};
  CHECK(sample_population(pair, SimplexVector::uniform(2), 0, 1).empty());
  for (const auto& s : sample_population(pair, SimplexVector::vertex(2, 0), 100, 7)) CHECK(s.label == 0);

  const auto big = sample_population(pair, SimplexVector::uniform(2), 100000, 42);
  double ones = 0.0;
  for (const auto& s : big) ones += s.label == 0 ? 1.0 : 0.0;
  CHECK(std::abs(ones / 1e5 - 0.5) < 0.01);

  // Deterministic given the seed.
  const auto again = sample_population(pair, SimplexVector::uniform(2), 1000, 42);
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].label == big[i].label);
    CHECK(again[i].point == big[i].point);
  }

  // Class means of Gaussian draws.
  double m0 = 0.0, m1 = 0.0, n0 = 0.0, n1 = 0.0;
  for (const auto& s : big) {
    (s.label == 0 ? m0 : m1) += s.point[0];
    (s.label == 0 ? n0 : n1) += 1.0;
  }
  CHECK(std::abs(m0 / n0) < 0.02);
  CHECK(std::abs(m1 / n1 - 1.0) < 0.02);

  const auto cb = std::make_shared<CallbackDensity>(1, [](PointView) { return 1.0; });
  CHECK(code_of([&] { sample_population({cb, cb}, SimplexVector::uniform(2), 3, 1); }) == ErrorCode::Unsampleable);
}
