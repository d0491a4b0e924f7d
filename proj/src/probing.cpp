#include "levelset/probing.hpp"

#include <cmath>
#include <string>

#include "levelset/error.hpp"

namespace lsq {

PrevalenceGrid PrevalenceGrid::make(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::Config, "prevalence grid is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0 && values[i] < 1.0)) {
      throw Error(ErrorCode::Config, "prevalence grid values must lie in (0, 1)");
    }
    if (i > 0 && !(values[i] > values[i - 1])) {
      throw Error(ErrorCode::Config, "prevalence grid must be strictly increasing");
    }
  }
  return PrevalenceGrid(std::move(values));
}

PrevalenceGrid PrevalenceGrid::uniform(double step) {
  if (!(step > 0.0 && step < 0.5)) throw Error(ErrorCode::Config, "grid step must be in (0, 0.5)");
  const auto n = static_cast<std::size_t>(std::llround(1.0 / step)) - 1;
  std::vector<double> v;
  v.reserve(n);
  // Computed as i * step rounded to 12 digits so 0.07 is 0.07, not 0.07000000000000001.
  for (std::size_t i = 1; i <= n; ++i) {
    const double x = std::round(static_cast<double>(i) * step * 1e12) / 1e12;
    if (x < 1.0) v.push_back(x);
  }
  return make(std::move(v));
}

SimplexVector embed_pairwise(double alpha1, std::size_t j, std::size_t k, std::size_t num_classes) {
  if (j == k || j >= num_classes || k >= num_classes) {
    throw Error(ErrorCode::BadPair,
                "pair (" + std::to_string(j + 1) + "," + std::to_string(k + 1) + ") with K=" + std::to_string(num_classes));
  }
  std::vector<double> w(num_classes, 0.0);
  w[j] = alpha1;
  w[k] = 1.0 - alpha1;
  return SimplexVector::make(std::move(w));
}

SwitchBracket bracket_from_labels(std::span<const std::size_t> labels, const PrevalenceGrid& grid, std::size_t j,
                                  std::size_t k) {
  if (labels.size() != grid.size()) throw Error(ErrorCode::DimensionMismatch, "one label per grid value required");
  SwitchBracket b;
  b.j = j;
  b.k = k;
  // side: true when the label is j (the large-alpha side).
  std::vector<double> alphas;
  std::vector<bool> sides;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == j || labels[i] == k) {
      alphas.push_back(grid[i]);
      sides.push_back(labels[i] == j);
    } else {
      ++b.foreign_labels;
    }
  }
  if (alphas.empty()) {
    b.q_low = grid.front();
    b.q_high = grid.back();
    b.violations = grid.values();
    return b;
  }
  std::vector<std::size_t> switches;
  for (std::size_t i = 1; i < sides.size(); ++i) {
    if (sides[i] != sides[i - 1]) switches.push_back(i);
  }
  if (switches.empty()) {
    b.regime = sides.front() ? SwitchRegime::AlwaysJ : SwitchRegime::AlwaysK;
    b.q_low = sides.front() ? 0.0 : grid.back();
    b.q_high = sides.front() ? grid.front() : 1.0;
    return b;
  }
  b.regime = SwitchRegime::InteriorSwitch;
  b.q_low = alphas[switches.front() - 1];
  b.q_high = alphas[switches.back()];
  if (!sides[switches.front()]) b.violations.push_back(alphas[switches.front()]);  // j -> k: wrong direction
  for (std::size_t s = 1; s < switches.size(); ++s) b.violations.push_back(alphas[switches[s]]);
  return b;
}

SwitchBracket probe_pair(const MonotoneClassifier& clf, PointView r, std::size_t j, std::size_t k,
                         const PrevalenceGrid& grid) {
  const std::size_t n = clf.num_classes();
  std::vector<SimplexVector> qs;
  qs.reserve(grid.size());
  for (double a : grid.values()) qs.push_back(embed_pairwise(a, j, k, n));
  const auto labels = clf.classify_batch(r, qs);
  return bracket_from_labels(labels, grid, j, k);
}

SwitchBracket refine_bracket(const MonotoneClassifier& clf, PointView r, const SwitchBracket& bracket,
                             std::size_t max_iters) {
  if (bracket.regime != SwitchRegime::InteriorSwitch || !bracket.monotone()) {
    throw Error(ErrorCode::NotRefinable, "only monotone interior brackets can be bisected");
  }
  SwitchBracket out = bracket;
  const std::size_t n = clf.num_classes();
  for (std::size_t it = 0; it < max_iters; ++it) {
    const double mid = 0.5 * (out.q_low + out.q_high);
    if (!(mid > out.q_low && mid < out.q_high)) break;  // exhausted double resolution
    const std::size_t label = clf.classify(r, embed_pairwise(mid, out.j, out.k, n));
    if (label == out.k) {
      out.q_low = mid;
    } else if (label == out.j) {
      out.q_high = mid;
    } else {
      throw Error(ErrorCode::NotRefinable, "classifier left the pair during bisection");
    }
  }
  return out;
}

bool RatioInterval::contains(double v, double rel_tol) const {
  if (std::isinf(v)) return std::isinf(hi);
  return v >= lo * (1.0 - rel_tol) && v <= hi * (1.0 + rel_tol);
}

RatioInterval RatioInterval::reciprocal() const noexcept {
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto inv = [](double x) { return x == 0.0 ? inf : (std::isinf(x) ? 0.0 : 1.0 / x); };
  return RatioInterval{inv(hi), inv(lo)};
}

double prevalence_to_ratio(double q) noexcept {
  if (q <= 0.0) return 0.0;
  if (q >= 1.0) return std::numeric_limits<double>::infinity();
  return q / (1.0 - q);
}

RatioIntervalMatrix::RatioIntervalMatrix(std::size_t k) : intervals(k), violations(k, 0) {
  for (std::size_t i = 0; i < k; ++i) intervals(i, i) = RatioInterval{1.0, 1.0};
}

void RatioIntervalMatrix::set_pair(std::size_t j, std::size_t k, RatioInterval iv, std::size_t violation_count) {
  intervals(j, k) = iv;
  intervals(k, j) = iv.reciprocal();
  violations(j, k) = violation_count;
  violations(k, j) = violation_count;
}

std::size_t RatioIntervalMatrix::total_violations() const {
  std::size_t total = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = i + 1; j < size(); ++j) total += violations(i, j);
  }
  return total;
}

RatioInterval interval_from_bracket(const SwitchBracket& bracket, const PrevalenceGrid& grid) {
  switch (bracket.regime) {
    case SwitchRegime::AlwaysK: return {prevalence_to_ratio(grid.back()), std::numeric_limits<double>::infinity()};
    case SwitchRegime::AlwaysJ: return {0.0, prevalence_to_ratio(grid.front())};
    case SwitchRegime::InteriorSwitch: break;
  }
  return {prevalence_to_ratio(bracket.q_low), prevalence_to_ratio(bracket.q_high)};
}

PointProbe probe_point(const MonotoneClassifier& clf, PointView r, const PrevalenceGrid& grid,
                       std::size_t refine_iters) {
  const std::size_t n = clf.num_classes();
  PointProbe out{RatioIntervalMatrix(n), {}};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      SwitchBracket b = probe_pair(clf, r, j, k, grid);
      if (refine_iters > 0 && b.regime == SwitchRegime::InteriorSwitch && b.monotone()) {
        b = refine_bracket(clf, r, b, refine_iters);
      }
      out.matrix.set_pair(j, k, interval_from_bracket(b, grid), b.violations.size());
      out.brackets.push_back(std::move(b));
    }
  }
  return out;
}

RatioIntervalMatrix probe_all_pairs(const MonotoneClassifier& clf, PointView r, const PrevalenceGrid& grid) {
  return probe_point(clf, r, grid, 0).matrix;
}

}  // namespace lsq
