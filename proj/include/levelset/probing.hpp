#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "levelset/classifier.hpp"
#include "levelset/matrix.hpp"
#include "levelset/simplex.hpp"

namespace lsq {

// Strictly increasing affine-prevalence values alpha_1 in (0, 1). The simplex
// vertices 0 and 1 are never evaluated.
class PrevalenceGrid {
 public:
  // Throws Config unless strictly increasing inside (0, 1).
  static PrevalenceGrid make(std::vector<double> values);
  // step, 2*step, ..., up to 1 - step (0.01 gives 0.01 ... 0.99).
  static PrevalenceGrid uniform(double step);
  static PrevalenceGrid standard() { return uniform(0.01); }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }

 private:
  explicit PrevalenceGrid(std::vector<double> v) : values_(std::move(v)) {}
  std::vector<double> values_;
};

// q with alpha_1 at slot j, 1 - alpha_1 at slot k and zeros elsewhere.
// Throws BadPair if j == k or either index is out of range.
SimplexVector embed_pairwise(double alpha1, std::size_t j, std::size_t k, std::size_t num_classes);

enum class SwitchRegime { InteriorSwitch, AlwaysJ, AlwaysK };

// Outcome of sweeping alpha_1 along the (j, k) edge at one point. Label k is
// expected for small alpha_1 and label j for large alpha_1.
struct SwitchBracket {
  std::size_t j = 0;
  std::size_t k = 1;
  double q_low = 0.0;
  double q_high = 1.0;
  SwitchRegime regime = SwitchRegime::InteriorSwitch;
  // Grid values of every switch after the first, plus any switch in the wrong
  // direction. Empty iff the sampled sequence is monotone.
  std::vector<double> violations;
  // Grid points whose label was neither j nor k (skipped).
  std::size_t foreign_labels = 0;

  bool monotone() const noexcept { return violations.empty(); }
  double width() const noexcept { return q_high - q_low; }
};

// Builds the bracket from labels observed at the grid values.
SwitchBracket bracket_from_labels(std::span<const std::size_t> labels, const PrevalenceGrid& grid, std::size_t j,
                                  std::size_t k);

// Exactly grid.size() classifier evaluations (one batch call).
SwitchBracket probe_pair(const MonotoneClassifier& clf, PointView r, std::size_t j, std::size_t k,
                         const PrevalenceGrid& grid);

// Bisection; width shrinks by 2^-max_iters. Throws NotRefinable unless the
// bracket is a monotone interior switch.
SwitchBracket refine_bracket(const MonotoneClassifier& clf, PointView r, const SwitchBracket& bracket,
                             std::size_t max_iters);

// Closed interval on [0, inf].
struct RatioInterval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double v, double rel_tol = 0.0) const;
  bool degenerate() const noexcept { return lo == hi; }
  // [1/hi, 1/lo] with 1/0 = inf and 1/inf = 0.
  RatioInterval reciprocal() const noexcept;

  friend bool operator==(const RatioInterval&, const RatioInterval&) = default;
};

// q / (1 - q) on [0, 1] -> [0, inf].
double prevalence_to_ratio(double q) noexcept;

struct RatioIntervalMatrix {
  SquareMatrix<RatioInterval> intervals;
  SquareMatrix<std::size_t> violations;  // per-entry violation counts (symmetric)

  RatioIntervalMatrix() = default;
  explicit RatioIntervalMatrix(std::size_t k);

  std::size_t size() const noexcept { return intervals.size(); }
  RatioInterval& operator()(std::size_t i, std::size_t j) { return intervals(i, j); }
  const RatioInterval& operator()(std::size_t i, std::size_t j) const { return intervals(i, j); }
  // Sets (j, k) and its reciprocal (k, j).
  void set_pair(std::size_t j, std::size_t k, RatioInterval iv, std::size_t violation_count = 0);
  std::size_t total_violations() const;
};

RatioInterval interval_from_bracket(const SwitchBracket& bracket, const PrevalenceGrid& grid);

struct PointProbe {
  RatioIntervalMatrix matrix;
  std::vector<SwitchBracket> brackets;  // one per unordered pair j < k, lexicographic
};

// Probes every unordered pair; when refine_iters > 0 monotone interior
// brackets are bisected further.
PointProbe probe_point(const MonotoneClassifier& clf, PointView r, const PrevalenceGrid& grid,
                       std::size_t refine_iters = 0);

RatioIntervalMatrix probe_all_pairs(const MonotoneClassifier& clf, PointView r, const PrevalenceGrid& grid);

}  // namespace lsq
