#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "levelset/bayes.hpp"
#include "levelset/classifier.hpp"
#include "levelset/consistency.hpp"
#include "levelset/density.hpp"
#include "levelset/matrix.hpp"

namespace lsq {

// Pairwise prevalence values at one point. q(j, k) is the (possibly extended)
// value of q_{j,k}(r); extension(j, k) != 0 marks values that only extend the
// prevalence function outside the pair's joint support.
struct PairwiseValues {
  SquareMatrix<double> q;
  SquareMatrix<unsigned char> extension;

  explicit PairwiseValues(std::size_t k) : q(k, 0.5), extension(k, 0) {}
  std::size_t size() const noexcept { return q.size(); }
  // True when every off-diagonal value is an extension (no class supported at r).
  bool all_extended() const;
};

class PairwisePrevalenceTable {
 public:
  virtual ~PairwisePrevalenceTable() = default;
  virtual std::size_t num_classes() const = 0;
  // Reciprocal values (q(j,k) + q(k,j) = 1). May throw InconsistentPoint.
  virtual PairwiseValues values(PointView r) const = 0;
};

// Value used on points where neither class of a pair is supported; receives
// (j, k, r) with j < k and must return a value in [0, 1].
using ExtensionFn = std::function<double(std::size_t j, std::size_t k, PointView r)>;
ExtensionFn constant_extension(double value = 0.5);

// Table evaluating q_{j,k} from a callback (j < k; nullopt = indeterminate).
class CallbackPrevalenceTable : public PairwisePrevalenceTable {
 public:
  using PairFn = std::function<std::optional<double>(std::size_t j, std::size_t k, PointView r)>;

  CallbackPrevalenceTable(std::size_t k, PairFn fn, ExtensionFn extension = constant_extension());

  std::size_t num_classes() const override { return k_; }
  PairwiseValues values(PointView r) const override;

 private:
  std::size_t k_;
  PairFn fn_;
  ExtensionFn extension_;
};

// Exact prevalence functions of known densities.
class ExactPrevalenceTable final : public CallbackPrevalenceTable {
 public:
  explicit ExactPrevalenceTable(DensityList densities, ExtensionFn extension = constant_extension());
  const DensityList& densities() const noexcept { return densities_; }

 private:
  DensityList densities_;
};

// Interval-sourced table: every lookup audits the interval matrix at r and
// commits to the feasible-set witness. Throws InconsistentPoint when the
// intervals admit no self-consistent values.
class IntervalPrevalenceTable final : public PairwisePrevalenceTable {
 public:
  using Provider = std::function<RatioIntervalMatrix(PointView r)>;

  IntervalPrevalenceTable(std::size_t k, Provider provider, double tol = 1e-9,
                          ExtensionFn extension = constant_extension());

  std::size_t num_classes() const override { return k_; }
  PairwiseValues values(PointView r) const override;

 private:
  std::size_t k_;
  Provider provider_;
  double tol_;
  ExtensionFn extension_;
};

// Converts a witness ratio matrix to prevalence values; "?" entries take the
// extension value.
PairwiseValues values_from_ratios(const RatioMatrix& m, PointView r, const ExtensionFn& extension);

// chi_j / sum_k chi_k q_{j,k} / (1 - q_{j,k}); a row with some q_{j,k} = 1 is
// scored exactly 0. Throws InteriorRequired.
std::vector<double> score_vector(const PairwisePrevalenceTable& table, const SimplexVector& chi, PointView r);
std::vector<double> score_vector(const PairwiseValues& values, const SimplexVector& chi);

// Argmax of the score vector. Throws InteriorRequired, or InconsistentPoint
// from an interval table.
Decision construct_label(const PairwisePrevalenceTable& table, const SimplexVector& chi, PointView r,
                         const TieRule& tie = TieRule::lowest_index());
Decision construct_label(const PairwiseValues& values, const SimplexVector& chi, PointView r, const TieRule& tie);

// The constructed classifier as a function of (r, q). Unlike construct_label it
// accepts boundary q: classes with q_k = 0 are dropped from every sum.
class ConstructedClassifier final : public MonotoneClassifier {
 public:
  ConstructedClassifier(std::shared_ptr<const PairwisePrevalenceTable> table, TieRule tie = TieRule::lowest_index())
      : table_(std::move(table)), tie_(std::move(tie)) {}

  std::size_t num_classes() const override { return table_->num_classes(); }
  std::size_t classify(PointView r, const SimplexVector& q) const override;

 private:
  std::shared_ptr<const PairwisePrevalenceTable> table_;
  TieRule tie_;
};

struct EquivalenceMismatch {
  std::size_t point = 0;
  std::size_t constructed = 0;
  std::size_t oracle = 0;
  bool boundary_tie = false;
};

struct EquivalenceReport {
  std::size_t points = 0;
  std::size_t matches = 0;
  std::size_t tie_mismatches = 0;
  std::size_t true_mismatches = 0;
  std::size_t tie_flagged = 0;  // points whose top two oracle products tie
  std::vector<EquivalenceMismatch> mismatches;
};

// Relative gap below which the top two oracle products count as a tie.
inline constexpr double kOracleTieTolerance = 1e-12;

// Labels every point with the construction and with the density oracle.
EquivalenceReport equivalence_audit(const PairwisePrevalenceTable& table, const DensityList& densities,
                                    const SimplexVector& chi, std::span<const Point> points,
                                    const TieRule& tie = TieRule::lowest_index(),
                                    Execution exec = Execution::Parallel);

}  // namespace lsq
