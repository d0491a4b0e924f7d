#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "levelset/classifier.hpp"
#include "levelset/density.hpp"
#include "levelset/matrix.hpp"

namespace lsq {

// Resolution of exact ties in the weighted densities (the boundary set).
class TieRule {
 public:
  enum class Kind { LowestIndex, HighestIndex, Fixed };
  using Assignment = std::function<std::size_t(std::span<const std::size_t> tied, PointView r)>;

  static TieRule lowest_index() { return TieRule(Kind::LowestIndex, {}); }
  static TieRule highest_index() { return TieRule(Kind::HighestIndex, {}); }
  // `fn` must return one of the tied indices and be deterministic.
  static TieRule fixed(Assignment fn) { return TieRule(Kind::Fixed, std::move(fn)); }

  Kind kind() const noexcept { return kind_; }
  std::size_t resolve(std::span<const std::size_t> tied, PointView r) const;

 private:
  TieRule(Kind k, Assignment fn) : kind_(k), fn_(std::move(fn)) {}
  Kind kind_;
  Assignment fn_;
};

struct Decision {
  std::size_t label = 0;
  bool boundary = false;     // two or more classes attained the maximum
  bool off_support = false;  // every weighted density vanished
};

// Picks the argmax of `scores`; ties resolved by `tie`. If every score is zero
// the decision is flagged off-support and chosen among `eligible` classes.
Decision argmax_decision(std::span<const double> scores, std::span<const double> eligible, const TieRule& tie,
                         PointView r);

Decision binary_bayes_classify(const DensityModel& p1, const DensityModel& p2, const SimplexVector& q,
                               PointView r, const TieRule& tie);

Decision multiclass_bayes_classify(const DensityList& densities, const SimplexVector& q, PointView r,
                                   const TieRule& tie);

// The strong Bayes classifier of a set of known densities.
class OracleClassifier final : public MonotoneClassifier {
 public:
  explicit OracleClassifier(DensityList densities, TieRule tie = TieRule::lowest_index())
      : densities_(std::move(densities)), tie_(std::move(tie)) {}

  std::size_t num_classes() const override { return densities_.size(); }
  std::size_t classify(PointView r, const SimplexVector& q) const override { return decide(r, q).label; }
  Decision decide(PointView r, const SimplexVector& q) const {
    return multiclass_bayes_classify(densities_, q, r, tie_);
  }

  const DensityList& densities() const noexcept { return densities_; }
  const TieRule& tie_rule() const noexcept { return tie_; }

 private:
  DensityList densities_;
  TieRule tie_;
};

// u(r) = 1 - max_C chi_C P_C(r) / Q(r; chi). Throws OffSupportPoint if Q = 0.
double inherent_uncertainty(const DensityList& densities, const SimplexVector& chi, PointView r);

// Pointwise accuracy Z of labelling r as `assigned`, computed from prevalence
// function values alone. `prevfun(j, k)` holds q_{j,k}(r); NaN marks an
// indeterminate pair. Throws InteriorRequired or InconsistentRatios.
double pointwise_accuracy(const SquareMatrix<double>& prevfun, const SimplexVector& chi, std::size_t assigned);

// Per-class score chi_j / sum_k chi_k q_{j,k}/(1 - q_{j,k}) for every class,
// with off-support rows (some q_{j,k} = 1) scored exactly 0.
std::vector<double> prevalence_scores(const SquareMatrix<double>& prevfun, const SimplexVector& chi);

// K x K prevalence-function matrix of known densities at r.
SquareMatrix<double> prevalence_matrix(const DensityList& densities, PointView r);

struct UncertaintyBudget {
  std::vector<double> eps_chi;   // additive perturbation of Pr[C], per class
  std::vector<double> eps_dist;  // additive perturbation of Pr[r|C], per class
  double eps_num = 0.0;
};

struct BudgetUncertainty {
  double raw = 0.0;      // value as composed, possibly outside [0, 1]
  double clamped = 0.0;  // raw clamped to [0, 1]
  bool was_clamped = false;
};

// Perturbed inherent uncertainty. Perturbed factors are clamped at zero.
// Throws OffSupportPoint if the perturbed mixture vanishes at r.
BudgetUncertainty budget_uncertainty(const DensityList& densities, const SimplexVector& chi, PointView r,
                                     const UncertaintyBudget& budget);

}  // namespace lsq
