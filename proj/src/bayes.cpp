#include "levelset/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "levelset/error.hpp"

namespace lsq {

std::size_t TieRule::resolve(std::span<const std::size_t> tied, PointView r) const {
  switch (kind_) {
    case Kind::LowestIndex: return tied.front();
    case Kind::HighestIndex: return tied.back();
    case Kind::Fixed: {
      const std::size_t pick = fn_(tied, r);
      if (std::find(tied.begin(), tied.end(), pick) == tied.end()) {
        throw Error(ErrorCode::Config, "fixed tie rule returned a class outside the tied set");
      }
      return pick;
    }
  }
  return tied.front();
}

Decision argmax_decision(std::span<const double> scores, std::span<const double> eligible, const TieRule& tie,
                         PointView r) {
  const double best = *std::max_element(scores.begin(), scores.end());
  std::vector<std::size_t> tied;
  Decision d;
  if (best > 0.0) {
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (scores[j] == best) tied.push_back(j);
    }
  } else {
    d.off_support = true;
    for (std::size_t j = 0; j < eligible.size(); ++j) {
      if (eligible[j] > 0.0) tied.push_back(j);
    }
    if (tied.empty()) {
      for (std::size_t j = 0; j < scores.size(); ++j) tied.push_back(j);
    }
  }
  d.boundary = tied.size() > 1;
  d.label = tie.resolve(tied, r);
  return d;
}

Decision binary_bayes_classify(const DensityModel& p1, const DensityModel& p2, const SimplexVector& q,
                               PointView r, const TieRule& tie) {
  if (q.size() != 2) throw Error(ErrorCode::DimensionMismatch, "binary classifier needs a 2-simplex prevalence");
  const double scores[2] = {q[0] * effective_density(p1, r), q[1] * effective_density(p2, r)};
  return argmax_decision(scores, q.weights(), tie, r);
}

Decision multiclass_bayes_classify(const DensityList& densities, const SimplexVector& q, PointView r,
                                   const TieRule& tie) {
  const std::size_t k = densities.size();
  if (q.size() != k) throw Error(ErrorCode::DimensionMismatch, "prevalence length differs from class count");
  double small[16];
  std::vector<double> big;
  double* scores = small;
  if (k > 16) {
    big.resize(k);
    scores = big.data();
  }
  for (std::size_t j = 0; j < k; ++j) scores[j] = q[j] > 0.0 ? q[j] * effective_density(*densities[j], r) : 0.0;
  return argmax_decision(std::span<const double>(scores, k), q.weights(), tie, r);
}

double inherent_uncertainty(const DensityList& densities, const SimplexVector& chi, PointView r) {
  const double total = mixture_density(densities, chi, r);
  if (!(total > 0.0)) throw Error(ErrorCode::OffSupportPoint, "mixture density vanishes at r");
  double best = 0.0;
  for (std::size_t j = 0; j < densities.size(); ++j) {
    if (chi[j] > 0.0) best = std::max(best, chi[j] * effective_density(*densities[j], r));
  }
  return 1.0 - best / total;
}

namespace {

void validate_prevalence_matrix(const SquareMatrix<double>& prevfun, const SimplexVector& chi) {
  const std::size_t k = prevfun.size();
  if (chi.size() != k) throw Error(ErrorCode::DimensionMismatch, "prevalence matrix and chi sizes differ");
  if (!chi.interior()) throw Error(ErrorCode::InteriorRequired, "test prevalence must be interior");
  for (std::size_t j = 0; j < k; ++j) {
    if (std::abs(prevfun(j, j) - 0.5) > 1e-12) {
      throw Error(ErrorCode::InconsistentRatios, "diagonal prevalence values must be 1/2");
    }
    for (std::size_t m = j + 1; m < k; ++m) {
      const double a = prevfun(j, m);
      const double b = prevfun(m, j);
      if (std::isnan(a) != std::isnan(b)) {
        throw Error(ErrorCode::InconsistentRatios, "indeterminate entries must come in reciprocal pairs");
      }
      if (std::isnan(a)) continue;
      if (a < 0.0 || a > 1.0 || std::abs(a + b - 1.0) > 1e-9) {
        throw Error(ErrorCode::InconsistentRatios,
                    "q(" + std::to_string(j + 1) + "," + std::to_string(m + 1) + ") + q(" + std::to_string(m + 1) +
                        "," + std::to_string(j + 1) + ") != 1");
      }
    }
  }
}

// Score of one row assuming validation already happened. Returns NaN if the
// row is on-support but still contains indeterminate entries.
double row_score(const SquareMatrix<double>& prevfun, const SimplexVector& chi, std::size_t j) {
  const std::size_t k = prevfun.size();
  bool has_indeterminate = false;
  double denom = 0.0;
  for (std::size_t m = 0; m < k; ++m) {
    const double q = prevfun(j, m);
    if (std::isnan(q)) {
      has_indeterminate = true;
      continue;
    }
    if (q >= 1.0) return 0.0;  // R_{j,m} = inf: class j is off-support here
    denom += chi[m] * (m == j ? 1.0 : q / (1.0 - q));
  }
  if (has_indeterminate) return std::numeric_limits<double>::quiet_NaN();
  return chi[j] / denom;
}

}  // namespace

std::vector<double> prevalence_scores(const SquareMatrix<double>& prevfun, const SimplexVector& chi) {
  validate_prevalence_matrix(prevfun, chi);
  std::vector<double> out(prevfun.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double s = row_score(prevfun, chi, j);
    out[j] = std::isnan(s) ? 0.0 : s;
  }
  return out;
}

// Multiplicative identity on the finite, nonzero ratios q / (1 - q).
static void require_self_consistent(const SquareMatrix<double>& prevfun) {
  const std::size_t k = prevfun.size();
  auto ratio = [&](std::size_t a, std::size_t b) {
    const double q = prevfun(a, b);
    return (std::isnan(q) || q <= 0.0 || q >= 1.0) ? std::numeric_limits<double>::quiet_NaN() : q / (1.0 - q);
  };
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t m = 0; m < k; ++m) {
      for (std::size_t n = 0; n < k; ++n) {
        if (j == m || m == n || j == n) continue;
        const double a = ratio(j, m), b = ratio(m, n), c = ratio(j, n);
        if (std::isnan(a) || std::isnan(b) || std::isnan(c)) continue;
        // q/(1-q) amplifies rounding in q by 1/(q(1-q)); allow for it per term.
        auto cond = [&](std::size_t x, std::size_t y) {
          const double q = prevfun(x, y);
          return 8.0 * std::numeric_limits<double>::epsilon() / (q * (1.0 - q));
        };
        const double tol = 1e-9 + cond(j, m) + cond(m, n) + cond(j, n);
        if (std::abs(std::log(a * b / c)) > tol) {
          throw Error(ErrorCode::InconsistentRatios, "prevalence values violate the multiplicative identity");
        }
      }
    }
  }
}

double pointwise_accuracy(const SquareMatrix<double>& prevfun, const SimplexVector& chi, std::size_t assigned) {
  validate_prevalence_matrix(prevfun, chi);
  require_self_consistent(prevfun);
  if (assigned >= prevfun.size()) throw Error(ErrorCode::DimensionMismatch, "assigned label out of range");
  const double z = row_score(prevfun, chi, assigned);
  if (std::isnan(z)) {
    throw Error(ErrorCode::InconsistentRatios, "on-support class has indeterminate prevalence entries");
  }
  return z;
}

SquareMatrix<double> prevalence_matrix(const DensityList& densities, PointView r) {
  const std::size_t k = densities.size();
  std::vector<double> p(k);
  for (std::size_t j = 0; j < k; ++j) p[j] = effective_density(*densities[j], r);
  SquareMatrix<double> out(k, 0.5);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t m = 0; m < k; ++m) {
      if (j == m) continue;
      if (p[j] == 0.0 && p[m] == 0.0) {
        out(j, m) = std::numeric_limits<double>::quiet_NaN();
      } else if (p[j] == 0.0) {
        out(j, m) = 1.0;
      } else if (p[m] == 0.0) {
        out(j, m) = 0.0;
      } else {
        out(j, m) = p[m] / (p[m] + p[j]);
      }
    }
  }
  return out;
}

BudgetUncertainty budget_uncertainty(const DensityList& densities, const SimplexVector& chi, PointView r,
                                     const UncertaintyBudget& budget) {
  const std::size_t k = densities.size();
  if (chi.size() != k) throw Error(ErrorCode::DimensionMismatch, "chi length differs from class count");
  auto eps = [](const std::vector<double>& v, std::size_t j) { return v.empty() ? 0.0 : v.at(j); };
  if ((!budget.eps_chi.empty() && budget.eps_chi.size() != k) ||
      (!budget.eps_dist.empty() && budget.eps_dist.size() != k)) {
    throw Error(ErrorCode::DimensionMismatch, "budget perturbations must have one entry per class");
  }
  std::vector<double> joint(k);
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double prior = std::max(0.0, chi[j] + eps(budget.eps_chi, j));
    const double like = std::max(0.0, effective_density(*densities[j], r) + eps(budget.eps_dist, j));
    joint[j] = prior * like;
    total += joint[j];
  }
  if (!(total > 0.0)) throw Error(ErrorCode::OffSupportPoint, "perturbed mixture vanishes at r");
  const double best = *std::max_element(joint.begin(), joint.end());
  BudgetUncertainty out;
  out.raw = 1.0 - best / total + budget.eps_num;
  out.clamped = std::clamp(out.raw, 0.0, 1.0);
  out.was_clamped = out.clamped != out.raw;
  return out;
}

}  // namespace lsq
