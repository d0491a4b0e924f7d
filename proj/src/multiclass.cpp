#include "levelset/multiclass.hpp"

#include <algorithm>
#include <cmath>

#include "levelset/error.hpp"

namespace lsq {

bool PairwiseValues::all_extended() const {
  for (std::size_t j = 0; j < size(); ++j) {
    for (std::size_t k = 0; k < size(); ++k) {
      if (j != k && !extension(j, k)) return false;
    }
  }
  return size() > 1;
}

ExtensionFn constant_extension(double value) {
  if (!(value >= 0.0 && value <= 1.0)) throw Error(ErrorCode::Config, "extension value must lie in [0, 1]");
  return [value](std::size_t, std::size_t, PointView) { return value; };
}

namespace {

double checked_extension(const ExtensionFn& ext, std::size_t j, std::size_t k, PointView r) {
  const double v = ext(j, k, r);
  if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::Config, "extension value outside [0, 1]");
  return v;
}

void set_pair(PairwiseValues& out, std::size_t j, std::size_t k, double q, bool extended) {
  out.q(j, k) = q;
  out.q(k, j) = 1.0 - q;
  out.extension(j, k) = out.extension(k, j) = extended ? 1 : 0;
}

}  // namespace

CallbackPrevalenceTable::CallbackPrevalenceTable(std::size_t k, PairFn fn, ExtensionFn extension)
    : k_(k), fn_(std::move(fn)), extension_(std::move(extension)) {}

PairwiseValues CallbackPrevalenceTable::values(PointView r) const {
  PairwiseValues out(k_);
  for (std::size_t j = 0; j < k_; ++j) {
    for (std::size_t k = j + 1; k < k_; ++k) {
      const auto q = fn_(j, k, r);
      if (q) {
        if (!(*q >= 0.0 && *q <= 1.0)) throw Error(ErrorCode::Data, "prevalence value outside [0, 1]");
        set_pair(out, j, k, *q, false);
      } else {
        set_pair(out, j, k, checked_extension(extension_, j, k, r), true);
      }
    }
  }
  return out;
}

ExactPrevalenceTable::ExactPrevalenceTable(DensityList densities, ExtensionFn extension)
    : CallbackPrevalenceTable(
          densities.size(),
          [d = densities](std::size_t j, std::size_t k, PointView r) { return prevalence_function(d, j, k, r); },
          std::move(extension)),
      densities_(std::move(densities)) {}

PairwiseValues values_from_ratios(const RatioMatrix& m, PointView r, const ExtensionFn& extension) {
  PairwiseValues out(m.size());
  for (std::size_t j = 0; j < m.size(); ++j) {
    for (std::size_t k = j + 1; k < m.size(); ++k) {
      const ExtendedRatio& v = m(j, k);
      switch (v.kind()) {
        case ExtendedRatio::Kind::Zero: set_pair(out, j, k, 0.0, false); break;
        case ExtendedRatio::Kind::Infinite: set_pair(out, j, k, 1.0, false); break;
        case ExtendedRatio::Kind::Finite: set_pair(out, j, k, v.value() / (1.0 + v.value()), false); break;
        case ExtendedRatio::Kind::Indeterminate:
          set_pair(out, j, k, checked_extension(extension, j, k, r), true);
          break;
      }
    }
  }
  return out;
}

IntervalPrevalenceTable::IntervalPrevalenceTable(std::size_t k, Provider provider, double tol,
                                                 ExtensionFn extension)
    : k_(k), provider_(std::move(provider)), tol_(tol), extension_(std::move(extension)) {}

PairwiseValues IntervalPrevalenceTable::values(PointView r) const {
  const RatioIntervalMatrix im = provider_(r);
  if (im.size() != k_) throw Error(ErrorCode::DimensionMismatch, "interval matrix size differs from class count");
  // The witness does not depend on chi; uniform chi only satisfies the interface.
  const FeasibleSet fs = feasible_set(im, SimplexVector::uniform(k_), tol_);
  if (!fs.feasible) throw Error(ErrorCode::InconsistentPoint, "no self-consistent ratios inside the intervals");
  return values_from_ratios(*fs.witness, r, extension_);
}

namespace {

// Scores with classes of zero weight dropped from the sums.
std::vector<double> raw_scores(const PairwiseValues& v, std::span<const double> w) {
  const std::size_t n = v.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (w[j] <= 0.0) continue;
    double denom = w[j];
    bool off = false;
    for (std::size_t k = 0; k < n && !off; ++k) {
      if (k == j || w[k] <= 0.0) continue;
      const double q = v.q(j, k);
      if (q >= 1.0) {
        off = true;  // R_{j,k} = inf
      } else {
        denom += w[k] * q / (1.0 - q);
      }
    }
    if (!off) out[j] = w[j] / denom;
  }
  return out;
}

Decision decide(const PairwiseValues& v, std::span<const double> w, PointView r, const TieRule& tie) {
  if (v.all_extended()) {
    std::vector<std::size_t> eligible;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (w[j] > 0.0) eligible.push_back(j);
    }
    Decision d;
    d.off_support = true;
    d.boundary = eligible.size() > 1;
    d.label = tie.resolve(eligible, r);
    return d;
  }
  const std::vector<double> s = raw_scores(v, w);
  return argmax_decision(s, w, tie, r);
}

void require_interior(const SimplexVector& chi, std::size_t k) {
  if (chi.size() != k) throw Error(ErrorCode::DimensionMismatch, "chi length differs from class count");
  if (!chi.interior()) throw Error(ErrorCode::InteriorRequired, "test prevalence must be interior");
}

}  // namespace

std::vector<double> score_vector(const PairwiseValues& values, const SimplexVector& chi) {
  require_interior(chi, values.size());
  return raw_scores(values, chi.weights());
}

std::vector<double> score_vector(const PairwisePrevalenceTable& table, const SimplexVector& chi, PointView r) {
  require_interior(chi, table.num_classes());
  return raw_scores(table.values(r), chi.weights());
}

Decision construct_label(const PairwiseValues& values, const SimplexVector& chi, PointView r, const TieRule& tie) {
  require_interior(chi, values.size());
  return decide(values, chi.weights(), r, tie);
}

Decision construct_label(const PairwisePrevalenceTable& table, const SimplexVector& chi, PointView r,
                         const TieRule& tie) {
  require_interior(chi, table.num_classes());
  return decide(table.values(r), chi.weights(), r, tie);
}

std::size_t ConstructedClassifier::classify(PointView r, const SimplexVector& q) const {
  if (q.size() != table_->num_classes()) throw Error(ErrorCode::DimensionMismatch, "q length differs");
  return decide(table_->values(r), q.weights(), r, tie_).label;
}

EquivalenceReport equivalence_audit(const PairwisePrevalenceTable& table, const DensityList& densities,
                                    const SimplexVector& chi, std::span<const Point> points, const TieRule& tie,
                                    Execution exec) {
  const std::size_t k = densities.size();
  require_interior(chi, k);
  if (table.num_classes() != k) throw Error(ErrorCode::DimensionMismatch, "table and densities differ in size");

  struct Row {
    std::size_t constructed = 0, oracle = 0;
    bool tie = false;
  };
  std::vector<Row> rows(points.size());
  for_each_index(points.size(), exec, [&](std::size_t i) {
    const PointView r = points[i];
    Row& row = rows[i];
    row.constructed = construct_label(table, chi, r, tie).label;
    row.oracle = multiclass_bayes_classify(densities, chi, r, tie).label;
    std::vector<double> prod(k);
    for (std::size_t j = 0; j < k; ++j) prod[j] = chi[j] * effective_density(*densities[j], r);
    std::sort(prod.begin(), prod.end(), std::greater<>());
    row.tie = k > 1 && prod[0] - prod[1] <= kOracleTieTolerance * prod[0];
  });

  EquivalenceReport rep;
  rep.points = points.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& row = rows[i];
    if (row.tie) ++rep.tie_flagged;
    if (row.constructed == row.oracle) {
      ++rep.matches;
      continue;
    }
    (row.tie ? rep.tie_mismatches : rep.true_mismatches)++;
    rep.mismatches.push_back({i, row.constructed, row.oracle, row.tie});
  }
  return rep;
}

}  // namespace lsq
