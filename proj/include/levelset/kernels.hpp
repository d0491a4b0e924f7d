#pragma once

#include <span>
#include <vector>

#include "levelset/consistency.hpp"
#include "levelset/multiclass.hpp"
#include "levelset/parallel.hpp"
#include "levelset/probing.hpp"
#include "levelset/training.hpp"

namespace lsq {

// Point-level batch kernels. Each takes an Execution; the `serial` and
// `parallel` namespaces below pin it. Results are identical in both modes.

// Falls back to serial when the classifier is not safe for concurrent use.
std::vector<PointProbe> probe_points(const MonotoneClassifier& clf, std::span<const Point> points,
                                     const PrevalenceGrid& grid, std::size_t refine_iters, Execution exec);

std::vector<FeasibleSet> audit_points(std::span<const RatioIntervalMatrix> intervals, const SimplexVector& chi,
                                      double tol, Execution exec);

// Constructed labels and scores at each point (scores empty for off-support points).
struct LabelMapEntry {
  Decision decision;
  std::vector<double> scores;
};
std::vector<LabelMapEntry> label_map(const PairwisePrevalenceTable& table, const SimplexVector& chi,
                                     std::span<const Point> points, const TieRule& tie, Execution exec);

namespace serial {

inline std::vector<PointProbe> probe_points(const MonotoneClassifier& clf, std::span<const Point> points,
                                            const PrevalenceGrid& grid, std::size_t refine_iters = 0) {
  return lsq::probe_points(clf, points, grid, refine_iters, Execution::Serial);
}
inline std::vector<FeasibleSet> audit_points(std::span<const RatioIntervalMatrix> intervals, const SimplexVector& chi,
                                             double tol = 1e-9) {
  return lsq::audit_points(intervals, chi, tol, Execution::Serial);
}
inline std::vector<LabelMapEntry> label_map(const PairwisePrevalenceTable& table, const SimplexVector& chi,
                                            std::span<const Point> points,
                                            const TieRule& tie = TieRule::lowest_index()) {
  return lsq::label_map(table, chi, points, tie, Execution::Serial);
}
inline std::vector<NormalizationResidual> integrate(const DensityList& densities, const RatioSource& ratios,
                                                    const TensorGrid& grid, double tol) {
  return normalization_check(densities, ratios, grid, tol, Execution::Serial);
}
inline double loss(const ScorerModel& m, const TrainingDataset& d, const SimplexVector& q, double sigma) {
  return homotopy_loss(m, d, q, sigma, Execution::Serial);
}
inline std::vector<double> gradient(const ScorerModel& m, const TrainingDataset& d, const SimplexVector& q,
                                    double sigma) {
  return loss_gradient(m, d, q, sigma, Execution::Serial);
}

}  // namespace serial

namespace parallel {

inline std::vector<PointProbe> probe_points(const MonotoneClassifier& clf, std::span<const Point> points,
                                            const PrevalenceGrid& grid, std::size_t refine_iters = 0) {
  return lsq::probe_points(clf, points, grid, refine_iters, Execution::Parallel);
}
inline std::vector<FeasibleSet> audit_points(std::span<const RatioIntervalMatrix> intervals, const SimplexVector& chi,
                                             double tol = 1e-9) {
  return lsq::audit_points(intervals, chi, tol, Execution::Parallel);
}
inline std::vector<LabelMapEntry> label_map(const PairwisePrevalenceTable& table, const SimplexVector& chi,
                                            std::span<const Point> points,
                                            const TieRule& tie = TieRule::lowest_index()) {
  return lsq::label_map(table, chi, points, tie, Execution::Parallel);
}
inline std::vector<NormalizationResidual> integrate(const DensityList& densities, const RatioSource& ratios,
                                                    const TensorGrid& grid, double tol) {
  return normalization_check(densities, ratios, grid, tol, Execution::Parallel);
}
inline double loss(const ScorerModel& m, const TrainingDataset& d, const SimplexVector& q, double sigma) {
  return homotopy_loss(m, d, q, sigma, Execution::Parallel);
}
inline std::vector<double> gradient(const ScorerModel& m, const TrainingDataset& d, const SimplexVector& q,
                                    double sigma) {
  return loss_gradient(m, d, q, sigma, Execution::Parallel);
}

}  // namespace parallel

}  // namespace lsq
