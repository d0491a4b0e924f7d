#include "levelset/kernels.hpp"

namespace lsq {

std::vector<PointProbe> probe_points(const MonotoneClassifier& clf, std::span<const Point> points,
                                     const PrevalenceGrid& grid, std::size_t refine_iters, Execution exec) {
  if (!clf.concurrent_safe()) exec = Execution::Serial;
  std::vector<PointProbe> out(points.size());
  for_each_index(points.size(), exec,
                 [&](std::size_t i) { out[i] = probe_point(clf, points[i], grid, refine_iters); });
  return out;
}

std::vector<FeasibleSet> audit_points(std::span<const RatioIntervalMatrix> intervals, const SimplexVector& chi,
                                      double tol, Execution exec) {
  std::vector<FeasibleSet> out(intervals.size());
  for_each_index(intervals.size(), exec, [&](std::size_t i) { out[i] = feasible_set(intervals[i], chi, tol); });
  return out;
}

std::vector<LabelMapEntry> label_map(const PairwisePrevalenceTable& table, const SimplexVector& chi,
                                     std::span<const Point> points, const TieRule& tie, Execution exec) {
  std::vector<LabelMapEntry> out(points.size());
  for_each_index(points.size(), exec, [&](std::size_t i) {
    const PairwiseValues v = table.values(points[i]);
    out[i].decision = construct_label(v, chi, points[i], tie);
    out[i].scores = score_vector(v, chi);
  });
  return out;
}

}  // namespace lsq
