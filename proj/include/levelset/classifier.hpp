#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "levelset/simplex.hpp"

namespace lsq {

// A classifier parameterised by an affine prevalence q: (r, q) -> class index.
// This is the object probed and audited; implementations include the density
// oracle, trained scorer families and external processes.
class MonotoneClassifier {
 public:
  virtual ~MonotoneClassifier() = default;

  virtual std::size_t num_classes() const = 0;
  // 0-based class index. Must be deterministic for fixed (r, q).
  virtual std::size_t classify(PointView r, const SimplexVector& q) const = 0;

  // All prevalences at one point. The default loops over classify(); external
  // processes override it to batch the round trip.
  virtual std::vector<std::size_t> classify_batch(PointView r, std::span<const SimplexVector> qs) const {
    std::vector<std::size_t> out;
    out.reserve(qs.size());
    for (const auto& q : qs) out.push_back(classify(r, q));
    return out;
  }

  // Whether distinct points may be classified from several threads at once.
  virtual bool concurrent_safe() const { return true; }
};

}  // namespace lsq
