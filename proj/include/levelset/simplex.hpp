#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lsq {

using Point = std::vector<double>;
using PointView = std::span<const double>;

// A point of the probability simplex. Used both for test prevalences (chi) and
// for affine prevalences (q) that parameterise a classifier.
class SimplexVector {
 public:
  static constexpr double kNegativeTolerance = 1e-12;
  static constexpr double kSumTolerance = 1e-9;

  // Throws Error(NegativeWeight) or Error(BadSum).
  static SimplexVector make(std::vector<double> weights);
  static SimplexVector uniform(std::size_t k);
  static SimplexVector vertex(std::size_t k, std::size_t index);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }

  bool interior() const noexcept;

  friend bool operator==(const SimplexVector&, const SimplexVector&) = default;

 private:
  explicit SimplexVector(std::vector<double> w) : weights_(std::move(w)) {}
  std::vector<double> weights_;
};

}  // namespace lsq
