#include "levelset/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "levelset/error.hpp"

namespace lsq {

SimplexVector SimplexVector::make(std::vector<double> weights) {
  if (weights.empty()) throw Error(ErrorCode::BadSum, "empty weight vector");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= -kNegativeTolerance)) {
      throw Error(ErrorCode::NegativeWeight,
                  "weight " + std::to_string(i) + " = " + std::to_string(weights[i]));
    }
  }
  const double raw = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(std::abs(raw - 1.0) <= kSumTolerance)) {
    throw Error(ErrorCode::BadSum, "weights sum to " + std::to_string(raw));
  }
  for (double& w : weights) w = std::clamp(w, 0.0, 1.0);
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (sum != 1.0) {
    for (double& w : weights) w /= sum;
  }
  return SimplexVector(std::move(weights));
}

SimplexVector SimplexVector::uniform(std::size_t k) {
  return make(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

SimplexVector SimplexVector::vertex(std::size_t k, std::size_t index) {
  std::vector<double> w(k, 0.0);
  w.at(index) = 1.0;
  return SimplexVector(std::move(w));
}

bool SimplexVector::interior() const noexcept {
  return std::all_of(weights_.begin(), weights_.end(), [](double w) { return w > 0.0; });
}

}  // namespace lsq
