#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "levelset/simplex.hpp"

namespace lsq {

struct ScorerArchitecture {
  std::size_t input_dim = 1;
  std::size_t hidden = 0;  // 0 = linear scorer, otherwise tanh units (<= 32)
  std::size_t classes = 2;

  std::size_t num_parameters() const noexcept;
  friend bool operator==(const ScorerArchitecture&, const ScorerArchitecture&) = default;
};

inline constexpr std::size_t kMaxHiddenUnits = 32;

// Scratch buffers for one forward/backward pass.
struct ScorerWorkspace {
  std::vector<double> hidden;
  std::vector<double> logits;
  std::vector<double> probs;
  std::vector<double> dlogits;
  std::vector<double> dhidden;
};

// Affine or one-hidden-layer map followed by a softmax. Parameter layout:
// linear [W (K x d), b (K)]; hidden [W1 (H x d), b1 (H), W2 (K x H), b2 (K)].
class ScorerModel {
 public:
  ScorerModel() = default;
  // Throws Config for an invalid architecture.
  ScorerModel(ScorerArchitecture arch, std::vector<double> params);
  // Small Gaussian weights drawn from stream 0 of `seed`.
  static ScorerModel random(ScorerArchitecture arch, std::uint64_t seed);

  const ScorerArchitecture& architecture() const noexcept { return arch_; }
  std::size_t num_parameters() const noexcept { return params_.size(); }
  std::span<const double> parameters() const noexcept { return params_; }
  std::span<double> parameters() noexcept { return params_; }

  ScorerWorkspace workspace() const;
  // Fills ws.hidden, ws.logits and ws.probs.
  void forward(PointView x, ScorerWorkspace& ws) const;
  // Adds scale * d(loss)/d(params) to grad, given d(loss)/d(logits) in ws.dlogits.
  void backward(PointView x, ScorerWorkspace& ws, double scale, std::span<double> grad) const;

  std::vector<double> softmax(PointView x) const;
  // Argmax of the softmax output, lowest index on ties.
  std::size_t predict(PointView x) const;

  friend bool operator==(const ScorerModel&, const ScorerModel&) = default;

 private:
  ScorerArchitecture arch_;
  std::vector<double> params_;
};

// Softmax backward: dlogits_i = y_i (dy_i - sum_l y_l dy_l).
void softmax_backward(std::span<const double> y, std::span<const double> dy, std::span<double> dlogits);

}  // namespace lsq
