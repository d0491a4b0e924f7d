#include "levelset/scorer.hpp"

#include <algorithm>
#include <cmath>

#include "levelset/error.hpp"
#include "levelset/rng.hpp"

namespace lsq {

std::size_t ScorerArchitecture::num_parameters() const noexcept {
  if (hidden == 0) return classes * input_dim + classes;
  return hidden * input_dim + hidden + classes * hidden + classes;
}

ScorerModel::ScorerModel(ScorerArchitecture arch, std::vector<double> params)
    : arch_(arch), params_(std::move(params)) {
  if (arch_.input_dim == 0 || arch_.classes < 2) throw Error(ErrorCode::Config, "scorer needs d >= 1 and K >= 2");
  if (arch_.hidden > kMaxHiddenUnits) throw Error(ErrorCode::Config, "at most 32 hidden units are supported");
  if (params_.size() != arch_.num_parameters()) {
    throw Error(ErrorCode::DimensionMismatch, "parameter vector length does not match the architecture");
  }
}

ScorerModel ScorerModel::random(ScorerArchitecture arch, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  std::vector<double> p(arch.num_parameters());
  const double scale = 0.1;
  for (double& v : p) v = scale * rng.normal();
  return ScorerModel(arch, std::move(p));
}

ScorerWorkspace ScorerModel::workspace() const {
  ScorerWorkspace ws;
  ws.hidden.resize(arch_.hidden);
  ws.dhidden.resize(arch_.hidden);
  ws.logits.resize(arch_.classes);
  ws.probs.resize(arch_.classes);
  ws.dlogits.resize(arch_.classes);
  return ws;
}

namespace {

// out = W x + b for a row-major (rows x cols) W starting at p.
void affine(const double* p, std::size_t rows, std::size_t cols, const double* x, double* out) {
  const double* b = p + rows * cols;
  for (std::size_t i = 0; i < rows; ++i) {
    double s = b[i];
    const double* w = p + i * cols;
    for (std::size_t c = 0; c < cols; ++c) s += w[c] * x[c];
    out[i] = s;
  }
}

void affine_backward(const double* p, std::size_t rows, std::size_t cols, const double* x, const double* dout,
                     double scale, double* grad, double* dx) {
  double* gb = grad + rows * cols;
  for (std::size_t i = 0; i < rows; ++i) {
    const double d = scale * dout[i];
    double* gw = grad + i * cols;
    for (std::size_t c = 0; c < cols; ++c) gw[c] += d * x[c];
    gb[i] += d;
  }
  if (dx) {
    for (std::size_t c = 0; c < cols; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < rows; ++i) s += p[i * cols + c] * dout[i];
      dx[c] = s;
    }
  }
}

}  // namespace

void ScorerModel::forward(PointView x, ScorerWorkspace& ws) const {
  if (x.size() != arch_.input_dim) throw Error(ErrorCode::DimensionMismatch, "input dimension differs");
  const double* p = params_.data();
  const std::size_t d = arch_.input_dim, h = arch_.hidden, k = arch_.classes;
  if (h == 0) {
    affine(p, k, d, x.data(), ws.logits.data());
  } else {
    affine(p, h, d, x.data(), ws.hidden.data());
    for (double& a : ws.hidden) a = std::tanh(a);
    affine(p + h * d + h, k, h, ws.hidden.data(), ws.logits.data());
  }
  const double mx = *std::max_element(ws.logits.begin(), ws.logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    ws.probs[i] = std::exp(ws.logits[i] - mx);
    total += ws.probs[i];
  }
  for (double& y : ws.probs) y /= total;
}

void ScorerModel::backward(PointView x, ScorerWorkspace& ws, double scale, std::span<double> grad) const {
  const double* p = params_.data();
  const std::size_t d = arch_.input_dim, h = arch_.hidden, k = arch_.classes;
  if (h == 0) {
    affine_backward(p, k, d, x.data(), ws.dlogits.data(), scale, grad.data(), nullptr);
    return;
  }
  const std::size_t off = h * d + h;
  affine_backward(p + off, k, h, ws.hidden.data(), ws.dlogits.data(), scale, grad.data() + off, ws.dhidden.data());
  for (std::size_t i = 0; i < h; ++i) ws.dhidden[i] *= 1.0 - ws.hidden[i] * ws.hidden[i];
  affine_backward(p, h, d, x.data(), ws.dhidden.data(), scale, grad.data(), nullptr);
}

std::vector<double> ScorerModel::softmax(PointView x) const {
  ScorerWorkspace ws = workspace();
  forward(x, ws);
  return ws.probs;
}

std::size_t ScorerModel::predict(PointView x) const {
  const std::vector<double> y = softmax(x);
  return static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
}

void softmax_backward(std::span<const double> y, std::span<const double> dy, std::span<double> dlogits) {
  double dot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) dot += y[i] * dy[i];
  for (std::size_t i = 0; i < y.size(); ++i) dlogits[i] = y[i] * (dy[i] - dot);
}

}  // namespace lsq
