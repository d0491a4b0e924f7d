#include "levelset/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "levelset/error.hpp"
#include "levelset/rng.hpp"

namespace lsq {

// ---- dataset ----------------------------------------------------------------

TrainingDataset TrainingDataset::make(const std::vector<std::vector<Point>>& per_class) {
  if (per_class.size() < 2) throw Error(ErrorCode::Config, "a dataset needs at least two classes");
  TrainingDataset d;
  for (std::size_t k = 0; k < per_class.size(); ++k) {
    if (per_class[k].empty()) throw Error(ErrorCode::EmptyClass, "class " + std::to_string(k + 1) + " has no samples");
    for (const Point& p : per_class[k]) {
      if (d.dim_ == 0) d.dim_ = p.size();
      if (p.size() != d.dim_ || p.empty()) throw Error(ErrorCode::DimensionMismatch, "samples differ in dimension");
      d.features_.insert(d.features_.end(), p.begin(), p.end());
      d.labels_.push_back(k);
    }
    d.offsets_.push_back(d.labels_.size());
  }
  return d;
}

TrainingDataset TrainingDataset::from_samples(std::span<const LabeledSample> samples, std::size_t num_classes) {
  std::vector<std::vector<Point>> per_class(num_classes);
  for (const auto& s : samples) {
    if (s.label >= num_classes) throw Error(ErrorCode::Data, "sample label out of range");
    per_class[s.label].push_back(s.point);
  }
  return make(per_class);
}

SimplexVector TrainingDataset::training_prevalence() const {
  std::vector<double> w(num_classes());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = static_cast<double>(count(k)) / static_cast<double>(size());
  return SimplexVector::make(std::move(w));
}

TrainingDataset TrainingDataset::pair_subset(std::size_t j, std::size_t k) const {
  if (j == k || j >= num_classes() || k >= num_classes()) throw Error(ErrorCode::BadPair, "invalid class pair");
  std::vector<std::vector<Point>> per_class(2);
  for (std::size_t c = 0; c < 2; ++c) {
    const std::size_t src = c == 0 ? j : k;
    for (std::size_t i = offsets_[src]; i < offsets_[src + 1]; ++i) {
      const PointView p = point(i);
      per_class[c].emplace_back(p.begin(), p.end());
    }
  }
  return make(per_class);
}

// ---- losses -----------------------------------------------------------------

namespace {

void check_q(const TrainingDataset& data, const SimplexVector& q) {
  if (q.size() != data.num_classes()) throw Error(ErrorCode::DimensionMismatch, "q length differs from class count");
}

void check_model(const ScorerModel& model, const TrainingDataset& data) {
  const auto& a = model.architecture();
  if (a.input_dim != data.dim() || a.classes != data.num_classes()) {
    throw Error(ErrorCode::DimensionMismatch, "model architecture does not match the dataset");
  }
}

std::vector<double> class_weights(const TrainingDataset& data, const SimplexVector& q) {
  std::vector<double> w(data.num_classes());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = q[k] / static_cast<double>(data.count(k));
  return w;
}

double sech2(double t) { return 1.0 - t * t; }  // given t = tanh(u)

constexpr std::size_t kChunk = 512;

}  // namespace

double empirical_01_loss(const std::function<std::size_t(PointView)>& predict, const TrainingDataset& data,
                         const SimplexVector& q) {
  check_q(data, q);
  const std::vector<double> w = class_weights(data, q);
  double loss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (predict(data.point(i)) != data.label(i)) loss += w[data.label(i)];
  }
  return loss;
}

double empirical_01_loss(const ScorerModel& model, const TrainingDataset& data, const SimplexVector& q) {
  check_model(model, data);
  return empirical_01_loss([&](PointView r) { return model.predict(r); }, data, q);
}

double empirical_01_loss(const MonotoneClassifier& clf, const TrainingDataset& data, const SimplexVector& q) {
  if (clf.num_classes() != data.num_classes()) throw Error(ErrorCode::DimensionMismatch, "class counts differ");
  return empirical_01_loss([&](PointView r) { return clf.classify(r, q); }, data, q);
}

double homotopy_h(double x, double sigma) { return 0.5 * (1.0 - std::tanh(x / sigma)); }
double homotopy_g(double x, double sigma) { return 0.5 * (std::tanh((x - 0.5) / sigma) + 1.0); }

double homotopy_sample_term(std::span<const double> y, std::size_t k, double sigma, std::span<double> dy) {
  const std::size_t n = y.size();
  double s = 0.0;
  for (std::size_t m = 0; m < n; ++m) s += homotopy_g(homotopy_h(y[k] - y[m], sigma), sigma);
  const double ts = std::tanh((s - 0.5) / sigma);
  const double value = 0.5 * (ts + 1.0);
  if (dy.empty()) return value;

  std::fill(dy.begin(), dy.end(), 0.0);
  const double inv = 0.5 / sigma;
  const double gs = inv * sech2(ts);
  for (std::size_t m = 0; m < n; ++m) {
    if (m == k) continue;  // y_k - y_k is constant
    const double th = std::tanh((y[k] - y[m]) / sigma);
    const double hv = 0.5 * (1.0 - th);
    const double tg = std::tanh((hv - 0.5) / sigma);
    const double d = gs * (inv * sech2(tg)) * (-inv * sech2(th));
    dy[k] += d;
    dy[m] -= d;
  }
  return value;
}

namespace {

// Per-sample objective: w_c * homotopy term (if sigma > 0) + v_c * cross-entropy.
struct Objective {
  std::vector<double> homotopy_w;  // empty = no homotopy term
  double sigma = 1.0;
  std::vector<double> ce_w;        // empty = no cross-entropy term
};

// Returns the sample's weighted contribution; fills ws.dlogits with its
// derivative when `grad` is set.
double sample_objective(const Objective& obj, std::size_t label, ScorerWorkspace& ws, std::vector<double>& dy,
                        bool grad) {
  const std::size_t n = ws.probs.size();
  double value = 0.0;
  if (grad) std::fill(ws.dlogits.begin(), ws.dlogits.end(), 0.0);
  if (!obj.homotopy_w.empty() && obj.homotopy_w[label] != 0.0) {
    const double w = obj.homotopy_w[label];
    value += w * homotopy_sample_term(ws.probs, label, obj.sigma, grad ? std::span<double>(dy) : std::span<double>());
    if (grad) {
      for (double& v : dy) v *= w;
      softmax_backward(ws.probs, dy, ws.dlogits);
    }
  }
  if (!obj.ce_w.empty() && obj.ce_w[label] != 0.0) {
    const double v = obj.ce_w[label];
    const double y = ws.probs[label];
    value += v * -std::log(std::max(y, kSoftmaxFloor));
    if (grad && y > kSoftmaxFloor) {
      for (std::size_t i = 0; i < n; ++i) ws.dlogits[i] += v * (ws.probs[i] - (i == label ? 1.0 : 0.0));
    }
  }
  return value;
}

double objective_value(const ScorerModel& model, const TrainingDataset& data, const Objective& obj, Execution exec) {
  return chunked_sum(data.size(), kChunk, exec, [&](std::size_t begin, std::size_t end) {
    ScorerWorkspace ws = model.workspace();
    std::vector<double> dy(ws.probs.size());
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      model.forward(data.point(i), ws);
      s += sample_objective(obj, data.label(i), ws, dy, false);
    }
    return s;
  });
}

std::vector<double> objective_gradient(const ScorerModel& model, const TrainingDataset& data, const Objective& obj,
                                       Execution exec) {
  std::vector<double> grad(model.num_parameters(), 0.0);
  chunked_vector_sum(
      data.size(), kChunk, grad.size(), exec,
      [&](std::size_t begin, std::size_t end, std::span<double> acc) {
        ScorerWorkspace ws = model.workspace();
        std::vector<double> dy(ws.probs.size());
        for (std::size_t i = begin; i < end; ++i) {
          model.forward(data.point(i), ws);
          sample_objective(obj, data.label(i), ws, dy, true);
          model.backward(data.point(i), ws, 1.0, acc);
        }
      },
      grad);
  return grad;
}

Objective homotopy_objective(const TrainingDataset& data, const SimplexVector& q, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::Config, "sigma must be positive");
  return Objective{class_weights(data, q), sigma, {}};
}

Objective cross_entropy_objective(const TrainingDataset& data, const SimplexVector& q) {
  return Objective{{}, 1.0, class_weights(data, q)};
}

}  // namespace

double homotopy_loss(const ScorerModel& model, const TrainingDataset& data, const SimplexVector& q, double sigma,
                     Execution exec) {
  check_q(data, q);
  check_model(model, data);
  return objective_value(model, data, homotopy_objective(data, q, sigma), exec);
}

std::vector<double> loss_gradient(const ScorerModel& model, const TrainingDataset& data, const SimplexVector& q,
                                  double sigma, Execution exec) {
  check_q(data, q);
  check_model(model, data);
  return objective_gradient(model, data, homotopy_objective(data, q, sigma), exec);
}

double prevalence_weighted_cross_entropy(const ScorerModel& model, const TrainingDataset& data,
                                         const SimplexVector& q, Execution exec) {
  check_q(data, q);
  check_model(model, data);
  return objective_value(model, data, cross_entropy_objective(data, q), exec);
}

std::vector<double> cross_entropy_gradient(const ScorerModel& model, const TrainingDataset& data,
                                           const SimplexVector& q, Execution exec) {
  check_q(data, q);
  check_model(model, data);
  return objective_gradient(model, data, cross_entropy_objective(data, q), exec);
}

// ---- pairwise family sweep ---------------------------------------------------

void HomotopySchedule::validate() const {
  if (sigmas.empty()) throw Error(ErrorCode::Config, "sigma schedule is empty");
  for (double s : sigmas) {
    if (!(s > 0.0)) throw Error(ErrorCode::Config, "sigma values must be positive");
  }
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::Config, "learning rate must be positive");
  if (epochs == 0) throw Error(ErrorCode::Config, "epochs must be positive");
  if (cross_entropy_weight < 0.0) throw Error(ErrorCode::Config, "cross-entropy weight must be non-negative");
}

bool HomotopySchedule::increasing() const {
  for (std::size_t i = 1; i < sigmas.size(); ++i) {
    if (sigmas[i] > sigmas[i - 1]) return true;
  }
  return false;
}

namespace {

class Optimizer {
 public:
  Optimizer(const TrainingDataset& data, const HomotopySchedule& schedule, std::uint64_t seed)
      : data_(data), schedule_(schedule), seed_(seed), order_(data.size()) {}

  void run(ScorerModel& model, const Objective& obj) {
    if (schedule_.batching == Batching::FullBatch) {
      for (std::size_t e = 0; e < schedule_.epochs; ++e) {
        const std::vector<double> g = objective_gradient(model, data_, obj, Execution::Parallel);
        auto p = model.parameters();
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= schedule_.learning_rate * g[i];
      }
      return;
    }
    // Per-sample steps on N times the sample's share, so that an epoch makes
    // the same expected progress as N full-batch steps.
    const double n = static_cast<double>(data_.size());
    Objective scaled = obj;
    for (double& w : scaled.homotopy_w) w *= n;
    for (double& w : scaled.ce_w) w *= n;
    ScorerWorkspace ws = model.workspace();
    std::vector<double> dy(ws.probs.size());
    std::vector<double> grad(model.num_parameters());
    for (std::size_t e = 0; e < schedule_.epochs; ++e) {
      shuffle();
      for (std::size_t idx : order_) {
        const PointView x = data_.point(idx);
        model.forward(x, ws);
        sample_objective(scaled, data_.label(idx), ws, dy, true);
        std::fill(grad.begin(), grad.end(), 0.0);
        model.backward(x, ws, 1.0, grad);
        auto p = model.parameters();
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= schedule_.learning_rate * grad[i];
      }
    }
  }

 private:
  void shuffle() {
    CounterRng rng(seed_, ++epoch_counter_);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    for (std::size_t i = order_.size(); i > 1; --i) std::swap(order_[i - 1], order_[rng.below(i)]);
  }

  const TrainingDataset& data_;
  const HomotopySchedule& schedule_;
  std::uint64_t seed_;
  std::uint64_t epoch_counter_ = 0;
  std::vector<std::size_t> order_;
};

SimplexVector edge(double alpha) { return SimplexVector::make({alpha, 1.0 - alpha}); }

ScorerArchitecture binary_arch(ScorerArchitecture arch, const TrainingDataset& data) {
  arch.input_dim = data.dim();
  arch.classes = 2;
  return arch;
}

}  // namespace

PairwiseFamily train_pairwise_family(const TrainingDataset& data, std::size_t j, std::size_t k,
                                     const PrevalenceGrid& grid, const HomotopySchedule& schedule,
                                     const ScorerArchitecture& arch, std::uint64_t seed) {
  schedule.validate();
  const TrainingDataset pair = data.pair_subset(j, k);
  PairwiseFamily fam{j, k, grid, {}, seed, {}, "homotopy"};
  ScorerModel model = ScorerModel::random(binary_arch(arch, pair), seed);
  Optimizer opt(pair, schedule, seed);

  Objective init = homotopy_objective(pair, edge(grid[0]), schedule.sigmas.front());
  init.ce_w = class_weights(pair, pair.training_prevalence());
  for (double& w : init.ce_w) w *= schedule.cross_entropy_weight;
  opt.run(model, init);
  fam.sigma_history.push_back(schedule.sigmas.front());

  // A single-sigma schedule has no continuation steps; reuse its only value.
  const std::size_t first = schedule.sigmas.size() > 1 ? 1 : 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const SimplexVector q = edge(grid[i]);
    for (std::size_t s = first; s < schedule.sigmas.size(); ++s) {
      opt.run(model, homotopy_objective(pair, q, schedule.sigmas[s]));
      fam.sigma_history.push_back(schedule.sigmas[s]);
    }
    fam.models.push_back(model);
  }
  return fam;
}

PairwiseFamily train_cross_entropy_family(const TrainingDataset& data, std::size_t j, std::size_t k,
                                          const PrevalenceGrid& grid, const HomotopySchedule& schedule,
                                          const ScorerArchitecture& arch, std::uint64_t seed) {
  schedule.validate();
  const TrainingDataset pair = data.pair_subset(j, k);
  PairwiseFamily fam{j, k, grid, {}, seed, {}, "cross_entropy"};
  ScorerModel model = ScorerModel::random(binary_arch(arch, pair), seed);
  Optimizer opt(pair, schedule, seed);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    opt.run(model, cross_entropy_objective(pair, edge(grid[i])));
    fam.models.push_back(model);
  }
  return fam;
}

// ---- trained families as classifiers ----------------------------------------

namespace {

std::size_t nearest_index(const PrevalenceGrid& grid, double alpha) {
  const auto& v = grid.values();
  const auto it = std::lower_bound(v.begin(), v.end(), alpha);
  if (it == v.begin()) return 0;
  if (it == v.end()) return v.size() - 1;
  const std::size_t hi = static_cast<std::size_t>(it - v.begin());
  return (alpha - v[hi - 1] <= v[hi] - alpha) ? hi - 1 : hi;
}

}  // namespace

TrainedFamilyClassifier::TrainedFamilyClassifier(std::size_t num_classes, std::vector<PairwiseFamily> families)
    : k_(num_classes), families_(std::move(families)) {
  for (std::size_t f = 0; f < families_.size(); ++f) {
    const auto& fam = families_[f];
    if (fam.j >= k_ || fam.k >= k_ || fam.j == fam.k) throw Error(ErrorCode::BadPair, "family pair out of range");
    if (fam.models.size() != fam.grid.size()) {
      throw Error(ErrorCode::DimensionMismatch, "family needs one model per grid value");
    }
    index_[{std::min(fam.j, fam.k), std::max(fam.j, fam.k)}] = f;
  }
}

std::size_t TrainedFamilyClassifier::classify(PointView r, const SimplexVector& q) const {
  if (q.size() != k_) throw Error(ErrorCode::DimensionMismatch, "q length differs from class count");
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < k_; ++i) {
    if (q[i] > 0.0) support.push_back(i);
  }
  if (support.size() == 1) return support.front();
  if (support.size() != 2) throw Error(ErrorCode::Config, "trained families only answer on pairwise edges");
  const auto it = index_.find({support[0], support[1]});
  if (it == index_.end()) throw Error(ErrorCode::Config, "no trained family for this class pair");
  const PairwiseFamily& fam = families_[it->second];
  const ScorerModel& model = fam.models[nearest_index(fam.grid, q[fam.j])];
  return model.predict(r) == 0 ? fam.j : fam.k;
}

// ---- Conjecture probe -------------------------------------------------------

SoftmaxFamily softmax_family(const PairwiseFamily& family) {
  return [&family](PointView r, double q1) {
    const ScorerModel& m = family.models[nearest_index(family.grid, q1)];
    const std::vector<double> y = m.softmax(r);
    return std::make_pair(y[0], y[1]);
  };
}

SoftmaxFamily oracle_logistic_family(DensityPtr p1, DensityPtr p2) {
  return [p1 = std::move(p1), p2 = std::move(p2)](PointView r, double q1) {
    const double a = q1 * effective_density(*p1, r);
    const double b = (1.0 - q1) * effective_density(*p2, r);
    if (!(a + b > 0.0)) return std::make_pair(0.5, 0.5);
    return std::make_pair(a / (a + b), b / (a + b));
  };
}

ConjectureReport conjecture_probe(const SoftmaxFamily& family, const PrevalenceGrid& grid, PointView r,
                                  std::optional<double> analytic) {
  ConjectureReport rep;
  rep.r.assign(r.begin(), r.end());
  std::vector<double> d(grid.size()), s1(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto [a, b] = family(r, grid[i]);
    s1[i] = a;
    d[i] = a - b;
  }
  bool found = false;
  for (std::size_t i = 0; i < grid.size() && !found; ++i) {
    if (d[i] == 0.0) {
      rep.q_low = rep.q_high = rep.crossing = grid[i];
      found = true;
    } else if (i + 1 < grid.size() && (d[i] < 0.0) != (d[i + 1] < 0.0) && d[i + 1] != 0.0) {
      rep.q_low = grid[i];
      rep.q_high = grid[i + 1];
      rep.crossing = grid[i] + (grid[i + 1] - grid[i]) * d[i] / (d[i] - d[i + 1]);
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::NoCrossing, "S_1 - S_2 does not change sign on the grid");
  rep.analytic = analytic;
  if (analytic) rep.discrepancy = std::abs(rep.crossing - *analytic);

  const std::size_t ref = nearest_index(grid, 0.5);
  rep.scaling_reference = grid[ref];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double predicted = grid[i] / grid[ref] * s1[ref];
    rep.scaling_max_residual = std::max(rep.scaling_max_residual, std::abs(s1[i] - predicted));
  }
  return rep;
}

}  // namespace lsq
