#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <span>
#include <utility>
#include <vector>

#include "levelset/classifier.hpp"
#include "levelset/density.hpp"
#include "levelset/parallel.hpp"
#include "levelset/probing.hpp"
#include "levelset/scorer.hpp"

namespace lsq {

// Samples grouped by class, stored contiguously (class 0 first).
class TrainingDataset {
 public:
  // Throws EmptyClass if a class has no samples, DimensionMismatch on ragged points.
  static TrainingDataset make(const std::vector<std::vector<Point>>& per_class);
  static TrainingDataset from_samples(std::span<const LabeledSample> samples, std::size_t num_classes);

  std::size_t num_classes() const noexcept { return offsets_.size() - 1; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t count(std::size_t k) const { return offsets_[k + 1] - offsets_[k]; }
  std::size_t label(std::size_t i) const { return labels_[i]; }
  PointView point(std::size_t i) const { return PointView(features_.data() + i * dim_, dim_); }
  // s_k / N.
  SimplexVector training_prevalence() const;
  // Classes j and k only, relabelled 0 (j) and 1 (k).
  TrainingDataset pair_subset(std::size_t j, std::size_t k) const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> features_;
  std::vector<std::size_t> labels_;
  std::vector<std::size_t> offsets_{0};
};

// sum_k (q_k / s_k) sum_j 1[predict(r_jk) != k].
double empirical_01_loss(const std::function<std::size_t(PointView)>& predict, const TrainingDataset& data,
                         const SimplexVector& q);
double empirical_01_loss(const ScorerModel& model, const TrainingDataset& data, const SimplexVector& q);
double empirical_01_loss(const MonotoneClassifier& clf, const TrainingDataset& data, const SimplexVector& q);

// h(x) = (1 - tanh(x / s)) / 2 and g(x) = (tanh((x - 1/2) / s) + 1) / 2.
double homotopy_h(double x, double sigma);
double homotopy_g(double x, double sigma);

// g(sum_m g(h(y_k - y_m))) for one sample of class k with softmax output y, the
// sum running over every m including k. If dy is non-empty it receives the
// derivative with respect to y.
double homotopy_sample_term(std::span<const double> y, std::size_t k, double sigma, std::span<double> dy = {});

// Prevalence-weighted homotopy objective and its exact gradient.
double homotopy_loss(const ScorerModel& model, const TrainingDataset& data, const SimplexVector& q, double sigma,
                     Execution exec = Execution::Parallel);
std::vector<double> loss_gradient(const ScorerModel& model, const TrainingDataset& data, const SimplexVector& q,
                                  double sigma, Execution exec = Execution::Parallel);

inline constexpr double kSoftmaxFloor = 1e-12;

// sum_k (q_k / s_k) sum_j -log max(y_jkk, 1e-12).
double prevalence_weighted_cross_entropy(const ScorerModel& model, const TrainingDataset& data,
                                         const SimplexVector& q, Execution exec = Execution::Parallel);
std::vector<double> cross_entropy_gradient(const ScorerModel& model, const TrainingDataset& data,
                                           const SimplexVector& q, Execution exec = Execution::Parallel);

enum class Batching {
  FullBatch,  // one gradient step per epoch on the whole objective
  PerSample,  // one step per sample per epoch, visiting samples in a seeded random order
};

struct HomotopySchedule {
  std::vector<double> sigmas{1.0, 2.0, 4.0};
  double learning_rate = 0.01;
  std::size_t epochs = 15;
  Batching batching = Batching::PerSample;
  double cross_entropy_weight = 1.0;  // weight of the cross-entropy term in the first optimisation

  static HomotopySchedule decreasing() {
    HomotopySchedule s;
    s.sigmas = {4.0, 2.0, 1.0};
    return s;
  }
  void validate() const;
  // True when some sigma exceeds its predecessor (the default order does).
  bool increasing() const;
};

// One trained binary model per grid value for the class pair (j, k); output 0
// is class j and output 1 is class k. The model at grid index i was trained at
// q = (grid[i] on j, 1 - grid[i] on k).
struct PairwiseFamily {
  std::size_t j = 0;
  std::size_t k = 1;
  PrevalenceGrid grid = PrevalenceGrid::standard();
  std::vector<ScorerModel> models;
  std::uint64_t seed = 0;
  std::vector<double> sigma_history;  // sigmas used, in order, at each grid point
  std::string objective = "homotopy";
};

// Warm-started sweep: the first model minimises the homotopy loss at the first
// grid value and first sigma plus the cross-entropy at the training prevalence;
// every grid value then runs the remaining sigmas starting from the previous
// model. Throws EmptyClass.
PairwiseFamily train_pairwise_family(const TrainingDataset& data, std::size_t j, std::size_t k,
                                     const PrevalenceGrid& grid, const HomotopySchedule& schedule,
                                     const ScorerArchitecture& arch, std::uint64_t seed);

// Same sweep under the prevalence-weighted cross-entropy at each grid value.
PairwiseFamily train_cross_entropy_family(const TrainingDataset& data, std::size_t j, std::size_t k,
                                          const PrevalenceGrid& grid, const HomotopySchedule& schedule,
                                          const ScorerArchitecture& arch, std::uint64_t seed);

// Probes trained families as a classifier on pairwise edges of the simplex.
// The model used is the one whose grid value is nearest to q_j.
class TrainedFamilyClassifier final : public MonotoneClassifier {
 public:
  TrainedFamilyClassifier(std::size_t num_classes, std::vector<PairwiseFamily> families);

  std::size_t num_classes() const override { return k_; }
  // Throws Config when q has more than two nonzero entries or no family covers the pair.
  std::size_t classify(PointView r, const SimplexVector& q) const override;
  const std::vector<PairwiseFamily>& families() const noexcept { return families_; }

 private:
  std::size_t k_;
  std::vector<PairwiseFamily> families_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> index_;
};

// Binary softmax outputs (S_1, S_2) of a family member at prevalence (q1, 1 - q1).
using SoftmaxFamily = std::function<std::pair<double, double>(PointView r, double q1)>;

SoftmaxFamily softmax_family(const PairwiseFamily& family);
// Posteriors of two known densities: S_1 = q1 P_1 / (q1 P_1 + (1 - q1) P_2).
SoftmaxFamily oracle_logistic_family(DensityPtr p1, DensityPtr p2);

struct ConjectureReport {
  Point r;
  double q_low = 0.0;   // grid bracket of the sign change of S_1 - S_2
  double q_high = 0.0;
  double crossing = 0.0;  // linear interpolation inside the bracket
  std::optional<double> analytic;
  std::optional<double> discrepancy;  // |crossing - analytic|
  double scaling_reference = 0.0;     // q1' used in the scaling check
  double scaling_max_residual = 0.0;  // max_i |S_1(q_i) - (q_i / q1') S_1(q1')|
};

// Throws NoCrossing if S_1 - S_2 keeps its sign over the grid.
ConjectureReport conjecture_probe(const SoftmaxFamily& family, const PrevalenceGrid& grid, PointView r,
                                  std::optional<double> analytic = std::nullopt);

}  // namespace lsq
