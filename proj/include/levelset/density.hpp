#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "levelset/grid.hpp"
#include "levelset/rng.hpp"
#include "levelset/simplex.hpp"

namespace lsq {

// Density values below this are treated as exact zeros so that underflow never
// manufactures an indeterminate 0/0.
inline constexpr double kZeroDensity = 1e-300;

class GaussianParams {
 public:
  // Throws DimensionMismatch on shape errors and Config if the covariance is
  // not symmetric (1e-12) or not positive definite.
  static GaussianParams make(Point mean, std::vector<std::vector<double>> cov);

  std::size_t dim() const noexcept { return mean_.size(); }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& covariance() const noexcept { return cov_; }
  const Eigen::MatrixXd& cholesky_l() const noexcept { return chol_l_; }
  double log_normalizer() const noexcept { return log_norm_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd chol_l_;
  double log_norm_ = 0.0;
};

double gaussian_pdf(const GaussianParams& params, PointView r);

class DensityModel {
 public:
  virtual ~DensityModel() = default;

  virtual std::size_t dim() const = 0;
  virtual double pdf(PointView r) const = 0;
  virtual bool in_support(PointView r) const = 0;

  virtual bool can_sample() const { return false; }
  // Throws Unsampleable unless can_sample().
  virtual Point sample(CounterRng& rng) const;
};

using DensityPtr = std::shared_ptr<const DensityModel>;
using DensityList = std::vector<DensityPtr>;

class GaussianDensity final : public DensityModel {
 public:
  explicit GaussianDensity(GaussianParams params) : params_(std::move(params)) {}

  std::size_t dim() const override { return params_.dim(); }
  double pdf(PointView r) const override { return gaussian_pdf(params_, r); }
  // Gaussians are supported everywhere.
  bool in_support(PointView) const override { return true; }
  bool can_sample() const override { return true; }
  Point sample(CounterRng& rng) const override;

  const GaussianParams& params() const noexcept { return params_; }

 private:
  GaussianParams params_;
};

// Piecewise-constant density over axis-aligned cells; zero outside all cells.
// Values are used as given (no implicit normalisation).
class PiecewiseConstantDensity final : public DensityModel {
 public:
  PiecewiseConstantDensity(std::vector<Box> cells, std::vector<double> values);
  // Cells of a regular grid; lookups are O(d) instead of a scan.
  PiecewiseConstantDensity(TensorGrid grid, std::vector<double> values);

  std::size_t dim() const override { return dim_; }
  double pdf(PointView r) const override;
  bool in_support(PointView r) const override { return pdf(r) > 0.0; }
  bool can_sample() const override { return true; }
  Point sample(CounterRng& rng) const override;

  std::size_t num_cells() const noexcept { return values_.size(); }
  Box cell(std::size_t i) const;
  const std::vector<double>& values() const noexcept { return values_; }
  const std::optional<TensorGrid>& grid() const noexcept { return grid_; }
  // Sum of value * volume over cells.
  double total_mass() const;

 private:
  std::optional<std::size_t> find_cell(PointView r) const;

  std::size_t dim_ = 0;
  std::vector<Box> cells_;
  std::optional<TensorGrid> grid_;
  std::vector<double> values_;
  std::vector<double> cumulative_mass_;
};

class CallbackDensity final : public DensityModel {
 public:
  using PdfFn = std::function<double(PointView)>;
  using SupportFn = std::function<bool(PointView)>;
  using SampleFn = std::function<Point(CounterRng&)>;

  CallbackDensity(std::size_t dim, PdfFn pdf, SupportFn support = {}, SampleFn sampler = {})
      : dim_(dim), pdf_(std::move(pdf)), support_(std::move(support)), sampler_(std::move(sampler)) {}

  std::size_t dim() const override { return dim_; }
  double pdf(PointView r) const override;
  bool in_support(PointView r) const override { return support_ ? support_(r) : pdf_(r) > 0.0; }
  bool can_sample() const override { return static_cast<bool>(sampler_); }
  Point sample(CounterRng& rng) const override;

 private:
  std::size_t dim_;
  PdfFn pdf_;
  SupportFn support_;
  SampleFn sampler_;
};

// pdf(r) with the zero-detection rule applied (off-support or below
// kZeroDensity gives exactly 0).
double effective_density(const DensityModel& density, PointView r);

// Sum_j chi_j P_j(r). Throws DimensionMismatch if sizes differ.
double mixture_density(const DensityList& densities, const SimplexVector& chi, PointView r);

// Value on the extended non-negative half line, with an explicit 0/0 state.
class ExtendedRatio {
 public:
  enum class Kind { Zero, Finite, Infinite, Indeterminate };

  ExtendedRatio() : ExtendedRatio(Kind::Indeterminate, 0.0) {}

  static ExtendedRatio zero() { return ExtendedRatio(Kind::Zero, 0.0); }
  static ExtendedRatio infinite() { return ExtendedRatio(Kind::Infinite, 0.0); }
  static ExtendedRatio indeterminate() { return ExtendedRatio(Kind::Indeterminate, 0.0); }
  // Requires 0 < v < inf; throws Config otherwise.
  static ExtendedRatio finite(double v);
  // 0 -> Zero, +inf -> Infinite, NaN -> Indeterminate, otherwise Finite.
  static ExtendedRatio from_double(double v);
  // numerator / denominator with the support conventions of a density ratio.
  static ExtendedRatio quotient(double numerator, double denominator);

  Kind kind() const noexcept { return kind_; }
  bool is_finite() const noexcept { return kind_ == Kind::Finite; }
  bool is_determinate() const noexcept { return kind_ != Kind::Indeterminate; }
  // Finite payload; 0 for Zero, +inf for Infinite, NaN for Indeterminate.
  double value() const noexcept;
  ExtendedRatio reciprocal() const noexcept;

  friend bool operator==(const ExtendedRatio&, const ExtendedRatio&) = default;

 private:
  ExtendedRatio(Kind k, double v) : kind_(k), value_(v) {}
  Kind kind_;
  double value_;
};

// R_{j,k}(r) = P_k(r) / P_j(r).
ExtendedRatio density_ratio(const DensityModel& pj, const DensityModel& pk, PointView r);
// Same, with the R_{j,j} = 1 convention applied when j == k.
ExtendedRatio density_ratio(const DensityList& densities, std::size_t j, std::size_t k, PointView r);

// q_{j,k}(r) = P_k / (P_k + P_j); nullopt encodes the indeterminate case.
std::optional<double> prevalence_function(const DensityModel& pj, const DensityModel& pk, PointView r);
std::optional<double> prevalence_function(const DensityList& densities, std::size_t j, std::size_t k,
                                          PointView r);

struct LabeledSample {
  Point point;
  std::size_t label = 0;  // 0-based class index
};

// Labels i.i.d. from chi, points from the labelled class density. Sample i
// draws from stream i of `seed`, so the result is independent of threading.
std::vector<LabeledSample> sample_population(const DensityList& densities, const SimplexVector& chi,
                                             std::size_t n, std::uint64_t seed);

// The three-class Gaussian example (diagonal covariances, means (0,1), (0,-1), (1,0)).
DensityList gaussian_three_class_example();

}  // namespace lsq
