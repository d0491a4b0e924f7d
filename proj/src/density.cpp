#include "levelset/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "levelset/error.hpp"

namespace lsq {

namespace {

void check_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": expected dimension " +
                                                  std::to_string(expected) + ", got " + std::to_string(got));
  }
}

}  // namespace

GaussianParams GaussianParams::make(Point mean, std::vector<std::vector<double>> cov) {
  const std::size_t d = mean.size();
  if (d == 0) throw Error(ErrorCode::DimensionMismatch, "empty mean");
  check_dim(d, cov.size(), "covariance rows");
  GaussianParams p;
  p.mean_ = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(d));
  p.cov_.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    check_dim(d, cov[i].size(), "covariance row");
    for (std::size_t j = 0; j < d; ++j) p.cov_(i, j) = cov[i][j];
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      if (std::abs(p.cov_(i, j) - p.cov_(j, i)) > 1e-12) {
        throw Error(ErrorCode::Config, "covariance is not symmetric");
      }
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(p.cov_);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::Config, "covariance is not positive definite");
  p.chol_l_ = llt.matrixL();
  double log_det_half = 0.0;
  for (Eigen::Index i = 0; i < p.chol_l_.rows(); ++i) log_det_half += std::log(p.chol_l_(i, i));
  p.log_norm_ = -0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi) - log_det_half;
  return p;
}

double gaussian_pdf(const GaussianParams& params, PointView r) {
  const std::size_t d = params.dim();
  check_dim(d, r.size(), "gaussian_pdf");
  const auto& l = params.cholesky_l();
  const auto& mu = params.mean();
  // Forward substitution L z = r - mu, accumulating |z|^2.
  double z_small[8];
  std::vector<double> z_big;
  double* z = z_small;
  if (d > 8) {
    z_big.resize(d);
    z = z_big.data();
  }
  double quad = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double acc = r[i] - mu(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < i; ++j) acc -= l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * z[j];
    z[i] = acc / l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    quad += z[i] * z[i];
  }
  return std::exp(params.log_normalizer() - 0.5 * quad);
}

Point DensityModel::sample(CounterRng&) const {
  throw Error(ErrorCode::Unsampleable, "density has no sampling rule");
}

Point GaussianDensity::sample(CounterRng& rng) const {
  const std::size_t d = params_.dim();
  Eigen::VectorXd z(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) z(static_cast<Eigen::Index>(i)) = rng.normal();
  const Eigen::VectorXd x = params_.mean() + params_.cholesky_l() * z;
  return Point(x.data(), x.data() + x.size());
}

PiecewiseConstantDensity::PiecewiseConstantDensity(std::vector<Box> cells, std::vector<double> values)
    : cells_(std::move(cells)), values_(std::move(values)) {
  if (cells_.empty()) throw Error(ErrorCode::Config, "piecewise density needs at least one cell");
  check_dim(cells_.size(), values_.size(), "piecewise values");
  dim_ = cells_.front().dim();
  for (const auto& c : cells_) {
    check_dim(dim_, c.lo.size(), "cell lower corner");
    check_dim(dim_, c.hi.size(), "cell upper corner");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
      throw Error(ErrorCode::Config, "piecewise values must be finite and non-negative");
    }
    acc += values_[i] * cells_[i].volume();
    cumulative_mass_.push_back(acc);
  }
}

PiecewiseConstantDensity::PiecewiseConstantDensity(TensorGrid grid, std::vector<double> values)
    : dim_(grid.dim()), grid_(std::move(grid)), values_(std::move(values)) {
  check_dim(grid_->size(), values_.size(), "piecewise grid values");
  double acc = 0.0;
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::Config, "piecewise values must be finite and non-negative");
    }
    acc += v * grid_->cell_volume();
    cumulative_mass_.push_back(acc);
  }
}

std::optional<std::size_t> PiecewiseConstantDensity::find_cell(PointView r) const {
  if (grid_) return grid_->locate(r);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i].contains(r)) return i;
  }
  return std::nullopt;
}

double PiecewiseConstantDensity::pdf(PointView r) const {
  check_dim(dim_, r.size(), "piecewise pdf");
  const auto cell = find_cell(r);
  return cell ? values_[*cell] : 0.0;
}

Box PiecewiseConstantDensity::cell(std::size_t i) const { return grid_ ? grid_->cell(i) : cells_.at(i); }

double PiecewiseConstantDensity::total_mass() const {
  return cumulative_mass_.empty() ? 0.0 : cumulative_mass_.back();
}

Point PiecewiseConstantDensity::sample(CounterRng& rng) const {
  const double total = total_mass();
  if (!(total > 0.0)) throw Error(ErrorCode::Unsampleable, "piecewise density has zero mass");
  const double u = rng.uniform01() * total;
  auto it = std::upper_bound(cumulative_mass_.begin(), cumulative_mass_.end(), u);
  std::size_t idx = static_cast<std::size_t>(it - cumulative_mass_.begin());
  if (idx >= values_.size()) idx = values_.size() - 1;
  while (values_[idx] <= 0.0 && idx > 0) --idx;
  const Box b = cell(idx);
  Point p(dim_);
  for (std::size_t a = 0; a < dim_; ++a) p[a] = b.lo[a] + rng.uniform01() * (b.hi[a] - b.lo[a]);
  return p;
}

double CallbackDensity::pdf(PointView r) const {
  check_dim(dim_, r.size(), "callback pdf");
  return pdf_(r);
}

Point CallbackDensity::sample(CounterRng& rng) const {
  if (!sampler_) throw Error(ErrorCode::Unsampleable, "callback density has no sampler");
  return sampler_(rng);
}

double effective_density(const DensityModel& density, PointView r) {
  if (!density.in_support(r)) return 0.0;
  const double v = density.pdf(r);
  return v < kZeroDensity ? 0.0 : v;
}

double mixture_density(const DensityList& densities, const SimplexVector& chi, PointView r) {
  check_dim(densities.size(), chi.size(), "mixture prevalence");
  double total = 0.0;
  for (std::size_t j = 0; j < densities.size(); ++j) {
    if (chi[j] > 0.0) total += chi[j] * effective_density(*densities[j], r);
  }
  return total;
}

ExtendedRatio ExtendedRatio::finite(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::Config, "finite ratio must be positive and bounded");
  }
  return ExtendedRatio(Kind::Finite, v);
}

ExtendedRatio ExtendedRatio::from_double(double v) {
  if (std::isnan(v)) return indeterminate();
  if (v == 0.0) return zero();
  if (std::isinf(v) && v > 0.0) return infinite();
  return finite(v);
}

ExtendedRatio ExtendedRatio::quotient(double numerator, double denominator) {
  const bool num_zero = numerator == 0.0;
  const bool den_zero = denominator == 0.0;
  if (num_zero && den_zero) return indeterminate();
  if (den_zero) return infinite();
  if (num_zero) return zero();
  const double v = numerator / denominator;
  if (v == 0.0) return zero();
  if (std::isinf(v)) return infinite();
  return ExtendedRatio(Kind::Finite, v);
}

double ExtendedRatio::value() const noexcept {
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Finite: return value_;
    case Kind::Infinite: return std::numeric_limits<double>::infinity();
    case Kind::Indeterminate: break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

ExtendedRatio ExtendedRatio::reciprocal() const noexcept {
  switch (kind_) {
    case Kind::Zero: return infinite();
    case Kind::Infinite: return zero();
    case Kind::Finite: return ExtendedRatio(Kind::Finite, 1.0 / value_);
    case Kind::Indeterminate: break;
  }
  return indeterminate();
}

ExtendedRatio density_ratio(const DensityModel& pj, const DensityModel& pk, PointView r) {
  if (&pj == &pk) return ExtendedRatio::finite(1.0);
  return ExtendedRatio::quotient(effective_density(pk, r), effective_density(pj, r));
}

ExtendedRatio density_ratio(const DensityList& densities, std::size_t j, std::size_t k, PointView r) {
  if (j == k) return ExtendedRatio::finite(1.0);
  return density_ratio(*densities.at(j), *densities.at(k), r);
}

std::optional<double> prevalence_function(const DensityModel& pj, const DensityModel& pk, PointView r) {
  if (&pj == &pk) return 0.5;
  const double a = effective_density(pj, r);
  const double b = effective_density(pk, r);
  if (a == 0.0 && b == 0.0) return std::nullopt;
  if (a == 0.0) return 1.0;
  if (b == 0.0) return 0.0;
  return b / (a + b);
}

std::optional<double> prevalence_function(const DensityList& densities, std::size_t j, std::size_t k,
                                          PointView r) {
  if (j == k) return 0.5;
  return prevalence_function(*densities.at(j), *densities.at(k), r);
}

std::vector<LabeledSample> sample_population(const DensityList& densities, const SimplexVector& chi,
                                             std::size_t n, std::uint64_t seed) {
  check_dim(densities.size(), chi.size(), "sample_population prevalence");
  for (std::size_t j = 0; j < densities.size(); ++j) {
    if (chi[j] > 0.0 && !densities[j]->can_sample()) {
      throw Error(ErrorCode::Unsampleable, "class " + std::to_string(j + 1) + " density cannot be sampled");
    }
  }
  std::vector<LabeledSample> out(n);
  const auto weights = chi.weights();
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(seed, i);
    const double u = rng.uniform01();
    double acc = 0.0;
    std::size_t label = weights.size() - 1;
    for (std::size_t j = 0; j < weights.size(); ++j) {
      acc += weights[j];
      if (u < acc && weights[j] > 0.0) {
        label = j;
        break;
      }
    }
    while (weights[label] <= 0.0 && label > 0) --label;
    out[i].label = label;
    out[i].point = densities[label]->sample(rng);
  }
  return out;
}

DensityList gaussian_three_class_example() {
  return {
      std::make_shared<GaussianDensity>(GaussianParams::make({0.0, 1.0}, {{0.49, 0.0}, {0.0, 0.09}})),
      std::make_shared<GaussianDensity>(GaussianParams::make({0.0, -1.0}, {{0.16, 0.0}, {0.0, 0.64}})),
      std::make_shared<GaussianDensity>(GaussianParams::make({1.0, 0.0}, {{0.25, 0.0}, {0.0, 0.01}})),
  };
}

}  // namespace lsq
