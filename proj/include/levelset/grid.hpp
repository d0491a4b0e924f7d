#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "levelset/simplex.hpp"

namespace lsq {

// Axis-aligned box [lo, hi) in R^d.
struct Box {
  Point lo;
  Point hi;

  std::size_t dim() const noexcept { return lo.size(); }
  double volume() const;
  bool contains(PointView r) const;
};

// Regular tensor-product grid of cells over a box. Cells are addressed by a
// flat row-major index (last axis fastest).
class TensorGrid {
 public:
  TensorGrid() = default;
  TensorGrid(Point lo, Point hi, std::vector<std::size_t> shape);

  std::size_t dim() const noexcept { return lo_.size(); }
  std::size_t size() const noexcept { return size_; }
  const Point& lo() const noexcept { return lo_; }
  const Point& hi() const noexcept { return hi_; }
  const std::vector<std::size_t>& shape() const noexcept { return shape_; }

  double cell_volume() const noexcept { return cell_volume_; }
  double step(std::size_t axis) const { return (hi_[axis] - lo_[axis]) / static_cast<double>(shape_[axis]); }
  Point center(std::size_t flat) const;
  void center_into(std::size_t flat, Point& out) const;
  Box cell(std::size_t flat) const;
  // Cell containing r; the upper boundary of the grid belongs to the last cell.
  std::optional<std::size_t> locate(PointView r) const;

  // Same box, every axis refined by `factor`.
  TensorGrid refined(std::size_t factor) const;

 private:
  Point lo_;
  Point hi_;
  std::vector<std::size_t> shape_;
  std::size_t size_ = 0;
  double cell_volume_ = 0.0;
};

}  // namespace lsq
