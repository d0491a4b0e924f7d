#include "levelset/grid.hpp"

#include <cmath>

#include "levelset/error.hpp"

namespace lsq {

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

bool Box::contains(PointView r) const {
  if (r.size() != lo.size()) return false;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(r[i] >= lo[i] && r[i] < hi[i])) return false;
  }
  return true;
}

TensorGrid::TensorGrid(Point lo, Point hi, std::vector<std::size_t> shape)
    : lo_(std::move(lo)), hi_(std::move(hi)), shape_(std::move(shape)) {
  if (lo_.size() != hi_.size() || lo_.size() != shape_.size() || lo_.empty()) {
    throw Error(ErrorCode::DimensionMismatch, "grid lo/hi/shape lengths differ");
  }
  size_ = 1;
  cell_volume_ = 1.0;
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (shape_[i] == 0 || !(hi_[i] > lo_[i])) {
      throw Error(ErrorCode::Config, "grid axis " + std::to_string(i) + " is empty");
    }
    size_ *= shape_[i];
    cell_volume_ *= (hi_[i] - lo_[i]) / static_cast<double>(shape_[i]);
  }
}

void TensorGrid::center_into(std::size_t flat, Point& out) const {
  out.resize(dim());
  for (std::size_t a = dim(); a-- > 0;) {
    const std::size_t idx = flat % shape_[a];
    flat /= shape_[a];
    out[a] = lo_[a] + (static_cast<double>(idx) + 0.5) * step(a);
  }
}

Point TensorGrid::center(std::size_t flat) const {
  Point p;
  center_into(flat, p);
  return p;
}

Box TensorGrid::cell(std::size_t flat) const {
  Box b{Point(dim()), Point(dim())};
  for (std::size_t a = dim(); a-- > 0;) {
    const std::size_t idx = flat % shape_[a];
    flat /= shape_[a];
    b.lo[a] = lo_[a] + static_cast<double>(idx) * step(a);
    b.hi[a] = idx + 1 == shape_[a] ? hi_[a] : lo_[a] + static_cast<double>(idx + 1) * step(a);
  }
  return b;
}

std::optional<std::size_t> TensorGrid::locate(PointView r) const {
  if (r.size() != dim()) return std::nullopt;
  std::size_t flat = 0;
  for (std::size_t a = 0; a < dim(); ++a) {
    if (!(r[a] >= lo_[a] && r[a] <= hi_[a])) return std::nullopt;
    auto idx = static_cast<std::size_t>(std::floor((r[a] - lo_[a]) / step(a)));
    if (idx >= shape_[a]) idx = shape_[a] - 1;
    flat = flat * shape_[a] + idx;
  }
  return flat;
}

TensorGrid TensorGrid::refined(std::size_t factor) const {
  auto shape = shape_;
  for (auto& s : shape) s *= factor;
  return TensorGrid(lo_, hi_, std::move(shape));
}

}  // namespace lsq
