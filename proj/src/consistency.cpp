#include "levelset/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "levelset/error.hpp"

namespace lsq {

namespace {

using Kind = ExtendedRatio::Kind;
constexpr double kInf = std::numeric_limits<double>::infinity();
// Infinite log bounds are replaced by +-this when enumerating vertices.
const double kLogCap = std::log(1e12);

bool on_support_row(const RatioMatrix& m, std::size_t j) {
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (k == j) continue;
    const Kind kd = m(j, k).kind();
    if (kd == Kind::Infinite || kd == Kind::Indeterminate) return false;
  }
  return true;
}

void require_interior(const SimplexVector& chi, std::size_t k) {
  if (chi.size() != k) throw Error(ErrorCode::DimensionMismatch, "chi length differs from matrix size");
  if (!chi.interior()) throw Error(ErrorCode::InteriorRequired, "test prevalence must be interior");
}

double relative_residual(double product, double target) { return std::abs(product - target) / target; }

// Product on [0, inf]; nullopt for 0 * inf.
std::optional<ExtendedRatio> multiply(const ExtendedRatio& a, const ExtendedRatio& b) {
  const bool zero = a.kind() == Kind::Zero || b.kind() == Kind::Zero;
  const bool inf = a.kind() == Kind::Infinite || b.kind() == Kind::Infinite;
  if (zero && inf) return std::nullopt;
  if (zero) return ExtendedRatio::zero();
  if (inf) return ExtendedRatio::infinite();
  return ExtendedRatio::from_double(a.value() * b.value());
}

}  // namespace

RatioMatrix make_ratio_matrix(std::size_t k) {
  RatioMatrix m(k, ExtendedRatio::indeterminate());
  for (std::size_t i = 0; i < k; ++i) m(i, i) = ExtendedRatio::finite(1.0);
  return m;
}

RatioMatrix ratio_matrix_from_densities(const DensityList& densities, PointView r) {
  const std::size_t k = densities.size();
  RatioMatrix m = make_ratio_matrix(k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t c = 0; c < k; ++c) {
      if (j != c) m(j, c) = density_ratio(densities, j, c, r);
    }
  }
  return m;
}

RatioMatrix ratio_matrix_from_values(const std::vector<std::vector<double>>& values) {
  const std::size_t k = values.size();
  RatioMatrix m = make_ratio_matrix(k);
  for (std::size_t j = 0; j < k; ++j) {
    if (values[j].size() != k) throw Error(ErrorCode::DimensionMismatch, "ratio matrix must be square");
    for (std::size_t c = 0; c < k; ++c) {
      if (j == c) {
        if (values[j][c] != 1.0) throw Error(ErrorCode::Config, "ratio matrix diagonal must be 1");
        continue;
      }
      const double v = values[j][c];
      if (v < 0.0) throw Error(ErrorCode::Config, "density ratios are non-negative");
      m(j, c) = ExtendedRatio::from_double(v);
    }
  }
  return m;
}

RatioMatrix permute(const RatioMatrix& m, const std::vector<std::size_t>& perm) {
  if (perm.size() != m.size()) throw Error(ErrorCode::DimensionMismatch, "permutation size differs");
  RatioMatrix out(m.size());
  for (std::size_t a = 0; a < m.size(); ++a) {
    for (std::size_t b = 0; b < m.size(); ++b) out(a, b) = m(perm[a], perm[b]);
  }
  return out;
}

IdentityReport ratio_identity_check(const RatioMatrix& m, double tol) {
  const std::size_t k = m.size();
  IdentityReport rep;
  auto fail = [&](std::size_t j, std::size_t c, std::size_t x, double res) {
    rep.violations.push_back({j, c, x, res});
    rep.max_residual = std::max(rep.max_residual, res);
    rep.passed = false;
  };

  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t c = 0; c < k; ++c) {
      if (j != c && !m(j, c).is_determinate()) ++rep.indeterminate_entries;
    }
  }

  // Reciprocity.
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t c = j + 1; c < k; ++c) {
      const ExtendedRatio& a = m(j, c);
      const ExtendedRatio& b = m(c, j);
      if (!a.is_determinate() || !b.is_determinate()) continue;
      if (a.is_finite() && b.is_finite()) {
        const double res = std::abs(a.value() * b.value() - 1.0);
        rep.max_residual = std::max(rep.max_residual, res);
        if (res > tol) fail(j, c, c, res);
      } else if (!(a == b.reciprocal())) {
        fail(j, c, c, kInf);
      }
    }
  }

  // R_{j,c} R_{c,x} = R_{j,x} on distinct triples.
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t c = 0; c < k; ++c) {
      if (c == j) continue;
      for (std::size_t x = 0; x < k; ++x) {
        if (x == j || x == c) continue;
        const ExtendedRatio& a = m(j, c);
        const ExtendedRatio& b = m(c, x);
        const ExtendedRatio& target = m(j, x);
        if (!a.is_determinate() || !b.is_determinate() || !target.is_determinate()) continue;
        const auto prod = multiply(a, b);
        if (!prod) continue;
        ++rep.triples_checked;
        if (prod->is_finite() && target.is_finite()) {
          const double res = relative_residual(prod->value(), target.value());
          rep.max_residual = std::max(rep.max_residual, res);
          if (res > tol) fail(j, c, x, res);
        } else if (prod->kind() != target.kind()) {
          fail(j, c, x, kInf);
        }
      }
    }
  }
  return rep;
}

ConsistencyPartition support_pattern_partition(const RatioMatrix& m) {
  ConsistencyPartition p;
  for (std::size_t j = 0; j < m.size(); ++j) (on_support_row(m, j) ? p.w : p.v).push_back(j);
  return p;
}

namespace {

bool blocks_consistent(const RatioMatrix& m, const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                       double tol) {
  if (b.empty()) return false;
  for (std::size_t v : a) {
    for (std::size_t w : b) {
      if (m(v, w).kind() != Kind::Infinite || m(w, v).kind() != Kind::Zero) return false;
    }
  }
  RatioMatrix sub = make_ratio_matrix(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t c = 0; c < b.size(); ++c) {
      if (i == c) continue;
      if (!m(b[i], b[c]).is_finite()) return false;
      sub(i, c) = m(b[i], b[c]);
    }
  }
  return ratio_identity_check(sub, tol).passed;
}

}  // namespace

bool is_standard_form(const RatioMatrix& m, std::size_t a_size, double tol) {
  if (a_size > m.size()) return false;
  std::vector<std::size_t> a(a_size), b(m.size() - a_size);
  std::iota(a.begin(), a.end(), std::size_t{0});
  std::iota(b.begin(), b.end(), a_size);
  return blocks_consistent(m, a, b, tol);
}

std::optional<StandardForm> standard_form(const RatioMatrix& m, double tol) {
  // In any standard form the B rows are exactly the rows free of inf and "?",
  // so the candidate split is forced.
  const ConsistencyPartition p = support_pattern_partition(m);
  if (!blocks_consistent(m, p.v, p.w, tol)) return std::nullopt;
  StandardForm sf;
  sf.a_block = p.v;
  sf.b_block = p.w;
  sf.permutation = p.v;
  sf.permutation.insert(sf.permutation.end(), p.w.begin(), p.w.end());
  return sf;
}

ConsistencyPartition partition_wv(const RatioMatrix& m, double tol) {
  const auto sf = standard_form(m, tol);
  if (!sf) throw Error(ErrorCode::NotStandardizable, "no relabelling brings the matrix to block form");
  return {sf->b_block, sf->a_block};
}

std::vector<double> ratio_scores(const RatioMatrix& m, const SimplexVector& chi) {
  const std::size_t k = m.size();
  if (chi.size() != k) throw Error(ErrorCode::DimensionMismatch, "chi length differs from matrix size");
  std::vector<double> out(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    if (!on_support_row(m, j)) continue;
    double denom = 0.0;
    for (std::size_t c = 0; c < k; ++c) denom += chi[c] * (c == j ? 1.0 : m(j, c).value());
    out[j] = denom > 0.0 ? chi[j] / denom : 0.0;
  }
  return out;
}

double total_probability_check(const RatioMatrix& m, const SimplexVector& chi) {
  require_interior(chi, m.size());
  const ConsistencyPartition p = support_pattern_partition(m);
  double sum = 0.0;
  for (std::size_t j : p.w) {
    double denom = 0.0;
    for (std::size_t c : p.w) denom += chi[c] * (c == j ? 1.0 : m(j, c).value());
    sum += chi[j] / denom;
  }
  return std::abs(sum - 1.0);
}

std::vector<double> factor_ratios(const RatioMatrix& m, double tol) {
  const auto sf = standard_form(m, tol);
  if (!sf) throw Error(ErrorCode::Inconsistent, "ratio matrix is not self-consistent");
  std::vector<double> p(m.size(), 0.0);
  const std::size_t ref = sf->b_block.front();
  double mx = 0.0;
  for (std::size_t w : sf->b_block) {
    p[w] = w == ref ? 1.0 : m(ref, w).value();
    mx = std::max(mx, p[w]);
  }
  for (double& v : p) v /= mx;
  return p;
}

// ---- interval feasibility ---------------------------------------------------

namespace {

double safe_log(double v) {
  if (v <= 0.0) return -kInf;
  if (std::isinf(v)) return kInf;
  return std::log(v);
}

// Linked box per unordered pair: (j, k) intersected with the reciprocal of (k, j).
RatioIntervalMatrix link_reciprocals(const RatioIntervalMatrix& im) {
  RatioIntervalMatrix out(im.size());
  for (std::size_t j = 0; j < im.size(); ++j) {
    for (std::size_t k = j + 1; k < im.size(); ++k) {
      const RatioInterval a = im(j, k);
      const RatioInterval b = im(k, j).reciprocal();
      out.set_pair(j, k, {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}, im.violations(j, k));
    }
  }
  return out;
}

using DistMatrix = std::vector<std::vector<double>>;

// Shortest-path closure of x_b - x_a <= log hi(a, b) + tol over the classes in w.
DistMatrix constraint_closure(const RatioIntervalMatrix& im, const std::vector<std::size_t>& w, double tol) {
  const std::size_t n = w.size();
  DistMatrix d(n, std::vector<double>(n, kInf));
  for (std::size_t a = 0; a < n; ++a) {
    d[a][a] = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      const double h = safe_log(im(w[a], w[b]).hi);
      const double l = safe_log(im(w[a], w[b]).lo);
      d[a][b] = std::min(d[a][b], h + tol);
      d[b][a] = std::min(d[b][a], -l + tol);
    }
  }
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t a = 0; a < n; ++a) {
      if (std::isinf(d[a][c])) continue;
      for (std::size_t b = 0; b < n; ++b) d[a][b] = std::min(d[a][b], d[a][c] + d[c][b]);
    }
  }
  return d;
}

bool closure_feasible(const DistMatrix& d) {
  for (std::size_t a = 0; a < d.size(); ++a) {
    if (d[a][a] < 0.0) return false;
  }
  return true;
}

// inf-aware products: the lower product treats 0 * inf as 0, the upper as inf.
double lower_product(double a, double b) { return (a == 0.0 || b == 0.0) ? 0.0 : a * b; }
double upper_product(double a, double b) { return (std::isinf(a) || std::isinf(b)) ? kInf : a * b; }

bool w_admissible(const RatioIntervalMatrix& im, const std::vector<std::size_t>& w, const std::vector<std::size_t>& v) {
  for (std::size_t a : w) {
    for (std::size_t b : w) {
      if (a == b) continue;
      // Some strictly positive, finite value must be allowed.
      if (im(a, b).hi <= 0.0 || std::isinf(im(a, b).lo)) return false;
    }
    for (std::size_t b : v) {
      if (im(a, b).lo > 0.0) return false;  // R_{a,b} = 0 must be allowed
    }
  }
  return true;
}

bool w_feasible(const RatioIntervalMatrix& im, const std::vector<std::size_t>& w, double tol) {
  if (im.size() == 3 && w.size() == 3) return interval_product_feasible(im, tol);
  return difference_constraints_feasible(im, w, tol);
}

// Candidate W sets, largest first, lexicographic within a size.
std::vector<std::vector<std::size_t>> candidate_w_sets(std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > 12) {
    std::vector<std::size_t> all(k);
    std::iota(all.begin(), all.end(), std::size_t{0});
    out.push_back(all);
    return out;
  }
  for (std::size_t size = k; size >= 1; --size) {
    std::vector<bool> pick(k, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(size), true);
    do {
      std::vector<std::size_t> w;
      for (std::size_t i = 0; i < k; ++i) {
        if (pick[i]) w.push_back(i);
      }
      out.push_back(std::move(w));
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return out;
}

// Fixes one variable at a time at the midpoint of its remaining range.
std::vector<double> witness_logs(const RatioIntervalMatrix& im, const std::vector<std::size_t>& w, double tol) {
  const std::size_t n = w.size();
  DistMatrix d = constraint_closure(im, w, tol);
  std::vector<double> x(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double upper = d[0][i];    // x_i - x_0 <= d[0][i]
    const double lower = -d[i][0];   // x_i - x_0 >= -d[i][0]
    double v = 0.0;
    if (std::isfinite(upper) && std::isfinite(lower)) {
      v = 0.5 * (upper + lower);
    } else if (std::isfinite(upper)) {
      v = upper - tol;
    } else if (std::isfinite(lower)) {
      v = lower + tol;
    }
    x[i] = v;
    // Pin x_i - x_0 = v and re-close.
    d[0][i] = std::min(d[0][i], v);
    d[i][0] = std::min(d[i][0], -v);
    for (std::size_t c : {std::size_t{0}, i}) {
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) d[a][b] = std::min(d[a][b], d[a][c] + d[c][b]);
      }
    }
  }
  return x;
}

RatioMatrix matrix_from_logs(std::size_t k, const std::vector<std::size_t>& w, const std::vector<std::size_t>& v,
                             const std::vector<double>& x) {
  RatioMatrix m = make_ratio_matrix(k);
  for (std::size_t a = 0; a < w.size(); ++a) {
    for (std::size_t b = 0; b < w.size(); ++b) {
      if (a != b) m(w[a], w[b]) = ExtendedRatio::finite(std::exp(x[b] - x[a]));
    }
    for (std::size_t c : v) {
      m(w[a], c) = ExtendedRatio::zero();
      m(c, w[a]) = ExtendedRatio::infinite();
    }
  }
  return m;
}

bool logs_feasible(const RatioIntervalMatrix& im, const std::vector<std::size_t>& w, const std::vector<double>& x,
                   double tol) {
  for (std::size_t a = 0; a < w.size(); ++a) {
    for (std::size_t b = a + 1; b < w.size(); ++b) {
      const double diff = x[b] - x[a];
      if (diff > safe_log(im(w[a], w[b]).hi) + tol || diff < safe_log(im(w[a], w[b]).lo) - tol) return false;
    }
  }
  return true;
}

// Dykstra's alternating projection onto the slabs lo <= x_b - x_a <= hi.
std::vector<double> project_logs(const RatioIntervalMatrix& im, const std::vector<std::size_t>& w,
                                 std::vector<double> x, double tol) {
  struct Slab {
    std::size_t a, b;
    double lo, hi;
  };
  std::vector<Slab> slabs;
  for (std::size_t a = 0; a < w.size(); ++a) {
    for (std::size_t b = a + 1; b < w.size(); ++b) {
      slabs.push_back({a, b, safe_log(im(w[a], w[b]).lo) - tol, safe_log(im(w[a], w[b]).hi) + tol});
    }
  }
  std::vector<std::vector<double>> incr(slabs.size(), std::vector<double>(x.size(), 0.0));
  for (int sweep = 0; sweep < 5000; ++sweep) {
    double moved = 0.0;
    for (std::size_t s = 0; s < slabs.size(); ++s) {
      const Slab& sl = slabs[s];
      std::vector<double> y = x;
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += incr[s][i];
      const double diff = y[sl.b] - y[sl.a];
      const double shift = diff > sl.hi ? diff - sl.hi : (diff < sl.lo ? diff - sl.lo : 0.0);
      std::vector<double> p = y;
      p[sl.b] -= 0.5 * shift;
      p[sl.a] += 0.5 * shift;
      for (std::size_t i = 0; i < y.size(); ++i) {
        incr[s][i] = y[i] - p[i];
        moved = std::max(moved, std::abs(p[i] - x[i]));
      }
      x = std::move(p);
    }
    if (moved < 1e-13 && logs_feasible(im, w, x, tol)) break;
  }
  const double x0 = x[0];
  for (double& v : x) v -= x0;
  return x;
}

}  // namespace

bool interval_product_feasible(const RatioIntervalMatrix& im, double tol) {
  if (im.size() != 3) throw Error(ErrorCode::DimensionMismatch, "interval product test is for three classes");
  const RatioIntervalMatrix linked = link_reciprocals(im);
  const RatioInterval& a = linked(0, 1);
  const RatioInterval& b = linked(1, 2);
  const RatioInterval& c = linked(0, 2);
  const double pair_slack = std::exp(2.0 * tol);
  for (const RatioInterval* iv : {&a, &b, &c}) {
    if (iv->hi <= 0.0 || std::isinf(iv->lo) || iv->lo > iv->hi * pair_slack) return false;
  }
  const double slack = std::exp(3.0 * tol);
  return lower_product(a.lo, b.lo) <= c.hi * slack && c.lo <= upper_product(a.hi, b.hi) * slack;
}

bool difference_constraints_feasible(const RatioIntervalMatrix& im, const std::vector<std::size_t>& w, double tol) {
  const RatioIntervalMatrix linked = link_reciprocals(im);
  for (std::size_t a : w) {
    for (std::size_t b : w) {
      if (a != b && (linked(a, b).hi <= 0.0 || std::isinf(linked(a, b).lo))) return false;
    }
  }
  return closure_feasible(constraint_closure(linked, w, tol));
}

FeasibleSet feasible_set(const RatioIntervalMatrix& im, const SimplexVector& chi, double tol) {
  const std::size_t k = im.size();
  require_interior(chi, k);
  FeasibleSet fs;
  fs.pair_boxes = link_reciprocals(im);
  const RatioIntervalMatrix& box = fs.pair_boxes;

  for (const auto& w : candidate_w_sets(k)) {
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i < k; ++i) {
      if (!std::binary_search(w.begin(), w.end(), i)) v.push_back(i);
    }
    if (!w_admissible(box, w, v) || !w_feasible(box, w, tol)) continue;
    fs.feasible = true;
    fs.partition = {w, v};
    break;
  }
  if (!fs.feasible) return fs;

  const auto& w = fs.partition.w;
  const auto& v = fs.partition.v;
  const std::vector<double> x = witness_logs(box, w, tol);
  fs.witness = matrix_from_logs(k, w, v, x);
  fs.witness_scores = ratio_scores(*fs.witness, chi);
  fs.witness_label = static_cast<std::size_t>(
      std::max_element(fs.witness_scores.begin(), fs.witness_scores.end()) - fs.witness_scores.begin());

  // Corners of the chain boxes (w[i], w[i+1]).
  const std::size_t chain = w.size() - 1;
  const std::size_t corners = std::size_t{1} << chain;
  double u_sum = 0.0;
  fs.u_interval = {kInf, -kInf};
  for (std::size_t mask = 0; mask < corners; ++mask) {
    VertexEvaluation ve;
    std::vector<double> xv(w.size(), 0.0);
    for (std::size_t i = 0; i < chain; ++i) {
      const RatioInterval& iv = box(w[i], w[i + 1]);
      const double lo = std::max(safe_log(iv.lo), -kLogCap);
      const double hi = std::min(safe_log(iv.hi), kLogCap);
      const double y = (mask >> i) & 1U ? hi : lo;
      xv[i + 1] = xv[i] + y;
    }
    if (!logs_feasible(box, w, xv, tol)) {
      xv = project_logs(box, w, xv, tol);
      ve.projected = true;
      ++fs.projected_vertices;
    }
    for (std::size_t i = 0; i < chain; ++i) ve.chain_log_ratios.push_back(xv[i + 1] - xv[i]);
    const std::vector<double> s = ratio_scores(matrix_from_logs(k, w, v, xv), chi);
    const auto best = std::max_element(s.begin(), s.end());
    ve.label = static_cast<std::size_t>(best - s.begin());
    ve.uncertainty = 1.0 - *best;
    u_sum += ve.uncertainty;
    fs.u_interval.first = std::min(fs.u_interval.first, ve.uncertainty);
    fs.u_interval.second = std::max(fs.u_interval.second, ve.uncertainty);
    if (ve.label != fs.witness_label) fs.label_robust = false;
    fs.vertices.push_back(std::move(ve));
  }
  fs.summary_u = u_sum / static_cast<double>(fs.vertices.size());
  return fs;
}

// ---- binary reconstruction and normalisation --------------------------------

BinaryReconstruction reconstruct_binary_densities(const std::function<double(PointView)>& ratio,
                                                  const TensorGrid& grid) {
  BinaryReconstruction out;
  const std::size_t n = grid.size();
  const double vol = grid.cell_volume();
  out.ratio_at_cells.resize(n);
  std::vector<int> region(n);
  double integral[3] = {0.0, 0.0, 0.0};  // sum of (R - 1) vol per region
  Point c;
  for (std::size_t i = 0; i < n; ++i) {
    grid.center_into(i, c);
    const double r = ratio(c);
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw Error(ErrorCode::NonPositive, "ratio must be positive and finite on the grid");
    }
    out.ratio_at_cells[i] = r;
    region[i] = std::abs(r - 1.0) <= kUnitRatioTolerance ? 0 : (r < 1.0 ? 1 : 2);
    out.measure[region[i]] += vol;
    integral[region[i]] += (r - 1.0) * vol;
  }
  if (out.measure[1] == 0.0 || out.measure[2] == 0.0) {
    throw Error(ErrorCode::DegenerateRegions, "both {R<1} and {R>1} need positive measure");
  }
  // alpha_0 = alpha_1 = a, alpha_2 = b:
  //   a (I0 + I1) + b I2 = 0        (equal masses)
  //   a (mu0 + mu1) + b mu2 = 1     (unit mass of P1)
  const double a11 = integral[0] + integral[1], a12 = integral[2];
  const double a21 = out.measure[0] + out.measure[1], a22 = out.measure[2];
  const double det = a11 * a22 - a12 * a21;
  const double a = -a12 / det;
  const double b = a11 / det;
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::NonPositive, "reconstructed density levels are not positive");
  out.alpha[0] = a;
  out.alpha[1] = a;
  out.alpha[2] = b;

  std::vector<double> v1(n), v2(n);
  for (std::size_t i = 0; i < n; ++i) {
    v1[i] = out.alpha[region[i]];
    v2[i] = v1[i] * out.ratio_at_cells[i];
  }
  out.p1 = std::make_shared<PiecewiseConstantDensity>(grid, std::move(v1));
  out.p2 = std::make_shared<PiecewiseConstantDensity>(grid, std::move(v2));
  return out;
}

RatioSource exact_ratio_source(const DensityList& densities) {
  return [densities](std::size_t i, std::size_t j, PointView r) { return density_ratio(densities, i, j, r); };
}

namespace {

TensorGrid halved(const TensorGrid& g) {
  std::vector<std::size_t> shape = g.shape();
  for (auto& s : shape) s = std::max<std::size_t>(1, s / 2);
  return TensorGrid(g.lo(), g.hi(), shape);
}

std::vector<double> integrate_pairs(const DensityList& densities, const RatioSource& ratios, const TensorGrid& grid,
                                    Execution exec) {
  const std::size_t k = densities.size();
  const double vol = grid.cell_volume();
  std::vector<double> sums(k * k, 0.0);
  chunked_vector_sum(
      grid.size(), 256, k * k, exec,
      [&](std::size_t begin, std::size_t end, std::span<double> acc) {
        Point c;
        std::vector<double> p(k);
        for (std::size_t cell = begin; cell < end; ++cell) {
          grid.center_into(cell, c);
          for (std::size_t i = 0; i < k; ++i) p[i] = effective_density(*densities[i], c);
          for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
              if (i == j) continue;
              double f = 0.0;
              if (p[i] > 0.0) {
                const ExtendedRatio rr = ratios(i, j, c);
                if (rr.kind() == ExtendedRatio::Kind::Finite) {
                  f = rr.value() * p[i];
                } else if (rr.kind() != ExtendedRatio::Kind::Zero) {
                  throw Error(ErrorCode::Data, "ratio is not finite where the reference density is positive");
                }
              } else {
                f = p[j];
              }
              acc[i * k + j] += f * vol;
            }
          }
        }
      },
      sums);
  return sums;
}

}  // namespace

std::vector<NormalizationResidual> normalization_check(const DensityList& densities, const RatioSource& ratios,
                                                       const TensorGrid& grid, double tol, Execution exec) {
  const std::size_t k = densities.size();
  for (const auto& d : densities) {
    if (d->dim() != grid.dim()) throw Error(ErrorCode::DimensionMismatch, "density and grid dimensions differ");
  }
  const std::vector<double> fine = integrate_pairs(densities, ratios, grid, exec);
  const std::vector<double> coarse = integrate_pairs(densities, ratios, halved(grid), exec);
  std::vector<NormalizationResidual> out;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      NormalizationResidual r;
      r.i = i;
      r.j = j;
      r.value = fine[i * k + j];
      r.residual = std::abs(r.value - 1.0);
      r.error_estimate = std::abs(fine[i * k + j] - coarse[i * k + j]);
      if (r.error_estimate > tol) {
        throw Error(ErrorCode::QuadratureFailure, "quadrature error estimate " + std::to_string(r.error_estimate) +
                                                      " exceeds tolerance for pair (" + std::to_string(i + 1) + "," +
                                                      std::to_string(j + 1) + ")");
      }
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace lsq
