#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "levelset/density.hpp"
#include "levelset/grid.hpp"
#include "levelset/matrix.hpp"
#include "levelset/parallel.hpp"
#include "levelset/probing.hpp"

namespace lsq {

// Point-valued induced density-ratio matrix; entry (j, k) is R_{j,k}.
using RatioMatrix = SquareMatrix<ExtendedRatio>;

// Unit diagonal, everything else indeterminate.
RatioMatrix make_ratio_matrix(std::size_t k);
RatioMatrix ratio_matrix_from_densities(const DensityList& densities, PointView r);
// Builds a matrix from doubles: NaN -> "?", 0 -> 0, inf -> inf.
RatioMatrix ratio_matrix_from_values(const std::vector<std::vector<double>>& values);
// P'[a][b] = P[perm[a]][perm[b]].
RatioMatrix permute(const RatioMatrix& m, const std::vector<std::size_t>& perm);

struct IdentityViolation {
  std::size_t j = 0, k = 0, m = 0;  // m == k marks a reciprocity failure of (j, k)
  double residual = 0.0;            // relative residual; +inf for a support-pattern mismatch
};

struct IdentityReport {
  bool passed = true;
  double max_residual = 0.0;
  std::size_t triples_checked = 0;
  std::size_t indeterminate_entries = 0;  // "?" count (off-diagonal)
  std::vector<IdentityViolation> violations;
};

// Checks reciprocity and R_{j,k} R_{k,m} = R_{j,m} on all determinate
// triples. Products 0 * inf are undetermined and skipped.
IdentityReport ratio_identity_check(const RatioMatrix& m, double tol);

struct ConsistencyPartition {
  std::vector<std::size_t> w;  // on-support classes
  std::vector<std::size_t> v;  // off-support classes
};

struct StandardForm {
  std::vector<std::size_t> permutation;  // new position -> original class
  std::vector<std::size_t> a_block;      // original indices of the A block (V)
  std::vector<std::size_t> b_block;      // original indices of the B block (W)
};

// Relabels classes so the matrix reads [[A, inf], [0, B]] with B satisfying the
// multiplicative identity; nullopt if no relabelling works.
std::optional<StandardForm> standard_form(const RatioMatrix& m, double tol);

// Direct predicate: the first `a_size` classes form A, the rest B.
bool is_standard_form(const RatioMatrix& m, std::size_t a_size, double tol);

// W from the B block. Throws NotStandardizable.
ConsistencyPartition partition_wv(const RatioMatrix& m, double tol = 1e-9);

// Partition read off the 0/inf pattern only (W = rows free of inf and "?").
ConsistencyPartition support_pattern_partition(const RatioMatrix& m);

// |sum_{j in W} chi_j / sum_{k in W} chi_k R_{j,k} - 1|. Throws InteriorRequired.
double total_probability_check(const RatioMatrix& m, const SimplexVector& chi);

// Per-class scores chi_j / sum_k chi_k R_{j,k}: rows containing inf or "?"
// score exactly 0 (no division is performed for them).
std::vector<double> ratio_scores(const RatioMatrix& m, const SimplexVector& chi);

// Densities up to scale: zero on V, R_{j,k} = P_k / P_j on W, max = 1.
// Throws Inconsistent if the identity check fails.
std::vector<double> factor_ratios(const RatioMatrix& m, double tol = 1e-9);

// ---- interval feasibility ---------------------------------------------------

struct VertexEvaluation {
  std::vector<double> chain_log_ratios;  // log R along consecutive W classes
  double uncertainty = 0.0;
  std::size_t label = 0;
  bool projected = false;  // vertex was infeasible and moved to the feasible set
};

struct FeasibleSet {
  bool feasible = false;
  ConsistencyPartition partition;
  RatioIntervalMatrix pair_boxes;  // input intervals (reciprocals linked)
  std::optional<RatioMatrix> witness;
  std::vector<VertexEvaluation> vertices;
  double summary_u = 0.0;
  std::pair<double, double> u_interval{0.0, 0.0};
  std::vector<double> witness_scores;
  std::size_t witness_label = 0;
  bool label_robust = true;
  std::size_t projected_vertices = 0;
};

// Exact three-class test: [l12 l23, h12 h23] meets [l13, h13] (log slack 3 tol).
bool interval_product_feasible(const RatioIntervalMatrix& im, double tol);

// Difference-constraint feasibility of x_k - x_j in [log l_jk, log h_jk] over
// the classes in `w` (slack tol per constraint).
bool difference_constraints_feasible(const RatioIntervalMatrix& im, const std::vector<std::size_t>& w, double tol);

// Decides whether self-consistent values exist inside all intervals and, if
// so, summarises the uncertainty over the vertices of the feasible box.
// Throws InteriorRequired.
FeasibleSet feasible_set(const RatioIntervalMatrix& im, const SimplexVector& chi, double tol = 1e-9);

// ---- binary reconstruction and normalisation --------------------------------

struct BinaryReconstruction {
  std::shared_ptr<PiecewiseConstantDensity> p1;
  std::shared_ptr<PiecewiseConstantDensity> p2;
  double alpha[3] = {0.0, 0.0, 0.0};    // P1 level on {R=1}, {R<1}, {R>1}
  double measure[3] = {0.0, 0.0, 0.0};  // Lebesgue measure of the same regions
  std::vector<double> ratio_at_cells;
};

inline constexpr double kUnitRatioTolerance = 1e-9;

// Piecewise-constant P1, P2 on `grid` with P2 / P1 = R at every cell centre and
// unit mass each. Throws DegenerateRegions or NonPositive.
BinaryReconstruction reconstruct_binary_densities(const std::function<double(PointView)>& ratio,
                                                  const TensorGrid& grid);

// Ratio provider for the normalisation identity: R_{i,j}(r).
using RatioSource = std::function<ExtendedRatio(std::size_t i, std::size_t j, PointView r)>;
RatioSource exact_ratio_source(const DensityList& densities);

struct NormalizationResidual {
  std::size_t i = 0, j = 0;
  double value = 0.0;     // integral on the fine grid
  double residual = 0.0;  // |value - 1|
  double error_estimate = 0.0;
};

// For each ordered pair (i, j), i != j, integrates R_{i,j} P_i over Gamma_i plus
// P_j over Gamma_j \ Gamma_i with the midpoint rule on `grid`. The error
// estimate compares against the grid with half the resolution; throws
// QuadratureFailure when it exceeds tol.
std::vector<NormalizationResidual> normalization_check(const DensityList& densities, const RatioSource& ratios,
                                                       const TensorGrid& grid, double tol,
                                                       Execution exec = Execution::Parallel);

}  // namespace lsq
