#pragma once
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace awe::tp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Default relative singular-value threshold reproducing the 12/27/3 vertex
// counts on the kite plant family (see truncation report for the spectra).
inline constexpr double kDefaultRelThreshold = 1e-3;

struct AxisGrid {
  std::string name;
  VectorXd pts;  // strictly increasing
};

// Dense samples of a matrix-valued map over a Cartesian grid.
// data row k holds the row-major flattened matrix at flat grid index k
// (row-major over axes).
struct SampleTensor {
  std::vector<AxisGrid> axes;
  MatrixXd data;
  int rows = 0, cols = 0;
};

using Builder = std::function<MatrixXd(const std::vector<double>&)>;

SampleTensor grid_sample(const Builder& build,
                         const std::vector<AxisGrid>& axes);

// Convenience: uniform grids from a box; points_per_axis >= 2.
std::vector<AxisGrid> uniform_axes(const std::vector<std::string>& names,
                                   const std::vector<std::pair<double, double>>& box,
                                   int points_per_axis);

struct RankPolicy {
  double rel_threshold = kDefaultRelThreshold;
  std::vector<int> forced;  // when nonempty, overrides the threshold
};

struct AxisReport {
  std::string name;
  int rank;                 // kept rank incl. the constant direction
  double threshold;
  VectorXd singular_values; // post-deflation, leading entries
};

struct TruncationReport {
  std::vector<AxisReport> axes;
};

struct PolytopicModel {
  std::vector<AxisGrid> axes;
  std::vector<MatrixXd> axisW;      // per axis: g x r_j convex weight samples
  std::vector<int> ranks;
  std::vector<MatrixXd> vertices;   // prod(ranks) matrices, row-major order
  int rows = 0, cols = 0;
  double grid_recon_err = 0.0;      // stored tolerance
  TruncationReport report;

  int n_vertices() const { return (int)vertices.size(); }
};

PolytopicModel hosvd_decompose(const SampleTensor& T, const RankPolicy& policy);

// Product-form convex weights at theta; clamps theta into the domain and
// sets *clamped when any component was outside.
VectorXd weights(const PolytopicModel& m, const std::vector<double>& theta,
                 bool* clamped = nullptr);

MatrixXd reconstruct(const PolytopicModel& m, const std::vector<double>& theta);

// Per-axis singular values of the mean-deflated unfoldings.
std::vector<VectorXd> axis_singular_values(const SampleTensor& T);

// Minimum-area enclosing triangle of 2-D points (rows of Y).
MatrixXd min_enclosing_triangle(const MatrixXd& Y);
// Barycentric coordinates of points Y in the simplex with given vertices.
MatrixXd barycentric(const MatrixXd& Y, const MatrixXd& verts);

}  // namespace awe::tp
