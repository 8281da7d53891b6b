#pragma once
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace awe::sdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Symmetric vectorization: lower triangle, off-diagonal entries times sqrt(2),
// so that svec(A) . svec(B) = <A, B>_F.
int svec_size(int n);
VectorXd svec(const MatrixXd& A);
MatrixXd smat(const VectorXd& v, int n);

// One linear matrix inequality S(x) = smat(f0 + G x) >= 0.
// Columns of G are indexed by `cols` into the global variable vector.
// Grid-coupled blocks: the first `kblend` local columns address the group-0
// slots of every vertex group, replicated with weight wblend(i) for group i;
// remaining columns are plain globals.
struct Block {
  int n = 0;
  VectorXd f0;
  Eigen::SparseMatrix<double> G;
  std::vector<int> cols;
  VectorXd wblend;
  int kblend = 0;
};

// Optional variable grouping for the structured Schur solve.
// Layout: [group 0 | group 1 | ... | group V-1 | border].
struct GroupInfo {
  int ngroups = 0;
  int group_size = 0;
};

struct Options {
  int max_iter = 120;
  double tol_gap = 1e-7;
  double tol_feas = 1e-7;
  double step_frac = 0.99;
  bool verbose = false;
};

enum class Status { optimal, inaccurate, max_iter, failed };

struct Result {
  Status status = Status::failed;
  VectorXd x;
  double pobj = 0, dobj = 0, gap = 0, rp = 0, rd = 0;
  int iters = 0;
};

struct Problem {
  int m = 0;
  VectorXd c;
  std::vector<Block> blocks;
  GroupInfo groups;  // ngroups == 0: dense Schur solve
};

Result solve(const Problem& prob, const Options& opt = {});

// Probe an affine matrix-valued map at unit coordinates to build a Block.
// eval(xloc) must be affine in xloc (size cols.size()).
Block make_affine_block(int n, std::vector<int> cols,
                        const std::function<MatrixXd(const VectorXd&)>& eval,
                        double drop_tol = 0.0);

}  // namespace awe::sdp
