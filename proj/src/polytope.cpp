#include "awe/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace awe::tp {
namespace {

int flat_size(const std::vector<AxisGrid>& axes) {
  int n = 1;
  for (const auto& a : axes) n *= (int)a.pts.size();
  return n;
}

std::vector<int> unflatten(int k, const std::vector<AxisGrid>& axes) {
  std::vector<int> idx(axes.size());
  for (int a = (int)axes.size() - 1; a >= 0; --a) {
    const int g = (int)axes[a].pts.size();
    idx[a] = k % g;
    k /= g;
  }
  return idx;
}

// Unfold along axis a: row ia, columns enumerate (other axes flat, matrix entry).
MatrixXd unfold(const MatrixXd& data, const std::vector<AxisGrid>& axes, int a) {
  const int g = (int)axes[a].pts.size();
  const int N = (int)data.cols();
  const int flat = (int)data.rows();
  const int rest = flat / g;
  MatrixXd U(g, rest * N);
  for (int k = 0; k < flat; ++k) {
    std::vector<int> idx = unflatten(k, axes);
    const int ia = idx[a];
    int r = 0;
    for (int ax = 0; ax < (int)axes.size(); ++ax) {
      if (ax == a) continue;
      r = r * (int)axes[ax].pts.size() + idx[ax];
    }
    U.row(ia).segment((Eigen::Index)r * N, N) = data.row(k);
  }
  return U;
}

// Contract axis a with R (r x g): out = R applied along that axis.
MatrixXd contract_axis(const MatrixXd& data, std::vector<AxisGrid>& axes,
                       std::vector<int>& sizes, int a, const MatrixXd& R) {
  const int g = sizes[a];
  const int r = (int)R.rows();
  const int N = (int)data.cols();
  int outer = 1, inner = 1;
  for (int ax = 0; ax < a; ++ax) outer *= sizes[ax];
  for (int ax = a + 1; ax < (int)sizes.size(); ++ax) inner *= sizes[ax];

  MatrixXd out = MatrixXd::Zero((Eigen::Index)outer * r * inner, N);
  for (int o = 0; o < outer; ++o)
    for (int j = 0; j < g; ++j)
      for (int i = 0; i < inner; ++i) {
        const auto src = data.row(((Eigen::Index)o * g + j) * inner + i);
        for (int k = 0; k < r; ++k)
          out.row(((Eigen::Index)o * r + k) * inner + i) += R(k, j) * src;
      }
  sizes[a] = r;
  return out;
}

struct Deflated {
  VectorXd svals;
  MatrixXd Y;  // g x (g-1) candidate coordinates, scaled left vectors
};

// Mean-deflated Gram spectrum of the unfolding along one axis.
Deflated deflate(MatrixXd U) {
  const int g = (int)U.rows();
  Eigen::RowVectorXd mean = U.colwise().mean();
  U.rowwise() -= mean;
  MatrixXd G = U * U.transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(G);
  Deflated d;
  d.svals = VectorXd::Zero(g);
  d.Y = MatrixXd::Zero(g, g);
  for (int i = 0; i < g; ++i) {
    const double lam = std::max(es.eigenvalues()(g - 1 - i), 0.0);
    d.svals(i) = std::sqrt(lam);
    d.Y.col(i) = es.eigenvectors().col(g - 1 - i) * d.svals(i);
  }
  return d;
}

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& a, const auto& b) { return a == b; }),
            pts.end());
  const int n = (int)pts.size();
  if (n < 3) return pts;
  std::vector<Eigen::Vector2d> h(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross2(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  const int lower = k + 1;
  for (int i = n - 2; i >= 0; --i) {
    while (k >= lower && cross2(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

bool tri_from_lines(const Eigen::Vector2d& a1, const Eigen::Vector2d& b1,
                    const Eigen::Vector2d& a2, const Eigen::Vector2d& b2,
                    Eigen::Vector2d& out) {
  const Eigen::Vector2d d1 = b1 - a1, d2 = b2 - a2;
  Eigen::Matrix2d M;
  M << d1, -d2;
  if (std::abs(M.determinant()) < 1e-14) return false;
  const Eigen::Vector2d t = M.partialPivLu().solve(a2 - a1);
  out = a1 + t(0) * d1;
  return true;
}

bool contains_all(const MatrixXd& tri, const MatrixXd& pts, double tol = 1e-9) {
  MatrixXd W = barycentric(pts, tri);
  const double scale = std::max(W.cwiseAbs().maxCoeff(), 1.0);
  return W.minCoeff() >= -tol * scale;
}

double tri_area(const MatrixXd& tri) {
  const Eigen::Vector2d u = tri.row(1) - tri.row(0), v = tri.row(2) - tri.row(0);
  return std::abs(cross2(u, v)) / 2.0;
}

// Barycentric coordinates in an enclosing simplex of the d-column point set.
MatrixXd enclose_simplex(const MatrixXd& Y) {
  const int g = (int)Y.rows(), d = (int)Y.cols();
  if (d == 0) return MatrixXd::Ones(g, 1);
  if (d == 1) {
    const double m = Y.col(0).minCoeff(), M = Y.col(0).maxCoeff();
    if (M - m < 1e-300) return MatrixXd::Constant(g, 2, 0.5);
    MatrixXd W(g, 2);
    for (int i = 0; i < g; ++i) {
      const double t = (Y(i, 0) - m) / (M - m);
      W(i, 0) = 1.0 - t;
      W(i, 1) = t;
    }
    return W;
  }
  if (d == 2) {
    MatrixXd tri = min_enclosing_triangle(Y);
    return barycentric(Y, tri);
  }
  Eigen::RowVectorXd c = Y.colwise().mean();
  double R = 0.0;
  for (int i = 0; i < g; ++i) R = std::max(R, (Y.row(i) - c).norm());
  R *= (d + 1);
  MatrixXd verts(d + 1, d);
  verts.topRows(d) = MatrixXd::Identity(d, d) * R;
  verts.row(d) = -Eigen::RowVectorXd::Ones(d) * (R / std::sqrt((double)d));
  verts.rowwise() += c;
  return barycentric(Y, verts);
}

}  // namespace

MatrixXd barycentric(const MatrixXd& Y, const MatrixXd& verts) {
  const int d = (int)Y.cols();
  MatrixXd T(d + 1, d + 1);
  T.topRows(d) = verts.transpose();
  T.row(d).setOnes();
  MatrixXd rhs(d + 1, Y.rows());
  rhs.topRows(d) = Y.transpose();
  rhs.row(d).setOnes();
  return T.partialPivLu().solve(rhs).transpose();
}

MatrixXd min_enclosing_triangle(const MatrixXd& Yin) {
  MatrixXd Y = Yin;
  const int g = (int)Y.rows();
  Eigen::RowVectorXd span = Y.colwise().maxCoeff() - Y.colwise().minCoeff();
  if (span.minCoeff() < 1e-12) {
    // nearly collinear: thicken deterministically
    Eigen::RowVectorXd c = Y.colwise().mean();
    Eigen::JacobiSVD<MatrixXd> svd(Y.rowwise() - c, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    const double w =
        std::max(s.size() > 1 ? s(1) : 0.0, 1e-9 * std::max(s(0), 1e-30));
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < 2; ++j)
        Y(i, j) += w * 1e-6 * std::sin(137.0 * i + 17.0 * j + 1.0);
  }

  std::vector<Eigen::Vector2d> pv(g);
  for (int i = 0; i < g; ++i) pv[i] = Y.row(i);
  std::vector<Eigen::Vector2d> hull = convex_hull(pv);
  const int h = (int)hull.size();

  MatrixXd pts(h, 2);
  for (int i = 0; i < h; ++i) pts.row(i) = hull[i];

  MatrixXd best;
  double bestA = std::numeric_limits<double>::infinity();
  for (int i = 0; i < h; ++i)
    for (int j = i + 1; j < h; ++j)
      for (int k = j + 1; k < h; ++k) {
        const Eigen::Vector2d a1 = hull[i], b1 = hull[(i + 1) % h];
        const Eigen::Vector2d a2 = hull[j], b2 = hull[(j + 1) % h];
        const Eigen::Vector2d a3 = hull[k], b3 = hull[(k + 1) % h];
        Eigen::Vector2d v1, v2, v3;
        if (!tri_from_lines(a1, b1, a2, b2, v1)) continue;
        if (!tri_from_lines(a2, b2, a3, b3, v2)) continue;
        if (!tri_from_lines(a3, b3, a1, b1, v3)) continue;
        MatrixXd tri(3, 2);
        tri << v1.transpose(), v2.transpose(), v3.transpose();
        if (!contains_all(tri, pts)) continue;
        const double A = tri_area(tri);
        if (A < bestA) {
          bestA = A;
          best = tri;
        }
      }
  if (best.size() == 0) {
    Eigen::RowVectorXd mn = Y.colwise().minCoeff(), mx = Y.colwise().maxCoeff();
    Eigen::RowVectorXd c = (mn + mx) / 2, s = mx - mn;
    MatrixXd tri(3, 2);
    tri << c(0) - 1.5 * s(0), c(1) - 0.75 * s(1), c(0) + 1.5 * s(0),
        c(1) - 0.75 * s(1), c(0), c(1) + 1.5 * s(1);
    if (!contains_all(tri, pts)) tri *= 2.0;
    best = tri;
  }
  return best;
}

std::vector<AxisGrid> uniform_axes(
    const std::vector<std::string>& names,
    const std::vector<std::pair<double, double>>& box, int points_per_axis) {
  if (points_per_axis < 2)
    throw std::invalid_argument("points_per_axis must be >= 2");
  std::vector<AxisGrid> axes;
  for (size_t a = 0; a < names.size(); ++a) {
    AxisGrid ax;
    ax.name = names[a];
    ax.pts = VectorXd::LinSpaced(points_per_axis, box[a].first, box[a].second);
    axes.push_back(std::move(ax));
  }
  return axes;
}

SampleTensor grid_sample(const Builder& build,
                         const std::vector<AxisGrid>& axes) {
  SampleTensor T;
  T.axes = axes;
  const int flat = flat_size(axes);
  for (int k = 0; k < flat; ++k) {
    std::vector<int> idx = unflatten(k, axes);
    std::vector<double> th(axes.size());
    for (size_t a = 0; a < axes.size(); ++a) th[a] = axes[a].pts(idx[a]);
    MatrixXd S;
    try {
      S = build(th);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "builder failed at theta = (";
      for (size_t a = 0; a < th.size(); ++a)
        os << (a ? ", " : "") << th[a];
      os << "): " << e.what();
      throw std::runtime_error(os.str());
    }
    if (k == 0) {
      T.rows = (int)S.rows();
      T.cols = (int)S.cols();
      T.data.resize(flat, S.size());
    }
    Eigen::Map<const Eigen::RowVectorXd> flatrow(S.data(), S.size());
    // Eigen stores column-major; keep a consistent flattening
    T.data.row(k) = flatrow;
  }
  return T;
}

std::vector<VectorXd> axis_singular_values(const SampleTensor& T) {
  std::vector<VectorXd> out;
  for (size_t a = 0; a < T.axes.size(); ++a)
    out.push_back(deflate(unfold(T.data, T.axes, (int)a)).svals);
  return out;
}

PolytopicModel hosvd_decompose(const SampleTensor& T, const RankPolicy& policy) {
  const int nd = (int)T.axes.size();
  PolytopicModel m;
  m.axes = T.axes;
  m.rows = T.rows;
  m.cols = T.cols;

  std::vector<MatrixXd> Ws;
  for (int a = 0; a < nd; ++a) {
    Deflated d = deflate(unfold(T.data, T.axes, a));
    int r;
    if (!policy.forced.empty()) {
      r = policy.forced[a];
    } else {
      r = 1;
      for (int i = 0; i < d.svals.size(); ++i)
        if (d.svals(i) >= policy.rel_threshold * d.svals(0)) ++r;
    }
    r = std::min<int>(r, (int)T.axes[a].pts.size());

    AxisReport rep;
    rep.name = T.axes[a].name;
    rep.rank = r;
    rep.threshold = policy.forced.empty() ? policy.rel_threshold : 0.0;
    rep.singular_values = d.svals.head(std::min<int>(12, (int)d.svals.size()));
    m.report.axes.push_back(rep);

    MatrixXd W = enclose_simplex(d.Y.leftCols(r - 1));
    for (int i = 0; i < W.rows(); ++i) {
      double s = W.row(i).sum();
      if (std::abs(s - 1.0) > 1e-6 || !W.allFinite()) {
        throw std::runtime_error("weight normalization infeasible on axis " +
                                 T.axes[a].name);
      }
    }
    Ws.push_back(W);
    m.ranks.push_back(r);
    m.axisW.push_back(W);
  }

  // core: contract pinv(W_a) along each axis
  MatrixXd C = T.data;
  std::vector<AxisGrid> axes = T.axes;
  std::vector<int> sizes;
  for (const auto& ax : axes) sizes.push_back((int)ax.pts.size());
  for (int a = 0; a < nd; ++a) {
    const MatrixXd& W = Ws[a];
    MatrixXd pinv =
        (W.transpose() * W).ldlt().solve(W.transpose());  // r x g
    C = contract_axis(C, axes, sizes, a, pinv);
  }

  const int nv = (int)C.rows();
  for (int v = 0; v < nv; ++v) {
    Eigen::RowVectorXd row = C.row(v);
    m.vertices.push_back(
        Eigen::Map<const MatrixXd>(row.data(), m.rows, m.cols));
  }

  // stored tolerance: worst relative error on the sampling grid
  double err = 0.0;
  const int flat = (int)T.data.rows();
  for (int k = 0; k < flat; ++k) {
    std::vector<int> idx = unflatten(k, T.axes);
    std::vector<double> th(nd);
    for (int a = 0; a < nd; ++a) th[a] = T.axes[a].pts(idx[a]);
    MatrixXd R = reconstruct(m, th);
    Eigen::RowVectorXd row = T.data.row(k);
    Eigen::Map<const MatrixXd> D(row.data(), m.rows, m.cols);
    err = std::max(err, (R - D).norm() / std::max(D.norm(), 1e-300));
  }
  m.grid_recon_err = err;
  return m;
}

VectorXd weights(const PolytopicModel& m, const std::vector<double>& theta,
                 bool* clamped) {
  if (clamped) *clamped = false;
  const int nd = (int)m.axes.size();
  std::vector<VectorXd> axw(nd);
  for (int a = 0; a < nd; ++a) {
    const VectorXd& g = m.axes[a].pts;
    double x = theta[a];
    if (x < g(0) || x > g(g.size() - 1)) {
      if (clamped) *clamped = true;
      x = std::clamp(x, g(0), g(g.size() - 1));
    }
    int i = 0;
    while (i < g.size() - 2 && g(i + 1) < x) ++i;
    const double t = (x - g(i)) / (g(i + 1) - g(i));
    axw[a] = (1.0 - t) * m.axisW[a].row(i) + t * m.axisW[a].row(i + 1);
  }
  const int nv = m.n_vertices();
  VectorXd rho = VectorXd::Ones(nv);
  for (int v = 0; v < nv; ++v) {
    int rem = v;
    for (int a = nd - 1; a >= 0; --a) {
      const int r = m.ranks[a];
      rho(v) *= axw[a](rem % r);
      rem /= r;
    }
    if (rho(v) < 0.0) rho(v) = 0.0;  // clamp tiny negatives
  }
  const double s = rho.sum();
  if (s > 0) rho /= s;
  return rho;
}

MatrixXd reconstruct(const PolytopicModel& m, const std::vector<double>& theta) {
  VectorXd rho = weights(m, theta);
  MatrixXd S = MatrixXd::Zero(m.rows, m.cols);
  for (int v = 0; v < m.n_vertices(); ++v) S += rho(v) * m.vertices[v];
  return S;
}

}  // namespace awe::tp
