#include "awe/sdp.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace awe::sdp {
namespace {
constexpr double kRt2 = 1.4142135623730951;
}

int svec_size(int n) { return n * (n + 1) / 2; }

VectorXd svec(const MatrixXd& A) {
  const int n = (int)A.rows();
  VectorXd v(svec_size(n));
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i)
      v(k++) = (i == j) ? A(i, j) : A(i, j) * kRt2;
  return v;
}

MatrixXd smat(const VectorXd& v, int n) {
  MatrixXd A(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i) {
      const double x = (i == j) ? v(k) : v(k) / kRt2;
      A(i, j) = x;
      A(j, i) = x;
      ++k;
    }
  return A;
}

Block make_affine_block(int n, std::vector<int> cols,
                        const std::function<MatrixXd(const VectorXd&)>& eval,
                        double drop_tol) {
  Block b;
  b.n = n;
  b.cols = std::move(cols);
  const int nloc = (int)b.cols.size();
  VectorXd x = VectorXd::Zero(nloc);
  b.f0 = svec(eval(x));
  std::vector<Eigen::Triplet<double>> trips;
  double scale = b.f0.cwiseAbs().maxCoeff();
  for (int j = 0; j < nloc; ++j) {
    x(j) = 1.0;
    VectorXd col = svec(eval(x)) - b.f0;
    x(j) = 0.0;
    scale = std::max(scale, col.cwiseAbs().maxCoeff());
    for (int i = 0; i < col.size(); ++i)
      if (col(i) != 0.0) trips.emplace_back(i, j, col(i));
  }
  if (drop_tol > 0.0) {
    std::vector<Eigen::Triplet<double>> kept;
    for (const auto& t : trips)
      if (std::abs(t.value()) > drop_tol * scale) kept.push_back(t);
    trips.swap(kept);
  }
  b.G.resize(svec_size(n), nloc);
  b.G.setFromTriplets(trips.begin(), trips.end());
  b.G.makeCompressed();
  return b;
}

namespace {

struct ColClass {
  // -1: border; >= 0: group id (grid/blended columns use -2)
  int kind;
  int slot;  // index within group and K layout, or border offset
};

struct PreppedBlock {
  Block blk;                    // scaled copy
  std::vector<ColClass> cls;    // per local column
  bool grid = false;
  int vgroup = -1;              // unique group for vertex-type blocks (-1 none)
};

struct Scaled {
  std::vector<PreppedBlock> blocks;
  VectorXd c;
  VectorXd xscale;
  double objscale = 1.0;
  int m = 0;
  GroupInfo groups;
  int nb = 0;      // border size
  int nK = 0;      // ngroups * group_size
};

// Apply per-block diagonal congruence and global column scaling.
Scaled preprocess(const Problem& P) {
  Scaled S;
  S.m = P.m;
  S.groups = P.groups;
  S.nK = P.groups.ngroups * P.groups.group_size;
  S.nb = P.m - S.nK;

  for (const auto& b0 : P.blocks) {
    PreppedBlock pb;
    pb.blk = b0;
    Block& b = pb.blk;

    // row magnitudes in matrix form
    for (int pass = 0; pass < 2; ++pass) {
      VectorXd rmax = VectorXd::Zero(b.n);
      auto acc = [&](int a, double v) {
        // svec index -> (i, j)
        int j = 0, rem = a;
        int len = b.n;
        while (rem >= len) {
          rem -= len;
          --len;
          ++j;
        }
        const int i = j + rem;
        const double mag = (i == j) ? std::abs(v) : std::abs(v) / kRt2;
        rmax(i) = std::max(rmax(i), mag);
        rmax(j) = std::max(rmax(j), mag);
      };
      for (int i = 0; i < b.f0.size(); ++i)
        if (b.f0(i) != 0) acc(i, b.f0(i));
      for (int k = 0; k < b.G.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(b.G, k); it; ++it)
          acc((int)it.row(), it.value());

      VectorXd t(b.n);
      for (int i = 0; i < b.n; ++i)
        t(i) = 1.0 / std::sqrt(std::max(rmax(i), 1e-10));
      auto scl = [&](int a) {
        int j = 0, rem = a;
        int len = b.n;
        while (rem >= len) {
          rem -= len;
          --len;
          ++j;
        }
        return t(j + rem) * t(j);
      };
      for (int i = 0; i < b.f0.size(); ++i) b.f0(i) *= scl(i);
      for (int k = 0; k < b.G.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(b.G, k); it; ++it)
          it.valueRef() *= scl((int)it.row());
    }
    S.blocks.push_back(std::move(pb));
  }

  // column scaling
  VectorXd colmax = VectorXd::Zero(P.m);
  for (auto& pb : S.blocks) {
    Block& b = pb.blk;
    for (int j = 0; j < b.G.outerSize(); ++j) {
      double mx = 0;
      for (Eigen::SparseMatrix<double>::InnerIterator it(b.G, j); it; ++it)
        mx = std::max(mx, std::abs(it.value()));
      if (j < b.kblend) {
        for (int g = 0; g < S.groups.ngroups; ++g) {
          const int gc = g * S.groups.group_size + b.cols[j];
          colmax(gc) = std::max(colmax(gc), mx * std::abs(b.wblend(g)));
        }
      } else {
        colmax(b.cols[j]) = std::max(colmax(b.cols[j]), mx);
      }
    }
  }
  // slots replicated across groups must share one scale
  if (S.groups.ngroups > 0) {
    for (int slot = 0; slot < S.groups.group_size; ++slot) {
      double mx = 0;
      for (int g = 0; g < S.groups.ngroups; ++g)
        mx = std::max(mx, colmax(g * S.groups.group_size + slot));
      for (int g = 0; g < S.groups.ngroups; ++g)
        colmax(g * S.groups.group_size + slot) = mx;
    }
  }
  S.xscale = VectorXd::Ones(P.m);
  for (int j = 0; j < P.m; ++j)
    S.xscale(j) = 1.0 / std::min(std::max(colmax(j), 1e-8), 1e8);

  for (auto& pb : S.blocks) {
    Block& b = pb.blk;
    for (int j = 0; j < b.G.outerSize(); ++j) {
      const double s = S.xscale(b.cols[j]);  // blended: group-0 slot, shared
      for (Eigen::SparseMatrix<double>::InnerIterator it(b.G, j); it; ++it)
        it.valueRef() *= s;
    }
  }

  S.c = P.c.cwiseProduct(S.xscale);
  const double cn = S.c.cwiseAbs().maxCoeff();
  S.objscale = (cn > 1.0) ? 1.0 / cn : 1.0;
  S.c *= S.objscale;

  // classify columns
  for (auto& pb : S.blocks) {
    Block& b = pb.blk;
    pb.cls.resize(b.cols.size());
    pb.grid = b.kblend > 0;
    int vg = -1;
    bool multi = false;
    for (size_t j = 0; j < b.cols.size(); ++j) {
      if ((int)j < b.kblend) {
        pb.cls[j] = {-2, b.cols[j]};
        continue;
      }
      const int g = b.cols[j];
      if (S.groups.ngroups > 0 && g < S.nK) {
        const int gi = g / S.groups.group_size;
        pb.cls[j] = {gi, g % S.groups.group_size};
        if (vg == -1)
          vg = gi;
        else if (vg != gi)
          multi = true;
      } else {
        pb.cls[j] = {-1, g - S.nK};
      }
    }
    if (multi && S.groups.ngroups > 0 && !pb.grid)
      throw std::runtime_error("block touches multiple groups without blending");
    pb.vgroup = vg;
  }
  return S;
}

struct Cone {
  MatrixXd S, Z;
  MatrixXd R, Rinv;  // W = R R^T, Rinv = R^{-1}
  VectorXd lam;
  MatrixXd Winv;
};

double min_eig(const MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double step_len(const MatrixXd& S, const MatrixXd& dS) {
  Eigen::LLT<MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) return 0.0;
  MatrixXd L = llt.matrixL();
  MatrixXd M = L.triangularView<Eigen::Lower>().solve(dS);
  M = L.triangularView<Eigen::Lower>().solve(MatrixXd(M.transpose()));
  const double lmin = min_eig(M);
  if (lmin >= -1e-14) return 1.0;
  return std::min(1.0, -1.0 / lmin);
}

// Structured or dense Schur-complement KKT solver.
struct Kkt {
  const Scaled* S;
  bool structured;
  int V = 0, gs = 0, nb = 0, m = 0;

  MatrixXd Hdense;
  Eigen::LDLT<MatrixXd> denseF;

  std::vector<MatrixXd> D, Bg;
  MatrixXd E;
  struct LowRank {
    VectorXd w;
    MatrixXd L;  // gs x r
  };
  std::vector<LowRank> lows;
  std::vector<Eigen::LDLT<MatrixXd>> Df;
  std::vector<MatrixXd> Yg;   // per group: gs x rc, D^{-1} [L_1 .. ]
  std::vector<MatrixXd> DBg;  // per group: gs x nb
  MatrixXd cap;               // rc x rc
  Eigen::LDLT<MatrixXd> capF;
  MatrixXd corr;              // rc x nb
  Eigen::LDLT<MatrixXd> Ef;
  int rc = 0;

  void init(const Scaled& sc) {
    S = &sc;
    m = sc.m;
    structured = sc.groups.ngroups > 0;
    if (structured) {
      V = sc.groups.ngroups;
      gs = sc.groups.group_size;
      nb = sc.nb;
    }
  }

  // accumulate Hloc of one block into the structure
  void add_block(const PreppedBlock& pb, const MatrixXd& Hloc) {
    const auto& cls = pb.cls;
    const int nloc = (int)cls.size();
    if (!structured) {
      for (int j = 0; j < nloc; ++j)
        for (int i = 0; i < nloc; ++i) {
          const double h = Hloc(i, j);
          if (h == 0) continue;
          auto add = [&](int gi, double wi, int gj, double wj) {
            Hdense(gi, gj) += wi * wj * h;
          };
          std::vector<std::pair<int, double>> ri, rj;
          auto expand = [&](int k, std::vector<std::pair<int, double>>& out) {
            if (cls[k].kind == -2) {
              for (int g = 0; g < S->groups.ngroups; ++g)
                out.push_back({g * S->groups.group_size + cls[k].slot,
                               pb.blk.wblend(g)});
              if (S->groups.ngroups == 0) out.push_back({cls[k].slot, 1.0});
            } else if (cls[k].kind == -1) {
              out.push_back({S->nK + cls[k].slot, 1.0});
            } else {
              out.push_back({cls[k].kind * S->groups.group_size + cls[k].slot, 1.0});
            }
          };
          expand(i, ri);
          expand(j, rj);
          for (auto& a : ri)
            for (auto& b : rj) add(a.first, a.second, b.first, b.second);
        }
      return;
    }
    if (!pb.grid) {
      for (int j = 0; j < nloc; ++j)
        for (int i = 0; i < nloc; ++i) {
          const double h = Hloc(i, j);
          if (h == 0) continue;
          const auto &ci = cls[i], &cj = cls[j];
          if (ci.kind >= 0 && cj.kind >= 0)
            D[ci.kind](ci.slot, cj.slot) += h;
          else if (ci.kind >= 0 && cj.kind == -1)
            Bg[ci.kind](ci.slot, cj.slot) += h;
          else if (ci.kind == -1 && cj.kind >= 0)
            Bg[cj.kind](cj.slot, ci.slot) += h;
          else
            E(ci.slot, cj.slot) += h;
        }
      return;
    }
    // grid block: split into blended-K and border parts
    const int kb = pb.blk.kblend;
    std::vector<int> bidx;
    for (int j = kb; j < nloc; ++j) bidx.push_back(j);
    MatrixXd Hkk = Hloc.topLeftCorner(kb, kb);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Hkk);
    int r = 0;
    const double lmax = std::max(es.eigenvalues().maxCoeff(), 0.0);
    for (int i = 0; i < kb; ++i)
      if (es.eigenvalues()(i) > 1e-12 * std::max(lmax, 1e-300)) ++r;
    MatrixXd L = MatrixXd::Zero(gs, r);
    int q = 0;
    for (int i = 0; i < kb; ++i) {
      if (es.eigenvalues()(i) <= 1e-12 * std::max(lmax, 1e-300)) continue;
      const double s = std::sqrt(es.eigenvalues()(i));
      for (int p = 0; p < kb; ++p)
        L(cls[p].slot, q) = es.eigenvectors()(p, i) * s;
      ++q;
    }
    lows.push_back({pb.blk.wblend, std::move(L)});
    for (int j = 0; j < (int)bidx.size(); ++j) {
      const int cj = cls[bidx[j]].slot;
      for (int i = 0; i < kb; ++i) {
        const double h = Hloc(i, bidx[j]);
        if (h == 0) continue;
        for (int g = 0; g < V; ++g)
          Bg[g](cls[i].slot, cj) += pb.blk.wblend(g) * h;
      }
      for (int i = 0; i < (int)bidx.size(); ++i) {
        const double h = Hloc(bidx[i], bidx[j]);
        if (h != 0) E(cls[bidx[i]].slot, cj) += h;
      }
    }
  }

  void reset() {
    if (!structured) {
      Hdense = MatrixXd::Zero(m, m);
      return;
    }
    D.assign(V, MatrixXd::Zero(gs, gs));
    Bg.assign(V, MatrixXd::Zero(gs, nb));
    E = MatrixXd::Zero(nb, nb);
    lows.clear();
  }

  void factorize() {
    if (!structured) {
      denseF.compute(Hdense);
      return;
    }
    Df.clear();
    Df.resize(V);
    for (int g = 0; g < V; ++g) Df[g].compute(D[g]);

    rc = 0;
    for (auto& l : lows) rc += (int)l.L.cols();

    Yg.assign(V, MatrixXd());
    DBg.assign(V, MatrixXd());
    MatrixXd UtDB = MatrixXd::Zero(rc, nb);
    cap = MatrixXd::Identity(rc, rc);
    MatrixXd Ep = E;
    for (int g = 0; g < V; ++g) {
      DBg[g] = Df[g].solve(Bg[g]);
      Ep.noalias() -= Bg[g].transpose() * DBg[g];
      if (rc > 0) {
        MatrixXd Lall(gs, rc);
        int off = 0;
        for (auto& l : lows) {
          Lall.middleCols(off, l.L.cols()) = l.L * l.w(g);
          off += (int)l.L.cols();
        }
        Yg[g] = Df[g].solve(Lall);
        cap.noalias() += Lall.transpose() * Yg[g];
        UtDB.noalias() += Lall.transpose() * DBg[g];
      }
    }
    if (rc > 0) {
      capF.compute(cap);
      corr = capF.solve(UtDB);
      Ep.noalias() += UtDB.transpose() * corr;
    }
    Ef.compute(Ep);
  }

  VectorXd solve(const VectorXd& rhs) const {
    if (!structured) return denseF.solve(rhs);
    // zK = (D + U U^T)^{-1} rK
    std::vector<VectorXd> zK(V);
    VectorXd uz = VectorXd::Zero(rc);
    for (int g = 0; g < V; ++g) {
      zK[g] = Df[g].solve(rhs.segment((Eigen::Index)g * gs, gs));
      if (rc > 0) {
        int off = 0;
        for (auto& l : lows) {
          uz.segment(off, l.L.cols()).noalias() +=
              l.w(g) * (l.L.transpose() * rhs.segment((Eigen::Index)g * gs, gs));
          off += (int)l.L.cols();
        }
      }
    }
    VectorXd cz;
    if (rc > 0) {
      cz = capF.solve(uz);
      for (int g = 0; g < V; ++g) zK[g].noalias() -= Yg[g] * cz;
    }
    VectorXd rB = rhs.tail(nb);
    for (int g = 0; g < V; ++g) rB.noalias() -= Bg[g].transpose() * zK[g];
    VectorXd yB = Ef.solve(rB);

    VectorXd y(m);
    y.tail(nb) = yB;
    for (int g = 0; g < V; ++g) {
      VectorXd t = zK[g] - DBg[g] * yB;
      if (rc > 0) t.noalias() += Yg[g] * (corr * yB);
      y.segment((Eigen::Index)g * gs, gs) = t;
    }
    return y;
  }
};

// G x with blending
VectorXd g_apply(const Scaled& S, const PreppedBlock& pb, const VectorXd& x) {
  const Block& b = pb.blk;
  VectorXd xloc((Eigen::Index)b.cols.size());
  for (size_t j = 0; j < b.cols.size(); ++j) {
    if ((int)j < b.kblend) {
      double v = 0;
      for (int g = 0; g < S.groups.ngroups; ++g)
        v += b.wblend(g) * x(g * S.groups.group_size + b.cols[j]);
      xloc(j) = v;
    } else {
      xloc(j) = x(b.cols[j]);
    }
  }
  return b.f0 + b.G * xloc;
}

void gt_accumulate(const Scaled& S, const PreppedBlock& pb, const VectorXd& v,
                   VectorXd& out) {
  const Block& b = pb.blk;
  VectorXd loc = b.G.transpose() * v;
  for (size_t j = 0; j < b.cols.size(); ++j) {
    if ((int)j < b.kblend) {
      for (int g = 0; g < S.groups.ngroups; ++g)
        out(g * S.groups.group_size + b.cols[j]) += b.wblend(g) * loc(j);
    } else {
      out(b.cols[j]) += loc(j);
    }
  }
}

// Hloc = G^T (Winv (x) Winv) G, exploiting per-column sparsity.
MatrixXd block_hessian(const Block& b, const MatrixXd& Winv) {
  const int nloc = (int)b.cols.size();
  const int n = b.n;
  MatrixXd H = MatrixXd::Zero(nloc, nloc);
  MatrixXd Tj(n, n);
  for (int j = 0; j < nloc; ++j) {
    Tj.setZero();
    for (Eigen::SparseMatrix<double>::InnerIterator it(b.G, j); it; ++it) {
      int a = (int)it.row();
      int col = 0, rem = a, len = n;
      while (rem >= len) {
        rem -= len;
        --len;
        ++col;
      }
      const int row = col + rem;
      const double v = (row == col) ? it.value() : it.value() / kRt2;
      Tj.noalias() += v * (Winv.col(row) * Winv.row(col));
      if (row != col) Tj.noalias() += v * (Winv.col(col) * Winv.row(row));
    }
    for (int i = 0; i <= j; ++i) {
      double h = 0;
      for (Eigen::SparseMatrix<double>::InnerIterator it(b.G, i); it; ++it) {
        int a = (int)it.row();
        int col = 0, rem = a, len = n;
        while (rem >= len) {
          rem -= len;
          --len;
          ++col;
        }
        const int row = col + rem;
        const double v = (row == col) ? it.value() : it.value() * kRt2;
        h += v * Tj(row, col);
      }
      H(i, j) = h;
      H(j, i) = h;
    }
  }
  return H;
}

}  // namespace

Result solve(const Problem& prob, const Options& opt) {
  Scaled sc = preprocess(prob);
  const int nblk = (int)sc.blocks.size();

  std::vector<Cone> cones(nblk);
  double ntot = 0;
  for (int b = 0; b < nblk; ++b) {
    const int n = sc.blocks[b].blk.n;
    const double beta =
        std::max(1.0, sc.blocks[b].blk.f0.cwiseAbs().maxCoeff());
    cones[b].S = MatrixXd::Identity(n, n) * beta;
    cones[b].Z = MatrixXd::Identity(n, n);
    ntot += n;
  }
  VectorXd x = VectorXd::Zero(sc.m);

  Kkt kkt;
  kkt.init(sc);

  Result res;
  double best_err = 1e300;
  VectorXd best_x = x;

  for (int iter = 0; iter < opt.max_iter; ++iter) {
    // residuals
    std::vector<VectorXd> rp(nblk);
    VectorXd rd = sc.c;
    double gap = 0, rpn = 0, f0n = 0;
    for (int b = 0; b < nblk; ++b) {
      const auto& pb = sc.blocks[b];
      VectorXd sx = g_apply(sc, pb, x);
      rp[b] = sx - svec(cones[b].S);
      gt_accumulate(sc, pb, -svec(cones[b].Z), rd);
      gap += (cones[b].S.array() * cones[b].Z.array()).sum();
      rpn = std::max(rpn, rp[b].cwiseAbs().maxCoeff());
      f0n = std::max(f0n, pb.blk.f0.cwiseAbs().maxCoeff());
    }
    double pobj = sc.c.dot(x);
    double dobj = 0;
    for (int b = 0; b < nblk; ++b)
      dobj -= sc.blocks[b].blk.f0.dot(svec(cones[b].Z));
    const double mu = gap / ntot;
    const double relgap =
        std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double rdn = rd.cwiseAbs().maxCoeff() / (1.0 + sc.c.cwiseAbs().maxCoeff());
    const double rpn_rel = rpn / (1.0 + f0n);

    if (opt.verbose)
      std::printf("it %3d  pobj %+.6e  dobj %+.6e  gap %.2e  rp %.2e  rd %.2e\n",
                  iter, pobj / sc.objscale, dobj / sc.objscale, relgap, rpn_rel,
                  rdn);

    const double err = relgap + rpn_rel + rdn;
    if (err < best_err) {
      best_err = err;
      best_x = x;
    }
    res.iters = iter;
    res.pobj = pobj / sc.objscale;
    res.dobj = dobj / sc.objscale;
    res.gap = relgap;
    res.rp = rpn_rel;
    res.rd = rdn;
    if (relgap < opt.tol_gap && rpn_rel < opt.tol_feas && rdn < opt.tol_feas) {
      res.status = Status::optimal;
      res.x = x.cwiseProduct(sc.xscale);
      return res;
    }

    if (gap <= 0) break;

    // NT scalings
    bool scal_ok = true;
    for (int b = 0; b < nblk; ++b) {
      Cone& cn = cones[b];
      Eigen::LLT<MatrixXd> ls(cn.S), lz(cn.Z);
      if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) {
        scal_ok = false;
        break;
      }
      MatrixXd Ls = ls.matrixL(), Lz = lz.matrixL();
      Eigen::JacobiSVD<MatrixXd> svd(Lz.transpose() * Ls,
                                     Eigen::ComputeFullU | Eigen::ComputeFullV);
      VectorXd sig = svd.singularValues();
      VectorXd si = sig.cwiseMax(1e-150).cwiseSqrt().cwiseInverse();
      cn.R = Ls * svd.matrixV() * si.asDiagonal();
      cn.Rinv = si.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
      cn.lam = sig;
      cn.Winv = cn.Rinv.transpose() * cn.Rinv;
    }
    if (!scal_ok) break;

    kkt.reset();
    for (int b = 0; b < nblk; ++b)
      kkt.add_block(sc.blocks[b], block_hessian(sc.blocks[b].blk, cones[b].Winv));
    kkt.factorize();

    auto solve_dirs = [&](const std::vector<MatrixXd>& Vb, VectorXd& dx,
                          std::vector<MatrixXd>& dS, std::vector<MatrixXd>& dZ) {
      VectorXd rhs = -rd;
      for (int b = 0; b < nblk; ++b) {
        const MatrixXd vm = Vb[b] - smat(rp[b], sc.blocks[b].blk.n);
        gt_accumulate(sc, sc.blocks[b],
                      svec(cones[b].Winv * vm * cones[b].Winv), rhs);
      }
      dx = kkt.solve(rhs);
      dS.resize(nblk);
      dZ.resize(nblk);
      for (int b = 0; b < nblk; ++b) {
        VectorXd ds = rp[b];
        // G dx part
        const auto& pb = sc.blocks[b];
        VectorXd xloc((Eigen::Index)pb.blk.cols.size());
        for (size_t j = 0; j < pb.blk.cols.size(); ++j) {
          if ((int)j < pb.blk.kblend) {
            double v = 0;
            for (int g = 0; g < sc.groups.ngroups; ++g)
              v += pb.blk.wblend(g) * dx(g * sc.groups.group_size + pb.blk.cols[j]);
            xloc(j) = v;
          } else {
            xloc(j) = dx(pb.blk.cols[j]);
          }
        }
        ds += pb.blk.G * xloc;
        dS[b] = smat(ds, pb.blk.n);
        dZ[b] = cones[b].Winv * (Vb[b] - dS[b]) * cones[b].Winv;
      }
    };

    // predictor
    std::vector<MatrixXd> Vb(nblk);
    for (int b = 0; b < nblk; ++b) Vb[b] = -cones[b].S;
    VectorXd dx_a;
    std::vector<MatrixXd> dS_a, dZ_a;
    solve_dirs(Vb, dx_a, dS_a, dZ_a);

    double ap = 1.0, ad = 1.0;
    for (int b = 0; b < nblk; ++b) {
      ap = std::min(ap, step_len(cones[b].S, dS_a[b]));
      ad = std::min(ad, step_len(cones[b].Z, dZ_a[b]));
    }
    double gap_aff = 0;
    for (int b = 0; b < nblk; ++b)
      gap_aff += ((cones[b].S + ap * dS_a[b]).array() *
                  (cones[b].Z + ad * dZ_a[b]).array())
                     .sum();
    double sigma = std::pow(std::max(gap_aff, 0.0) / gap, 3.0);
    sigma = std::min(std::max(sigma, 1e-10), 1.0);

    // corrector
    for (int b = 0; b < nblk; ++b) {
      Cone& cn = cones[b];
      const int n = (int)cn.S.rows();
      MatrixXd u = cn.Rinv * dS_a[b] * cn.Rinv.transpose();
      MatrixXd v = cn.R.transpose() * dZ_a[b] * cn.R;
      MatrixXd corr = 0.5 * (u * v + v * u);
      MatrixXd Dm(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double num = 2.0 * ((i == j ? sigma * mu : 0.0) - corr(i, j)) -
                             2.0 * (i == j ? cn.lam(i) * cn.lam(j) : 0.0);
          Dm(i, j) = num / (cn.lam(i) + cn.lam(j));
        }
      Vb[b] = cn.R * Dm * cn.R.transpose();
    }
    VectorXd dx;
    std::vector<MatrixXd> dS, dZ;
    solve_dirs(Vb, dx, dS, dZ);

    ap = 1.0;
    ad = 1.0;
    for (int b = 0; b < nblk; ++b) {
      ap = std::min(ap, step_len(cones[b].S, dS[b]));
      ad = std::min(ad, step_len(cones[b].Z, dZ[b]));
    }
    ap *= opt.step_frac;
    ad *= opt.step_frac;
    if (ap < 1e-10 && ad < 1e-10) break;

    x += ap * dx;
    for (int b = 0; b < nblk; ++b) {
      cones[b].S += ap * dS[b];
      cones[b].Z += ad * dZ[b];
      // symmetrize against drift
      cones[b].S = 0.5 * (cones[b].S + cones[b].S.transpose()).eval();
      cones[b].Z = 0.5 * (cones[b].Z + cones[b].Z.transpose()).eval();
    }
  }

  res.x = best_x.cwiseProduct(sc.xscale);
  if (best_err < 1e-4)
    res.status = Status::inaccurate;
  else
    res.status = Status::failed;
  if (res.iters >= opt.max_iter - 1 && res.status == Status::failed)
    res.status = Status::max_iter;
  return res;
}

}  // namespace awe::sdp
