#include "awe/synthesis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "awe/artifacts.hpp"

namespace awe::syn {

using Eigen::Map;
using Eigen::MatrixXcd;

namespace {

constexpr double kWdPole = 63.24;
constexpr double kWdHf = 3.16;
constexpr double kWdRes = 0.63 - kWdHf * kWdPole;  // section residue
constexpr double kWdDirect = kWdHf * kWdHf;
constexpr double kCondLimit = 1e10;

double now_s() {
  using clk = std::chrono::steady_clock;
  return std::chrono::duration<double>(clk::now().time_since_epoch()).count();
}

void sched_p(const Params& P, double f, double a, double L, double* p1,
             double* p2) {
  const double c = P.aero_c(a, L);
  *p1 = std::sqrt(c * f);
  *p2 = P.aero_c_alpha(a, L) / c * f;
}

void pbh_check(const AugPlant& p) {
  const int nx = p.nx();
  Eigen::EigenSolver<MatrixXd> es(p.A, false);
  const double scale = p.A.cwiseAbs().maxCoeff() + 1.0;
  const MatrixXcd Ac = p.A.cast<std::complex<double>>();
  for (int k = 0; k < nx; ++k) {
    const std::complex<double> lam = es.eigenvalues()(k);
    if (lam.real() < -1e-7 * scale) continue;
    MatrixXcd Mc(nx, nx + p.nu());
    Mc << lam * MatrixXcd::Identity(nx, nx) - Ac,
        p.B2.cast<std::complex<double>>();
    Eigen::JacobiSVD<MatrixXcd> sc(Mc);
    if (sc.singularValues()(nx - 1) <= 1e-9 * sc.singularValues()(0))
      throw std::runtime_error(
          "augmented plant unstabilizable at eigenvalue Re=" +
          std::to_string(lam.real()));
    MatrixXcd Mo(nx + p.ny(), nx);
    Mo << lam * MatrixXcd::Identity(nx, nx) - Ac,
        p.C2.cast<std::complex<double>>();
    Eigen::JacobiSVD<MatrixXcd> so(Mo);
    if (so.singularValues()(nx - 1) <= 1e-9 * so.singularValues()(0))
      throw std::runtime_error(
          "augmented plant undetectable at eigenvalue Re=" +
          std::to_string(lam.real()));
  }
}

VectorXd lin_grid(double lo, double hi, int n) {
  VectorXd g(n);
  for (int i = 0; i < n; ++i) g(i) = lo + (hi - lo) * i / (n - 1);
  return g;
}

VectorXd sqrt_warped_grid(double lo, double hi, int n) {
  VectorXd g(n);
  const double a = std::sqrt(lo), b = std::sqrt(hi);
  for (int i = 0; i < n; ++i) {
    const double s = a + (b - a) * i / (n - 1);
    g(i) = s * s;
  }
  return g;
}

// ---- LMI assembly -------------------------------------------------------

struct Lay {
  int V, nx, ny, nu, nw, nz;
  int gs, sx, m;
  int boff;  // border start == V*gs
  int xoff() const { return boff; }
  int yoff() const { return boff + sx; }
  int ooff() const { return boff + 2 * sx; }
};

Lay make_layout(const std::vector<AugPlant>& verts) {
  Lay L;
  const AugPlant& v = verts[0];
  L.V = (int)verts.size();
  L.nx = v.nx();
  L.ny = v.ny();
  L.nu = v.nu();
  L.nw = v.nw();
  L.nz = v.nz();
  L.gs = L.nx * L.nx + L.nx * L.ny + L.nu * L.nx + L.nu * L.ny;
  L.sx = sdp::svec_size(L.nx);
  L.boff = L.V * L.gs;
  L.m = L.boff + 2 * L.sx + 1;
  return L;
}

struct Tilde {
  MatrixXd At, Bt, Ct, Dt, X, Y;
};

// xloc layout: [vec At | vec Bt | vec Ct | vec Dt | svec X | svec Y | (obj)]
Tilde unpack(const Lay& L, const VectorXd& xl) {
  Tilde t;
  int off = 0;
  t.At = Map<const MatrixXd>(xl.data() + off, L.nx, L.nx);
  off += L.nx * L.nx;
  t.Bt = Map<const MatrixXd>(xl.data() + off, L.nx, L.ny);
  off += L.nx * L.ny;
  t.Ct = Map<const MatrixXd>(xl.data() + off, L.nu, L.nx);
  off += L.nu * L.nx;
  t.Dt = Map<const MatrixXd>(xl.data() + off, L.nu, L.ny);
  off += L.nu * L.ny;
  t.X = sdp::smat(xl.segment(off, L.sx), L.nx);
  t.Y = sdp::smat(xl.segment(off + L.sx, L.sx), L.nx);
  return t;
}

MatrixXd mfull_of(const AugPlant& p, const Tilde& t, double gw, double gz,
                  const VectorXd& Sw, const VectorXd& Sz) {
  const int nx = p.nx(), nw = p.nw(), nz = p.nz();
  const MatrixXd BtC2 = t.Bt * p.C2;
  const MatrixXd B2Ct = p.B2 * t.Ct;
  const MatrixXd M11 = t.X * p.A + p.A.transpose() * t.X + BtC2 + BtC2.transpose();
  const MatrixXd M21 = t.At.transpose() + p.A + p.B2 * t.Dt * p.C2;
  const MatrixXd M22 = p.A * t.Y + t.Y * p.A.transpose() + B2Ct + B2Ct.transpose();
  const MatrixXd M31 = Sw.asDiagonal() * (t.X * p.B1 + t.Bt * p.D21).transpose();
  const MatrixXd M32 = Sw.asDiagonal() * (p.B1 + p.B2 * t.Dt * p.D21).transpose();
  const MatrixXd M41 = p.C1 + p.D12 * t.Dt * p.C2;
  const MatrixXd M42 = p.C1 * t.Y + p.D12 * t.Ct;
  const MatrixXd M43 = (p.D11 + p.D12 * t.Dt * p.D21) * Sw.asDiagonal();
  MatrixXd M = MatrixXd::Zero(2 * nx + nw + nz, 2 * nx + nw + nz);
  M.block(0, 0, nx, nx) = M11;
  M.block(nx, 0, nx, nx) = M21;
  M.block(0, nx, nx, nx) = M21.transpose();
  M.block(nx, nx, nx, nx) = M22;
  M.block(2 * nx, 0, nw, nx) = M31;
  M.block(0, 2 * nx, nx, nw) = M31.transpose();
  M.block(2 * nx, nx, nw, nx) = M32;
  M.block(nx, 2 * nx, nx, nw) = M32.transpose();
  M.block(2 * nx, 2 * nx, nw, nw).diagonal() = -gw * Sw;
  M.block(2 * nx + nw, 0, nz, nx) = M41;
  M.block(0, 2 * nx + nw, nx, nz) = M41.transpose();
  M.block(2 * nx + nw, nx, nz, nx) = M42;
  M.block(nx, 2 * nx + nw, nx, nz) = M42.transpose();
  M.block(2 * nx + nw, 2 * nx, nz, nw) = M43;
  M.block(2 * nx, 2 * nx + nw, nw, nz) = M43.transpose();
  M.block(2 * nx + nw, 2 * nx + nw, nz, nz).diagonal() = -gz * Sz;
  return M;
}

MatrixXd psi_of(const AugPlant& p, const Tilde& t) {
  const int nx = p.nx();
  MatrixXd ps(2 * nx, 2 * nx);
  ps.block(0, 0, nx, nx) = p.A * t.Y + p.B2 * t.Ct;
  ps.block(0, nx, nx, nx) = p.A + p.B2 * t.Dt * p.C2;
  ps.block(nx, 0, nx, nx) = t.At;
  ps.block(nx, nx, nx, nx) = t.X * p.A + t.Bt * p.C2;
  return ps;
}

MatrixXd pp_of(const Lay& L, const Tilde& t) {
  MatrixXd pp(2 * L.nx, 2 * L.nx);
  pp.block(0, 0, L.nx, L.nx) = t.Y;
  pp.block(L.nx, L.nx, L.nx, L.nx) = t.X;
  pp.block(0, L.nx, L.nx, L.nx).setIdentity();
  pp.block(L.nx, 0, L.nx, L.nx).setIdentity();
  return pp;
}

AugPlant select_channels(const AugPlant& p, const std::vector<int>& wsel,
                         const std::vector<int>& zsel) {
  AugPlant s = p;
  const int nws = (int)wsel.size(), nzs = (int)zsel.size();
  s.B1.resize(p.nx(), nws);
  s.D21.resize(p.ny(), nws);
  for (int j = 0; j < nws; ++j) {
    s.B1.col(j) = p.B1.col(wsel[j]);
    s.D21.col(j) = p.D21.col(wsel[j]);
  }
  s.C1.resize(nzs, p.nx());
  s.D12.resize(nzs, p.nu());
  s.D11.resize(nzs, nws);
  for (int i = 0; i < nzs; ++i) {
    s.C1.row(i) = p.C1.row(zsel[i]);
    s.D12.row(i) = p.D12.row(zsel[i]);
    for (int j = 0; j < nws; ++j) s.D11(i, j) = p.D11(zsel[i], wsel[j]);
  }
  return s;
}

enum class Phase { min_gamma, min_track, max_margin };

std::vector<int> group_cols(const Lay& L, int v) {
  std::vector<int> c(L.gs);
  for (int k = 0; k < L.gs; ++k) c[k] = v * L.gs + k;
  return c;
}

void append_border(const Lay& L, std::vector<int>& c, bool with_obj) {
  for (int k = 0; k < 2 * L.sx; ++k) c.push_back(L.boff + k);
  if (with_obj) c.push_back(L.ooff());
}

sdp::Problem assemble(const std::vector<AugPlant>& verts,
                      const LmiOptions& opt, Phase ph, double gamma_fixed,
                      double gtrack_fixed, const std::vector<GridTarget>& grid,
                      const std::vector<int>& wsel,
                      const std::vector<int>& zsel) {
  const Lay L = make_layout(verts);
  const VectorXd Sw = opt.Sw.size() ? opt.Sw : VectorXd::Ones(L.nw);
  const VectorXd Sz = opt.Sz.size() ? opt.Sz : VectorXd::Ones(L.nz);
  const double eps = opt.eps;
  const double dlo = opt.stripe_lo, dhi = opt.stripe_hi;

  sdp::Problem pb;
  pb.m = L.m;
  pb.c = VectorXd::Zero(L.m);
  pb.c(L.ooff()) = (ph == Phase::max_margin) ? -1.0 : 1.0;
  if (L.V >= 2 || !grid.empty()) pb.groups = {L.V, L.gs};

  const bool margin_var = (ph == Phase::max_margin);

  // coupling [X I; I Y] >= margin * I
  {
    std::vector<int> cols;
    append_border(L, cols, margin_var);
    const int nb = 2 * L.nx;
    auto ev = [L, nb, eps, margin_var](const VectorXd& xl) {
      const MatrixXd X = sdp::smat(xl.segment(0, L.sx), L.nx);
      const MatrixXd Y = sdp::smat(xl.segment(L.sx, L.sx), L.nx);
      const double marg = margin_var ? xl(2 * L.sx) : eps;
      MatrixXd M = MatrixXd::Zero(nb, nb);
      M.block(0, 0, L.nx, L.nx) = X;
      M.block(L.nx, L.nx, L.nx, L.nx) = Y;
      M.block(0, L.nx, L.nx, L.nx).setIdentity();
      M.block(L.nx, 0, L.nx, L.nx).setIdentity();
      M -= marg * MatrixXd::Identity(nb, nb);
      return M;
    };
    pb.blocks.push_back(sdp::make_affine_block(nb, cols, ev));
  }

  for (int v = 0; v < L.V; ++v) {
    const AugPlant p = verts[v];
    // vertex certificate
    {
      std::vector<int> cols = group_cols(L, v);
      const bool gamma_var = (ph == Phase::min_gamma);
      append_border(L, cols, gamma_var || margin_var);
      const int nb = 2 * L.nx + L.nw + L.nz;
      auto ev = [L, p, Sw, Sz, eps, gamma_var, margin_var, gamma_fixed,
                 nb](const VectorXd& xl) {
        const Tilde t = unpack(L, xl);
        const double g =
            gamma_var ? xl(L.gs + 2 * L.sx) : gamma_fixed;
        const double marg = margin_var ? xl(L.gs + 2 * L.sx) : eps;
        MatrixXd M = mfull_of(p, t, g, g, Sw, Sz);
        return MatrixXd(-M - marg * MatrixXd::Identity(nb, nb));
      };
      pb.blocks.push_back(sdp::make_affine_block(nb, cols, ev));
    }
    // pole stripes: Re < dhi and Re > dlo
    for (int side = 0; side < 2; ++side) {
      std::vector<int> cols = group_cols(L, v);
      append_border(L, cols, margin_var);
      const int nb = 2 * L.nx;
      auto ev = [L, p, eps, margin_var, dlo, dhi, side, nb](const VectorXd& xl) {
        const Tilde t = unpack(L, xl);
        const double marg = margin_var ? xl(L.gs + 2 * L.sx) : eps;
        const MatrixXd ps = psi_of(p, t);
        const MatrixXd pp = pp_of(L, t);
        MatrixXd M = (side == 0)
                         ? MatrixXd(-2.0 * dhi * pp + ps + ps.transpose())
                         : MatrixXd(2.0 * dlo * pp - ps - ps.transpose());
        return MatrixXd(-M - marg * MatrixXd::Identity(nb, nb));
      };
      pb.blocks.push_back(sdp::make_affine_block(nb, cols, ev));
    }
  }

  if (!grid.empty()) {
    const int nws = (int)wsel.size(), nzs = (int)zsel.size();
    const VectorXd Sws = VectorXd::Ones(nws), Szs = VectorXd::Ones(nzs);
    for (const GridTarget& gt : grid) {
      const AugPlant ps = select_channels(gt.plant, wsel, zsel);
      std::vector<int> cols(L.gs);
      for (int k = 0; k < L.gs; ++k) cols[k] = k;
      const bool ge_var = (ph == Phase::min_track);
      append_border(L, cols, ge_var);
      const int nb = 2 * L.nx + nws + nzs;
      auto ev = [L, ps, Sws, Szs, ge_var, gtrack_fixed](const VectorXd& xl) {
        const Tilde t = unpack(L, xl);
        const double ge = ge_var ? xl(L.gs + 2 * L.sx) : gtrack_fixed;
        return MatrixXd(-mfull_of(ps, t, ge, ge, Sws, Szs));
      };
      sdp::Block b = sdp::make_affine_block(nb, cols, ev);
      b.kblend = L.gs;
      b.wblend = gt.w;
      pb.blocks.push_back(std::move(b));
    }
  }

  // scalar bound on the objective variable
  if (ph != Phase::min_gamma) {
    std::vector<int> cols = {L.ooff()};
    const double lo = (ph == Phase::min_track) ? 1e-4 : 0.0;
    auto ev = [lo](const VectorXd& xl) {
      MatrixXd r(1, 1);
      r(0, 0) = xl(0) - lo;
      return r;
    };
    pb.blocks.push_back(sdp::make_affine_block(1, cols, ev));
  }
  return pb;
}

bool accepted(sdp::Status s) {
  return s == sdp::Status::optimal || s == sdp::Status::inaccurate;
}

LmiSolution extract(const Lay& L, const sdp::Result& res, Phase ph,
                    double gamma_fixed, double gtrack_fixed,
                    const VectorXd& Sw, const VectorXd& Sz) {
  LmiSolution out;
  out.status = res.status;
  out.iters = res.iters;
  out.Sw = Sw;
  out.Sz = Sz;
  if (!accepted(res.status)) return out;
  const VectorXd& x = res.x;
  out.X = sdp::smat(x.segment(L.xoff(), L.sx), L.nx);
  out.Y = sdp::smat(x.segment(L.yoff(), L.sx), L.nx);
  out.At.resize(L.V);
  out.Bt.resize(L.V);
  out.Ct.resize(L.V);
  out.Dt.resize(L.V);
  for (int v = 0; v < L.V; ++v) {
    int off = v * L.gs;
    out.At[v] = Map<const MatrixXd>(x.data() + off, L.nx, L.nx);
    off += L.nx * L.nx;
    out.Bt[v] = Map<const MatrixXd>(x.data() + off, L.nx, L.ny);
    off += L.nx * L.ny;
    out.Ct[v] = Map<const MatrixXd>(x.data() + off, L.nu, L.nx);
    off += L.nu * L.nx;
    out.Dt[v] = Map<const MatrixXd>(x.data() + off, L.nu, L.ny);
  }
  const double obj = x(L.ooff());
  switch (ph) {
    case Phase::min_gamma:
      out.gamma = obj;
      break;
    case Phase::min_track:
      out.gamma = gamma_fixed;
      out.gamma_track = obj;
      break;
    case Phase::max_margin:
      out.gamma = gamma_fixed;
      out.gamma_track = gtrack_fixed;
      out.margin = obj;
      break;
  }
  return out;
}

std::vector<OperatingPoint> validation_ops(Family family) {
  std::vector<OperatingPoint> ops;
  if (family == Family::three_param) {
    for (double f : {1.5e3, 1e4, 2e4})
      for (double a : {4.0, 12.0, 20.0})
        for (double L : {200.0, 800.0}) ops.push_back({f, a, L});
  } else {
    for (double L : {200.0, 350.0, 500.0, 650.0, 800.0})
      ops.push_back({1e4, 10.0, L});
  }
  return ops;
}

std::vector<OperatingPoint> grid_ops(Mode mode, Family family) {
  std::vector<OperatingPoint> ops;
  if (mode == Mode::one_dof) {
    if (family == Family::three_param) {
      for (double f : {1.5e3, 4e3, 8e3, 15e3})
        for (double a : {18.0, 20.0})
          for (double L : {250.0, 600.0}) ops.push_back({f, a, L});
    } else {
      for (double L : {250.0, 600.0}) ops.push_back({1e4, 10.0, L});
    }
  } else {
    if (family == Family::three_param) {
      for (double f : {8e3, 17.8e3})
        for (double a : {16.0, 19.0}) ops.push_back({f, a, 400.0});
    } else {
      ops.push_back({1e4, 10.0, 400.0});
    }
  }
  return ops;
}

json vec_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

VectorXd vec_from(const json& j) {
  VectorXd v((Eigen::Index)j.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[(size_t)i];
  return v;
}

}  // namespace

std::string to_string(Mode m) { return m == Mode::one_dof ? "1dof" : "2dof"; }
std::string to_string(Family f) {
  return f == Family::three_param ? "ftl-alpha-l" : "l";
}

Mode mode_from_string(const std::string& s) {
  if (s == "1dof") return Mode::one_dof;
  if (s == "2dof") return Mode::two_dof;
  throw std::runtime_error("unknown mode: " + s);
}

Family family_from_string(const std::string& s) {
  if (s == "ftl-alpha-l" || s == "3p") return Family::three_param;
  if (s == "l") return Family::length_only;
  throw std::runtime_error("unknown schedule family: " + s);
}

OperatingPoint family_op(Family family, const OperatingPoint& op) {
  if (family == Family::length_only) return {1e4, 10.0, op.L_d};
  return op;
}

RelRadii rel_radii(const Params& P, Family family) {
  RelRadii r;
  const int nf = 25, na = 25, nl = 7;
  for (int il = 0; il < nl; ++il) {
    const double L = 200.0 + 600.0 * il / (nl - 1);
    double q1n = 0, q2n = 0;
    if (family == Family::length_only) sched_p(P, 1e4, 10.0, L, &q1n, &q2n);
    for (int ia = 0; ia < na; ++ia) {
      const double a = 4.0 + 16.0 * ia / (na - 1);
      for (int jf = 0; jf < nf; ++jf) {
        const double f = 1.5e3 + (20e3 - 1.5e3) * jf / (nf - 1);
        double p1, p2;
        sched_p(P, f, a, L, &p1, &p2);
        if (family == Family::three_param) {
          for (double mf : {0.7, 1.3})
            for (double ma : {0.7, 1.0, 1.3}) {
              double q1, q2;
              sched_p(P, mf * f, std::clamp(ma * a, 0.0, 25.0), L, &q1, &q2);
              r.r1 = std::max(r.r1, std::abs(q1 / p1 - 1.0));
              r.r2 = std::max(r.r2, std::abs(q2 / p2 - 1.0));
            }
        } else {
          r.r1 = std::max(r.r1, std::abs(p1 / q1n - 1.0));
          r.r2 = std::max(r.r2, std::abs(p2 / q2n - 1.0));
        }
      }
    }
  }
  return r;
}

AugPlant build_augmented(const Params& P, Mode mode, const OperatingPoint& op,
                         const RelRadii& rr, Family family, double fs) {
  const LpvModel m = build_lpv(P, 1, op, {});
  double pd1, pd2;
  if (family == Family::length_only) {
    double p1n, p2n;
    sched_p(P, 1e4, 10.0, op.L_d, &p1n, &p2n);
    pd1 = rr.r1 * p1n;
    pd2 = rr.r2 * p2n;
  } else {
    pd1 = rr.r1 * m.p1;
    pd2 = rr.r2 * m.p2;
  }
  const double ce = P.EA() * fs;
  AugPlant p;
  if (mode == Mode::one_dof) {
    const int nx = 11, nw = 4, nu = 1, nz = 5, ny = 1;
    p.A = MatrixXd::Zero(nx, nx);
    p.B1 = MatrixXd::Zero(nx, nw);
    p.B2 = MatrixXd::Zero(nx, nu);
    p.C1 = MatrixXd::Zero(nz, nx);
    p.D11 = MatrixXd::Zero(nz, nw);
    p.D12 = MatrixXd::Zero(nz, nu);
    p.C2 = MatrixXd::Zero(ny, nx);
    p.D21 = MatrixXd::Zero(ny, nw);
    p.A.block(0, 0, 3, 3) = m.A;
    p.A.block(0, 3, 3, 1) = m.Bu.col(0);
    p.A(4, 4) = -1.0;
    p.A(5, 4) = 1.0;
    p.A(5, 1) = -1.0;
    p.A(6, 6) = -20.0;
    p.A(7, 7) = -kWdPole;
    p.A(7, 1) = 1.0;
    p.A(8, 8) = -kWdPole;
    p.A(8, 7) = kWdRes;
    p.A(8, 1) = kWdHf;
    p.A(9, 9) = -kWdPole;
    p.A(9, 0) = ce;
    p.A(10, 10) = -kWdPole;
    p.A(10, 9) = kWdRes;
    p.A(10, 0) = kWdHf * ce;
    p.B1.block(0, 1, 3, 1) = m.Bw;
    p.B1.block(0, 2, 3, 1) = pd1 * m.Bd.col(0);
    p.B1(4, 0) = 1.0;
    p.B1(5, 3) = -1.0;
    p.B2(3, 0) = 1.0;
    p.B2(6, 0) = 1.0;
    p.C1(0, 4) = 0.8;
    p.C1(0, 1) = -0.8;
    p.C1(0, 5) = 1.0;
    p.D11(0, 3) = -0.8;
    p.C1(1, 6) = -80.0;
    p.D12(1, 0) = 4.0;
    p.C1(2, 2) = 1.0;
    p.C1(3, 1) = kWdDirect;
    p.C1(3, 7) = kWdHf * kWdRes;
    p.C1(3, 8) = kWdRes;
    p.C1(4, 0) = kWdDirect * ce;
    p.C1(4, 9) = kWdHf * kWdRes;
    p.C1(4, 10) = kWdRes;
    p.C2.row(0) = p.C1.row(0) / 0.75;
    p.D21(0, 3) = -0.8 / 0.75;
    p.iw_unc = {2, 3};
    p.iz_unc = {2, 3};
  } else {
    const int nx = 15, nw = 7, nu = 2, nz = 8, ny = 2;
    p.A = MatrixXd::Zero(nx, nx);
    p.B1 = MatrixXd::Zero(nx, nw);
    p.B2 = MatrixXd::Zero(nx, nu);
    p.C1 = MatrixXd::Zero(nz, nx);
    p.D11 = MatrixXd::Zero(nz, nw);
    p.D12 = MatrixXd::Zero(nz, nu);
    p.C2 = MatrixXd::Zero(ny, nx);
    p.D21 = MatrixXd::Zero(ny, nw);
    p.A.block(0, 0, 3, 3) = m.A;
    p.A.block(0, 3, 3, 1) = m.Bu.col(0);
    p.A.block(0, 4, 3, 1) = m.Bu.col(1);
    p.A(5, 5) = -1.0;
    p.A(6, 6) = -1.0;
    p.A(7, 5) = 1.0;
    p.A(7, 1) = -1.0;
    p.A(8, 6) = 1.0;
    p.A(8, 0) = -ce;
    p.A(9, 9) = -20.0;
    p.A(10, 10) = -1.0;
    p.A(11, 11) = -kWdPole;
    p.A(11, 1) = 1.0;
    p.A(12, 12) = -kWdPole;
    p.A(12, 11) = kWdRes;
    p.A(12, 1) = kWdHf;
    p.A(13, 13) = -kWdPole;
    p.A(13, 0) = ce;
    p.A(14, 14) = -kWdPole;
    p.A(14, 13) = kWdRes;
    p.A(14, 0) = kWdHf * ce;
    p.B1.block(0, 2, 3, 1) = m.Bw;
    p.B1.block(0, 3, 3, 1) = pd1 * m.Bd.col(0);
    p.B1.block(0, 4, 3, 1) = pd2 * m.Bd.col(1);
    p.B1(5, 0) = 1.0;
    p.B1(6, 1) = 1.0;
    p.B1(7, 5) = -1.0;
    p.B1(8, 6) = -1.0;
    p.B2(3, 0) = 1.0;
    p.B2(9, 0) = 1.0;
    p.B2(4, 1) = 1.0;
    p.B2(10, 1) = 1.0;
    p.C1(0, 5) = 0.8;
    p.C1(0, 1) = -0.8;
    p.C1(0, 7) = 1.0;
    p.D11(0, 5) = -0.8;
    p.C1(1, 6) = 0.1;
    p.C1(1, 0) = -0.1 * ce;
    p.C1(1, 8) = 1.0;
    p.D11(1, 6) = -0.1;
    p.C1(2, 9) = -80.0;
    p.D12(2, 0) = 4.0;
    p.C1(3, 10) = -1.0;
    p.D12(3, 1) = 1.0;
    p.C1(4, 2) = 1.0;
    p.C1(5, 4) = 1.0;
    p.C1(6, 1) = kWdDirect;
    p.C1(6, 11) = kWdHf * kWdRes;
    p.C1(6, 12) = kWdRes;
    p.C1(7, 0) = kWdDirect * ce;
    p.C1(7, 13) = kWdHf * kWdRes;
    p.C1(7, 14) = kWdRes;
    p.C2.row(0) = p.C1.row(0) / 0.75;
    p.D21(0, 5) = -0.8 / 0.75;
    p.C2.row(1) = p.C1.row(1);
    p.D21(1, 6) = -0.1;
    p.iw_unc = {3, 4, 5, 6};
    p.iz_unc = {4, 5, 6, 7};
  }
  return p;
}

VertexSet build_vertex_set(const Params& P, Mode mode, Family family,
                           int grid_pts) {
  VertexSet vs;
  vs.mode = mode;
  vs.family = family;
  vs.radii = rel_radii(P, family);

  // structural diagnostics once per family
  pbh_check(build_augmented(P, mode, {1e4, 10.0, 500.0}, vs.radii, family, 1.0));

  std::vector<tp::AxisGrid> axes;
  if (family == Family::three_param) {
    axes.push_back({"f_t", sqrt_warped_grid(1.5e3, 2e4, grid_pts)});
    axes.push_back({"alpha", lin_grid(4.0, 20.0, grid_pts)});
    axes.push_back({"L_d", lin_grid(200.0, 800.0, grid_pts)});
  } else {
    axes.push_back({"L_d", lin_grid(200.0, 800.0, grid_pts)});
  }

  tp::Builder build = [&](const std::vector<double>& th) {
    const OperatingPoint op = (family == Family::three_param)
                                  ? OperatingPoint{th[0], th[1], th[2]}
                                  : OperatingPoint{1e4, 10.0, th[0]};
    const AugPlant p = build_augmented(P, mode, op, vs.radii, family, 1.0);
    MatrixXd AB(p.nx(), p.nx() + p.nw());
    AB << p.A, p.B1;
    return AB;
  };
  const tp::SampleTensor T = tp::grid_sample(build, axes);

  tp::RankPolicy policy;
  if (family == Family::length_only)
    policy.forced = {3};
  else
    policy.forced = (mode == Mode::one_dof) ? std::vector<int>{2, 2, 3}
                                            : std::vector<int>{3, 3, 3};
  vs.poly = tp::hosvd_decompose(T, policy);

  const AugPlant cb =
      build_augmented(P, mode, {1e4, 10.0, 500.0}, vs.radii, family,
                      kForceScale);
  // constant blocks are theta-independent; validated against a second point
  {
    const AugPlant probe =
        build_augmented(P, mode, {1.8e4, 5.0, 230.0}, vs.radii, family,
                        kForceScale);
    if ((probe.B2 - cb.B2).cwiseAbs().maxCoeff() > 0 ||
        (probe.C2 - cb.C2).cwiseAbs().maxCoeff() > 0 ||
        (probe.D12 - cb.D12).cwiseAbs().maxCoeff() > 0 ||
        (probe.D21 - cb.D21).cwiseAbs().maxCoeff() > 0)
      throw std::logic_error("vertex plants do not share constant blocks");
  }

  const int nx = cb.nx(), nw = cb.nw();
  VectorXd t = VectorXd::Ones(nx), rw = VectorXd::Ones(nw);
  if (mode == Mode::one_dof) {
    t(9) = t(10) = kForceScale;
  } else {
    t(6) = t(8) = t(13) = t(14) = kForceScale;
    rw(1) = rw(6) = 1.0 / kForceScale;
  }
  for (const MatrixXd& V : vs.poly.vertices) {
    AugPlant v = cb;
    v.A = t.asDiagonal() * V.leftCols(nx) * t.cwiseInverse().asDiagonal();
    v.B1 = t.asDiagonal() * V.rightCols(nw) * rw.asDiagonal();
    vs.verts.push_back(std::move(v));
  }
  return vs;
}

VectorXd balance_scaling(const std::vector<AugPlant>& verts) {
  const int nx = verts[0].nx();
  MatrixXd Am = MatrixXd::Zero(nx, nx);
  VectorXd brow = VectorXd::Zero(nx), ccol = VectorXd::Zero(nx);
  for (const AugPlant& v : verts) {
    Am += v.A.cwiseAbs();
    brow += v.B1.cwiseAbs().rowwise().sum() + v.B2.cwiseAbs().rowwise().sum();
    ccol += v.C1.cwiseAbs().colwise().sum().transpose() +
            v.C2.cwiseAbs().colwise().sum().transpose();
  }
  const double nv = (double)verts.size();
  Am /= nv;
  brow /= nv;
  ccol /= nv;
  VectorXd d = VectorXd::Ones(nx);
  for (int it = 0; it < 100; ++it) {
    VectorXd r = VectorXd::Zero(nx), c = VectorXd::Zero(nx);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nx; ++j) {
        const double a = Am(i, j) * d(i) / d(j);
        r(i) += a;
        c(j) += a;
      }
    r += brow.cwiseProduct(d);
    c += ccol.cwiseQuotient(d);
    double worst = 0;
    for (int i = 0; i < nx; ++i) {
      const double upd = std::clamp(std::sqrt(c(i) / r(i)), 0.25, 4.0);
      d(i) = std::clamp(d(i) * upd, std::pow(2.0, -16), std::pow(2.0, 16));
      worst = std::max(worst, std::abs(std::log(upd)));
    }
    if (worst < 1e-3) break;
  }
  for (int i = 0; i < nx; ++i)
    d(i) = std::pow(2.0, std::round(std::log2(d(i))));
  return d;
}

AugPlant apply_scaling(const AugPlant& p, const VectorXd& d) {
  AugPlant s = p;
  s.A = d.asDiagonal() * p.A * d.cwiseInverse().asDiagonal();
  s.B1 = d.asDiagonal() * p.B1;
  s.B2 = d.asDiagonal() * p.B2;
  s.C1 = p.C1 * d.cwiseInverse().asDiagonal();
  s.C2 = p.C2 * d.cwiseInverse().asDiagonal();
  return s;
}

LmiSolution solve_phase1(const std::vector<AugPlant>& verts,
                         const LmiOptions& opt) {
  const Lay L = make_layout(verts);
  const sdp::Problem pb =
      assemble(verts, opt, Phase::min_gamma, 0, 0, {}, {}, {});
  const sdp::Result res = sdp::solve(pb, opt.sdp);
  const VectorXd Sw = opt.Sw.size() ? opt.Sw : VectorXd::Ones(L.nw);
  const VectorXd Sz = opt.Sz.size() ? opt.Sz : VectorXd::Ones(L.nz);
  return extract(L, res, Phase::min_gamma, 0, 0, Sw, Sz);
}

LmiSolution solve_phase2(const std::vector<AugPlant>& verts,
                         const LmiOptions& opt, double gamma_fixed,
                         const std::vector<GridTarget>& grid,
                         const std::vector<int>& wsel,
                         const std::vector<int>& zsel) {
  const Lay L = make_layout(verts);
  const sdp::Problem pb = assemble(verts, opt, Phase::min_track, gamma_fixed,
                                   0, grid, wsel, zsel);
  const sdp::Result res = sdp::solve(pb, opt.sdp);
  const VectorXd Sw = opt.Sw.size() ? opt.Sw : VectorXd::Ones(L.nw);
  const VectorXd Sz = opt.Sz.size() ? opt.Sz : VectorXd::Ones(L.nz);
  return extract(L, res, Phase::min_track, gamma_fixed, 0, Sw, Sz);
}

LmiSolution solve_phase2_margin(const std::vector<AugPlant>& verts,
                                const LmiOptions& opt, double gamma_fixed,
                                double gtrack_fixed,
                                const std::vector<GridTarget>& grid,
                                const std::vector<int>& wsel,
                                const std::vector<int>& zsel) {
  const Lay L = make_layout(verts);
  const sdp::Problem pb = assemble(verts, opt, Phase::max_margin, gamma_fixed,
                                   gtrack_fixed, grid, wsel, zsel);
  const sdp::Result res = sdp::solve(pb, opt.sdp);
  const VectorXd Sw = opt.Sw.size() ? opt.Sw : VectorXd::Ones(L.nw);
  const VectorXd Sz = opt.Sz.size() ? opt.Sz : VectorXd::Ones(L.nz);
  return extract(L, res, Phase::max_margin, gamma_fixed, gtrack_fixed, Sw, Sz);
}

double lmi_residual(const LmiSolution& sol, const std::vector<AugPlant>& verts,
                    const LmiOptions& opt) {
  (void)opt;
  const Lay L = make_layout(verts);
  double worst = -std::numeric_limits<double>::infinity();
  for (int v = 0; v < L.V; ++v) {
    Tilde t{sol.At[v], sol.Bt[v], sol.Ct[v], sol.Dt[v], sol.X, sol.Y};
    const MatrixXd M =
        mfull_of(verts[v], t, sol.gamma, sol.gamma, sol.Sw, sol.Sz);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(M, Eigen::EigenvaluesOnly);
    worst = std::max(worst, es.eigenvalues().maxCoeff());
  }
  return worst;
}

std::vector<VertexK> recover_controllers(const LmiSolution& sol,
                                         const std::vector<AugPlant>& verts,
                                         double* cond_out) {
  const int nx = (int)sol.X.rows();
  const MatrixXd IXY = MatrixXd::Identity(nx, nx) - sol.X * sol.Y;
  Eigen::JacobiSVD<MatrixXd> svd(IXY,
                                 Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd s = svd.singularValues();
  const double cond = s(0) / s(nx - 1);
  if (cond_out) *cond_out = cond;
  if (!(cond < kCondLimit))
    throw std::runtime_error(
        "controller recovery: I - XY is near singular (cond=" +
        std::to_string(cond) +
        "); perturb X, Y, e.g. re-solve with a coupling margin objective");
  const VectorXd rs = s.cwiseSqrt();
  const MatrixXd Ninv = rs.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
  const MatrixXd MinvT = svd.matrixV() * rs.cwiseInverse().asDiagonal();
  std::vector<VertexK> out;
  for (size_t v = 0; v < verts.size(); ++v) {
    const AugPlant& p = verts[v];
    VertexK k;
    k.Dk = sol.Dt[v];
    k.Bk = Ninv * (sol.Bt[v] - sol.X * p.B2 * k.Dk);
    k.Ck = (sol.Ct[v] - k.Dk * p.C2 * sol.Y) * MinvT;
    k.Ak = Ninv *
           (sol.At[v] - sol.X * (p.A - p.B2 * k.Dk * p.C2) * sol.Y -
            sol.Bt[v] * p.C2 * sol.Y - sol.X * p.B2 * sol.Ct[v]) *
           MinvT;
    out.push_back(std::move(k));
  }
  return out;
}

ClosedLoop close_loop(const AugPlant& p, const VertexK& k) {
  const int nx = p.nx(), nk = (int)k.Ak.rows();
  ClosedLoop cl;
  cl.A.resize(nx + nk, nx + nk);
  cl.A.block(0, 0, nx, nx) = p.A + p.B2 * k.Dk * p.C2;
  cl.A.block(0, nx, nx, nk) = p.B2 * k.Ck;
  cl.A.block(nx, 0, nk, nx) = k.Bk * p.C2;
  cl.A.block(nx, nx, nk, nk) = k.Ak;
  cl.B.resize(nx + nk, p.nw());
  cl.B.topRows(nx) = p.B1 + p.B2 * k.Dk * p.D21;
  cl.B.bottomRows(nk) = k.Bk * p.D21;
  cl.C.resize(p.nz(), nx + nk);
  cl.C.leftCols(nx) = p.C1 + p.D12 * k.Dk * p.C2;
  cl.C.rightCols(nk) = p.D12 * k.Ck;
  cl.D = p.D11 + p.D12 * k.Dk * p.D21;
  return cl;
}

SweepResult sweep_closed_loop(const ClosedLoop& cl, const VectorXd& Sw,
                              const VectorXd& Sz, const std::vector<int>& iw,
                              const std::vector<int>& iz) {
  SweepResult r;
  const int n = (int)cl.A.rows();
  Eigen::EigenSolver<MatrixXd> es(cl.A, false);
  r.re_min = es.eigenvalues().real().minCoeff();
  r.re_max = es.eigenvalues().real().maxCoeff();
  r.channels = VectorXd::Zero((Eigen::Index)iw.size());
  const Eigen::VectorXcd tw = Sw.cwiseSqrt().cast<std::complex<double>>();
  const Eigen::VectorXcd tz =
      Sz.cwiseSqrt().cwiseInverse().cast<std::complex<double>>();
  const MatrixXcd Ac = cl.A.cast<std::complex<double>>();
  const MatrixXcd Bc = cl.B.cast<std::complex<double>>();
  const int ngrid = 800;
  for (int k = 0; k < ngrid; ++k) {
    const double om = std::pow(10.0, -3.0 + 7.0 * k / (ngrid - 1));
    MatrixXcd E = MatrixXcd::Identity(n, n) * std::complex<double>(0, om) - Ac;
    const MatrixXcd H =
        cl.C.cast<std::complex<double>>() * E.partialPivLu().solve(Bc) +
        cl.D.cast<std::complex<double>>();
    const MatrixXcd Hs = tz.asDiagonal() * H * tw.asDiagonal();
    Eigen::JacobiSVD<MatrixXcd> svd(Hs);
    r.hinf = std::max(r.hinf, svd.singularValues()(0));
    for (size_t c = 0; c < iw.size(); ++c)
      r.channels((Eigen::Index)c) = std::max(
          r.channels((Eigen::Index)c), std::abs(H(iz[c], iw[c])));
  }
  return r;
}

VectorXd ScheduledController::weights_at(
    const std::array<double, 3>& theta) const {
  std::vector<double> act;
  if (family == Family::length_only)
    act = {theta[2]};
  else
    act = {theta[0], theta[1], theta[2]};
  VectorXd w = VectorXd::Ones(1);
  for (size_t a = 0; a < axes.size(); ++a) {
    const VectorXd& g = axes[a].pts;
    const int n = (int)g.size();
    double x = std::clamp(act[a], g(0), g(n - 1));
    int i = 0;
    while (i < n - 2 && x >= g(i + 1)) ++i;
    const double t = (x - g(i)) / (g(i + 1) - g(i));
    const Eigen::RowVectorXd wa =
        (1.0 - t) * axisW[a].row(i) + t * axisW[a].row(i + 1);
    VectorXd nw(w.size() * wa.size());
    for (Eigen::Index p = 0; p < w.size(); ++p)
      for (Eigen::Index q = 0; q < wa.size(); ++q)
        nw(p * wa.size() + q) = w(p) * wa(q);
    w.swap(nw);
  }
  return w;
}

VertexK ScheduledController::at(const std::array<double, 3>& theta) const {
  const VectorXd w = weights_at(theta);
  VertexK out;
  out.Ak = MatrixXd::Zero(K[0].Ak.rows(), K[0].Ak.cols());
  out.Bk = MatrixXd::Zero(K[0].Bk.rows(), K[0].Bk.cols());
  out.Ck = MatrixXd::Zero(K[0].Ck.rows(), K[0].Ck.cols());
  out.Dk = MatrixXd::Zero(K[0].Dk.rows(), K[0].Dk.cols());
  for (size_t v = 0; v < K.size(); ++v) {
    out.Ak += w((Eigen::Index)v) * K[v].Ak;
    out.Bk += w((Eigen::Index)v) * K[v].Bk;
    out.Ck += w((Eigen::Index)v) * K[v].Ck;
    out.Dk += w((Eigen::Index)v) * K[v].Dk;
  }
  return out;
}

json ScheduledController::to_json() const {
  json j;
  j["mode"] = syn::to_string(mode);
  j["family"] = syn::to_string(family);
  j["radii"] = {radii.r1, radii.r2};
  j["gamma"] = gamma;
  j["gamma_track"] = gamma_track;
  j["cond_ixy"] = cond_ixy;
  j["stripe_lo"] = stripe_lo;
  j["S"] = vec_json(S);
  j["d"] = vec_json(d);
  j["ranks"] = ranks;
  json ja = json::array();
  for (const auto& a : axes)
    ja.push_back({{"name", a.name}, {"pts", vec_json(a.pts)}});
  j["axes"] = ja;
  json jw = json::array();
  for (const auto& W : axisW) jw.push_back(io::matrix_to_json(W));
  j["axisW"] = jw;
  json jk = json::array();
  for (const auto& k : K)
    jk.push_back({{"Ak", io::matrix_to_json(k.Ak)},
                  {"Bk", io::matrix_to_json(k.Bk)},
                  {"Ck", io::matrix_to_json(k.Ck)},
                  {"Dk", io::matrix_to_json(k.Dk)}});
  j["K"] = jk;
  j["X"] = io::matrix_to_json(X);
  j["Y"] = io::matrix_to_json(Y);
  return j;
}

ScheduledController ScheduledController::from_json(const json& j) {
  ScheduledController c;
  c.mode = mode_from_string(j.at("mode").get<std::string>());
  c.family = family_from_string(j.at("family").get<std::string>());
  c.radii = {j.at("radii")[0].get<double>(), j.at("radii")[1].get<double>()};
  c.gamma = j.at("gamma");
  c.gamma_track = j.at("gamma_track");
  c.cond_ixy = j.at("cond_ixy");
  c.stripe_lo = j.at("stripe_lo");
  c.S = vec_from(j.at("S"));
  c.d = vec_from(j.at("d"));
  c.ranks = j.at("ranks").get<std::vector<int>>();
  for (const auto& a : j.at("axes"))
    c.axes.push_back({a.at("name").get<std::string>(), vec_from(a.at("pts"))});
  for (const auto& w : j.at("axisW"))
    c.axisW.push_back(io::matrix_from_json(w));
  for (const auto& k : j.at("K"))
    c.K.push_back({io::matrix_from_json(k.at("Ak")),
                   io::matrix_from_json(k.at("Bk")),
                   io::matrix_from_json(k.at("Ck")),
                   io::matrix_from_json(k.at("Dk"))});
  c.X = io::matrix_from_json(j.at("X"));
  c.Y = io::matrix_from_json(j.at("Y"));
  return c;
}

json SynthReport::to_json() const {
  json j;
  j["mode"] = mode;
  j["family"] = family;
  j["radii"] = {r1, r2};
  j["n_vertices"] = nverts;
  j["status_phase1"] = status1;
  j["status_phase2"] = status2;
  j["gamma_phase1"] = gamma1;
  j["gamma_cert"] = gamma_cert;
  j["gamma_track"] = gamma_track;
  j["lmi_residual"] = resid;
  j["min_eig_xy"] = min_xy;
  j["cond_ixy"] = cond_ixy;
  j["pole_re_min"] = pole_lo;
  j["pole_re_max"] = pole_hi;
  j["sweep_hinf"] = sweep;
  j["sweep_ok"] = sweep_ok;
  j["channel_gains"] = vec_json(channel_gains);
  j["margin_rescue"] = margin_rescue;
  j["t_phase1_s"] = t_phase1;
  j["t_phase2_s"] = t_phase2;
  j["t_total_s"] = t_total;
  return j;
}

ClosedLoop closed_loop_at(const Params& P, const ScheduledController& K,
                          const OperatingPoint& op,
                          const std::array<double, 3>& sched_theta) {
  const AugPlant p = apply_scaling(
      build_augmented(P, K.mode, family_op(K.family, op), K.radii, K.family,
                      kForceScale),
      K.d);
  return close_loop(p, K.at(sched_theta));
}

ScheduledController synthesize(const Params& P, const SynthOptions& opt,
                               SynthReport* rep) {
  const double t_start = now_s();
  SynthReport r;
  r.mode = syn::to_string(opt.mode);
  r.family = syn::to_string(opt.family);

  VertexSet vs = build_vertex_set(P, opt.mode, opt.family, opt.grid_pts);
  r.r1 = vs.radii.r1;
  r.r2 = vs.radii.r2;
  r.nverts = (int)vs.verts.size();

  const VectorXd d = balance_scaling(vs.verts);
  std::vector<AugPlant> sverts;
  for (const AugPlant& v : vs.verts) sverts.push_back(apply_scaling(v, d));
  const std::vector<int>& iw_unc = sverts[0].iw_unc;
  const std::vector<int>& iz_unc = sverts[0].iz_unc;

  LmiOptions lo;
  lo.eps = opt.eps;
  lo.stripe_lo = (opt.mode == Mode::one_dof) ? -200.0 : -400.0;
  lo.stripe_hi = 0.0;
  lo.sdp = opt.sdp;

  const Lay L = make_layout(sverts);
  VectorXd chanS = VectorXd::Ones((Eigen::Index)iw_unc.size());
  auto set_S = [&](const VectorXd& cs) {
    lo.Sw = VectorXd::Ones(L.nw);
    lo.Sz = VectorXd::Ones(L.nz);
    for (size_t k = 0; k < iw_unc.size(); ++k) {
      lo.Sw(iw_unc[k]) = cs((Eigen::Index)k);
      lo.Sz(iz_unc[k]) = cs((Eigen::Index)k);
    }
  };
  set_S(chanS);

  double t0 = now_s();
  LmiSolution s1 = solve_phase1(sverts, lo);
  if (opt.scaling_search && accepted(s1.status)) {
    // coordinate descent, 9-point log grid per channel scalar
    double best = s1.gamma;
    for (size_t k = 0; k < iw_unc.size(); ++k) {
      double best_s = chanS((Eigen::Index)k);
      for (int i = 0; i < 9; ++i) {
        const double s = std::pow(10.0, -2.0 + 4.0 * i / 8.0);
        VectorXd trial = chanS;
        trial((Eigen::Index)k) = s;
        set_S(trial);
        const LmiSolution cand = solve_phase1(sverts, lo);
        if (accepted(cand.status) && cand.gamma < best) {
          best = cand.gamma;
          best_s = s;
          s1 = cand;
        }
      }
      chanS((Eigen::Index)k) = best_s;
      set_S(chanS);
    }
  }
  r.t_phase1 = now_s() - t0;
  r.status1 = (s1.status == sdp::Status::optimal)    ? "optimal"
              : (s1.status == sdp::Status::inaccurate) ? "inaccurate"
              : (s1.status == sdp::Status::max_iter)   ? "max_iter"
                                                       : "failed";
  if (!accepted(s1.status))
    throw std::runtime_error("synthesis phase 1 failed: solver status " +
                             r.status1);
  r.gamma1 = s1.gamma;

  const double gamma_cert = opt.krel * s1.gamma;
  LmiSolution use = s1;
  std::vector<GridTarget> grid;
  std::vector<int> wsel, zsel;
  if (opt.mode == Mode::one_dof) {
    wsel = {0, 1};
    zsel = {0};
  } else {
    wsel = {0, 1, 2};
    zsel = {0, 1};
  }
  if (opt.phase2) {
    for (const OperatingPoint& op : grid_ops(opt.mode, opt.family)) {
      GridTarget gt;
      gt.plant = apply_scaling(
          build_augmented(P, opt.mode, family_op(opt.family, op), vs.radii,
                          opt.family, kForceScale),
          d);
      VectorXd w(vs.poly.n_vertices());
      {
        std::vector<double> th =
            (opt.family == Family::three_param)
                ? std::vector<double>{op.f_t, op.alpha, op.L_d}
                : std::vector<double>{op.L_d};
        w = tp::weights(vs.poly, th);
      }
      gt.w = w;
      grid.push_back(std::move(gt));
    }
    t0 = now_s();
    LmiSolution s2 = solve_phase2(sverts, lo, gamma_cert, grid, wsel, zsel);
    r.t_phase2 = now_s() - t0;
    r.status2 = (s2.status == sdp::Status::optimal)    ? "optimal"
                : (s2.status == sdp::Status::inaccurate) ? "inaccurate"
                : (s2.status == sdp::Status::max_iter)   ? "max_iter"
                                                         : "failed";
    if (accepted(s2.status)) use = s2;
  }
  r.gamma_cert = use.gamma;
  r.gamma_track = use.gamma_track;

  double cond = 0;
  std::vector<VertexK> K;
  try {
    K = recover_controllers(use, sverts, &cond);
  } catch (const std::runtime_error&) {
    // conditioning rescue: re-solve at fixed levels, maximizing the margin
    const double gfix =
        (use.gamma_track > 0) ? use.gamma : 1.02 * s1.gamma;
    const double gtfix = (use.gamma_track > 0) ? 1.05 * use.gamma_track : 0;
    LmiSolution s3 = solve_phase2_margin(
        sverts, lo, gfix, gtfix,
        (use.gamma_track > 0) ? grid : std::vector<GridTarget>{}, wsel, zsel);
    if (!accepted(s3.status))
      throw std::runtime_error("synthesis: margin rescue solve failed");
    use = s3;
    r.margin_rescue = true;
    r.gamma_cert = use.gamma;
    r.gamma_track = use.gamma_track;
    K = recover_controllers(use, sverts, &cond);
  }

  ScheduledController sc;
  sc.mode = opt.mode;
  sc.family = opt.family;
  sc.radii = vs.radii;
  sc.axes = vs.poly.axes;
  sc.axisW = vs.poly.axisW;
  sc.ranks = vs.poly.ranks;
  sc.K = std::move(K);
  sc.X = use.X;
  sc.Y = use.Y;
  sc.d = d;
  sc.S = chanS;
  sc.gamma = use.gamma;
  sc.gamma_track = use.gamma_track;
  sc.cond_ixy = cond;
  sc.stripe_lo = lo.stripe_lo;

  r.resid = lmi_residual(use, sverts, lo);
  {
    const int nx = L.nx;
    MatrixXd XY(2 * nx, 2 * nx);
    XY.block(0, 0, nx, nx) = use.X;
    XY.block(nx, nx, nx, nx) = use.Y;
    XY.block(0, nx, nx, nx).setIdentity();
    XY.block(nx, 0, nx, nx).setIdentity();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(XY, Eigen::EigenvaluesOnly);
    r.min_xy = es.eigenvalues().minCoeff();
  }
  r.cond_ixy = cond;

  r.pole_lo = std::numeric_limits<double>::infinity();
  r.pole_hi = -std::numeric_limits<double>::infinity();
  r.channel_gains = VectorXd::Zero((Eigen::Index)iw_unc.size());
  for (const OperatingPoint& op : validation_ops(opt.family)) {
    const AugPlant plant = apply_scaling(
        build_augmented(P, opt.mode, family_op(opt.family, op), vs.radii,
                        opt.family, kForceScale),
        d);
    const VertexK kv = sc.at({op.f_t, op.alpha, op.L_d});
    const ClosedLoop cl = close_loop(plant, kv);
    const SweepResult sw =
        sweep_closed_loop(cl, use.Sw, use.Sz, iw_unc, iz_unc);
    r.pole_lo = std::min(r.pole_lo, sw.re_min);
    r.pole_hi = std::max(r.pole_hi, sw.re_max);
    r.sweep = std::max(r.sweep, sw.hinf);
    r.channel_gains = r.channel_gains.cwiseMax(sw.channels);
  }
  r.sweep_ok = r.sweep <= 1.01 * use.gamma;
  r.t_total = now_s() - t_start;
  if (rep) *rep = r;
  return sc;
}

}  // namespace awe::syn
