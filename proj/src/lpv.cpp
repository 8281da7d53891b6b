#include "awe/lpv.hpp"

namespace awe {

AeroLin linearize_aero(const Params& P, const OperatingPoint& op,
                       const DomainBox& box) {
  box.require(op);
  const double c = P.aero_c(op.alpha, op.L_d);
  const double ca = P.aero_c_alpha(op.alpha, op.L_d);
  const double s = 2.0 * std::sqrt(c * op.f_t);
  return {-s, s, ca / c * op.f_t};
}

LpvModel build_lpv(const Params& P, int n, const OperatingPoint& op,
                   const DomainBox& box) {
  box.require(op);
  const double ell = op.L_d / n;
  const StructMats S = assemble(P, n, ell);
  const int N = n + 1;
  const int nx = n + N;

  const double c = P.aero_c(op.alpha, op.L_d);
  const double ca = P.aero_c_alpha(op.alpha, op.L_d);
  const double p1 = std::sqrt(c * op.f_t);
  const double p2 = ca / c * op.f_t;

  MatrixXd Cf = S.Cf;
  Cf(n, n) += 2.0 * p1;

  Eigen::LDLT<MatrixXd> Mi(S.M);
  LpvModel m;
  m.n = n;
  m.p1 = p1;
  m.p2 = p2;

  m.A = MatrixXd::Zero(nx, nx);
  m.A.block(0, n, n, N) = S.L;
  m.A.block(n, 0, N, n) = -Mi.solve(S.K);
  m.A.block(n, n, N, N) = -Mi.solve(S.C + Cf);

  VectorXd e0 = VectorXd::Zero(N), en = VectorXd::Zero(N);
  e0(0) = 1.0;
  en(n) = 1.0;

  m.Bw = MatrixXd::Zero(nx, 1);
  m.Bw.block(n, 0, N, 1) = Mi.solve(2.0 * p1 * en);

  m.Bu = MatrixXd::Zero(nx, 2);
  m.Bu.block(n, 0, N, 1) = Mi.solve(-P.eta / P.r * e0);
  m.Bu.block(n, 1, N, 1) = Mi.solve(p2 * en);

  m.Bd = MatrixXd::Zero(nx, 2);
  m.Bd.block(n, 0, N, 1) = Mi.solve(-2.0 * en);
  m.Bd.block(n, 1, N, 1) = Mi.solve(en);

  m.Cd = MatrixXd::Zero(2, nx);
  m.Cd(0, nx - 1) = 1.0;  // z_d1 = qdot_{n+1}
  m.Dd = MatrixXd::Zero(2, 2);
  m.Dd(1, 1) = 1.0;  // z_d2 = alpha

  m.Cm = MatrixXd::Zero(2, nx);
  m.Cm(0, n) = 1.0;       // v_r = qdot_1
  m.Cm(1, 0) = P.EA();    // f_t = EA * eps_1
  return m;
}

LpvModel build_reduced_uncertain(const Params& P, const OperatingPoint& op,
                                 const UncertaintyBounds& bounds,
                                 const DomainBox& box) {
  box.require(op);
  const double ell = op.L_d;
  const double mu = P.mu, EA = P.EA();
  const double m_k = P.m_w;
  const double m_r = P.I_r / (P.r * P.r) + mu * (P.L_t - ell);
  const double m1 = m_k + mu * ell / 3.0;
  const double m2 = m_r + mu * ell / 3.0;
  const double m3 = m_k * m_r + mu * ell * (m_r + m_k) / 3.0 +
                    ell * ell * mu * mu / 12.0;
  const double bt = P.b_0t / ell;
  const double bd = P.b_d;
  const double p1 = bounds.p1_nom;
  const double p2 = bounds.p2_nom;
  const double gr = P.eta / P.r;
  const double me = mu * ell;

  LpvModel m;
  m.n = 1;
  m.p1 = p1;
  m.p2 = p2;

  m.A = MatrixXd::Zero(3, 3);
  m.A << 0.0, -1.0 / ell, 1.0 / ell,
      (m1 + me / 6.0) * EA / m3, -(m1 * (bd + bt) + me / 6.0 * bt) / m3,
      (m1 * bt + me / 6.0 * (bt + 2.0 * p1)) / m3,
      -(m2 + me / 6.0) * EA / m3, (me / 6.0 * (bd + bt) + m2 * bt) / m3,
      -(me / 6.0 * bt + m2 * (bt + 2.0 * p1)) / m3;

  m.Bw = MatrixXd::Zero(3, 1);
  m.Bw << 0.0, -me / 3.0 * p1 / m3, 2.0 * m2 * p1 / m3;

  m.Bu = MatrixXd::Zero(3, 2);
  m.Bu << 0.0, 0.0, -m1 * gr / m3, -me / 6.0 * p2 / m3, me / 6.0 * gr / m3,
      m2 * p2 / m3;

  m.Bd = MatrixXd::Zero(3, 2);
  m.Bd << 0.0, 0.0, me / 3.0 / m3, -me / 6.0 / m3, -2.0 * m2 / m3, m2 / m3;

  m.Cd = MatrixXd::Zero(2, 3);
  m.Cd(0, 2) = 1.0;
  m.Dd = MatrixXd::Zero(2, 2);
  m.Dd(1, 1) = 1.0;

  m.Cm = MatrixXd::Zero(2, 3);
  m.Cm(0, 1) = 1.0;
  m.Cm(1, 0) = EA;
  return m;
}

ClosedDeltas close_deltas(const LpvModel& m, const UncertaintyBounds& b,
                          double d1, double d2) {
  MatrixXd D = MatrixXd::Zero(2, 2);
  D(0, 0) = d1 * b.p1_dev;
  D(1, 1) = d2 * b.p2_dev;
  ClosedDeltas c;
  c.A = m.A + m.Bd * D * m.Cd;
  c.Bw = m.Bw;
  c.Bu = m.Bu + m.Bd * D * m.Dd;
  return c;
}

StateSpaceModel flatten(const LpvModel& m) {
  const int nx = (int)m.A.rows();
  StateSpaceModel s;
  s.A = m.A;
  s.B = MatrixXd::Zero(nx, 5);
  s.B << m.Bw, m.Bd, m.Bu;
  s.C = MatrixXd::Zero(4, nx);
  s.C << m.Cd, m.Cm;
  s.D = MatrixXd::Zero(4, 5);
  s.D.block(0, 3, 2, 2) = m.Dd;
  s.iw_wind = {0};
  s.iw_unc = {1, 2};
  s.iu = {3, 4};
  s.iz_unc = {0, 1};
  s.iy = {2, 3};
  s.in_names = {"v_wt", "w_d1", "w_d2", "tau", "alpha"};
  s.out_names = {"z_d1", "z_d2", "v_r", "f_t"};
  return s;
}

}  // namespace awe
