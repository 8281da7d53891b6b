#include "awe/model.hpp"

namespace awe {

StructMats assemble(const Params& P, int n, double ell) {
  const int N = n + 1;
  const double L_d = n * ell;
  const double m_r = P.I_r / (P.r * P.r) + P.mu * (P.L_t - L_d);

  StructMats S;
  S.M = MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    if (i == 0)
      S.M(i, i) = m_r + P.mu * ell / 3.0;
    else if (i == n)
      S.M(i, i) = P.m_w + P.mu * ell / 3.0;
    else
      S.M(i, i) = 2.0 * P.mu * ell / 3.0;
    if (i < n) {
      S.M(i, i + 1) = P.mu * ell / 6.0;
      S.M(i + 1, i) = P.mu * ell / 6.0;
    }
  }

  S.C = MatrixXd::Zero(N, N);
  const double b = P.b_0t / ell;
  for (int i = 0; i < N; ++i) {
    S.C(i, i) = (i == 0 || i == n) ? b : 2.0 * b;
    if (i < n) {
      S.C(i, i + 1) = -b;
      S.C(i + 1, i) = -b;
    }
  }

  const double EA = P.EA();
  S.K = MatrixXd::Zero(N, n);
  for (int j = 0; j < n; ++j) {
    S.K(j, j) = -EA;
    S.K(j + 1, j) = EA;
  }

  S.L = MatrixXd::Zero(n, N);
  for (int j = 0; j < n; ++j) {
    S.L(j, j) = -1.0 / ell;
    S.L(j, j + 1) = 1.0 / ell;
  }

  S.Cf = MatrixXd::Zero(N, N);
  S.Cf(0, 0) = P.b_d;
  return S;
}

void plant_deriv(const Params& P, int n, double L_d, const PlantState& x,
                 double tau, double alpha, double vwt, VectorXd& deps,
                 VectorXd& dqd) {
  const double ell = L_d / n;
  const StructMats S = assemble(P, n, ell);
  const double c = P.aero_c(alpha, L_d);
  const double dv = vwt - x.qd(n);
  const double fw = c * dv * dv;

  VectorXd f = -S.K * x.eps - (S.C + S.Cf) * x.qd;
  f(0) -= P.eta / P.r * tau;
  f(n) += fw;

  deps = S.L * x.qd;
  dqd = S.M.ldlt().solve(f);
}

Equilibrium trim(const Params& P, int n, double L_d, double vwt, double v_r,
                 double alpha) {
  const double c = P.aero_c(alpha, L_d);
  const double dv = vwt - v_r;
  const double fw = c * dv * dv;
  Equilibrium e;
  e.eps = VectorXd::Constant(n, fw / P.EA());
  e.qdot = v_r;
  e.tau = P.r / P.eta * (fw - P.b_d * v_r);
  e.f_t = fw;
  return e;
}

}  // namespace awe
