#pragma once
#include <string>
#include <vector>

#include "awe/model.hpp"

namespace awe {

// Sensitivities of the aerodynamic force about an operating point:
// df/dqdot_last, df/dv_wt, df/dalpha.
struct AeroLin {
  double df_dqd;
  double df_dvw;
  double df_dalpha;
};
AeroLin linearize_aero(const Params& P, const OperatingPoint& op,
                       const DomainBox& box = {});

// Linearized plant about (f_t_bar, alpha_bar, L_d) with labeled channels.
// States: [eps_1..eps_n, qd_1..qd_{n+1}].
struct LpvModel {
  int n;
  MatrixXd A;
  MatrixXd Bw;   // wind input v_w,t (1 col)
  MatrixXd Bd;   // uncertainty inputs w_delta (2 cols)
  MatrixXd Bu;   // control inputs [tau, alpha] (2 cols)
  MatrixXd Cd;   // uncertainty outputs z_delta (2 rows)
  MatrixXd Dd;   // z_delta feedthrough from u (2x2)
  MatrixXd Cm;   // measurements [v_r, f_t] (2 rows)
  double p1;     // sqrt(c * f_t_bar)
  double p2;     // (c_alpha / c) * f_t_bar
};

LpvModel build_lpv(const Params& P, int n, const OperatingPoint& op,
                   const DomainBox& box = {});

// Deviations of p1, p2 covering a parameter family around the nominal point.
struct UncertaintyBounds {
  double p1_nom, p1_dev;
  double p2_nom, p2_dev;
};

// 3-state reduced model (x = [eps_1, qd_1, qd_2]) in closed form with the
// parametric uncertainty channels wired for w_delta = diag(d1*pd1, d2*pd2) * z_delta.
LpvModel build_reduced_uncertain(const Params& P, const OperatingPoint& op,
                                 const UncertaintyBounds& bounds,
                                 const DomainBox& box = {});

// Close the uncertainty loop with constant delta (|delta_i| <= 1).
struct ClosedDeltas {
  MatrixXd A;
  MatrixXd Bw;
  MatrixXd Bu;
};
ClosedDeltas close_deltas(const LpvModel& m, const UncertaintyBounds& b,
                          double d1, double d2);

// Flat state-space view with channel partition labels.
struct StateSpaceModel {
  MatrixXd A, B, C, D;
  std::vector<int> iw_wind, iw_unc, iu;  // input columns
  std::vector<int> iz_unc, iy;           // output rows
  std::vector<std::string> in_names, out_names;
};
StateSpaceModel flatten(const LpvModel& m);

}  // namespace awe
