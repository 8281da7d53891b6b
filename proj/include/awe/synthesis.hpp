#pragma once
#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "awe/lpv.hpp"
#include "awe/params.hpp"
#include "awe/polytope.hpp"
#include "awe/sdp.hpp"

namespace awe::syn {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using json = nlohmann::ordered_json;

enum class Mode { one_dof, two_dof };
enum class Family { three_param, length_only };

std::string to_string(Mode m);
std::string to_string(Family f);
Mode mode_from_string(const std::string&);
Family family_from_string(const std::string&);

// Force performance/measurement signals are expressed in kN inside the
// synthesis interconnection; the polytope tensor stays in N.
inline constexpr double kForceScale = 1e-3;

// Constant relative radii r_i of the parametric deviation p_d,i = r_i * p_i.
struct RelRadii {
  double r1 = 0, r2 = 0;
};
RelRadii rel_radii(const Params& P, Family family);

// Scheduling nominal: the length-only family pins (f_t, alpha) = (10 kN, 10 deg).
OperatingPoint family_op(Family family, const OperatingPoint& op);

struct AugPlant {
  MatrixXd A, B1, B2, C1, C2, D11, D12, D21;
  std::vector<int> iw_unc, iz_unc;  // aligned (w_unc -> z_unc) channel pairs
  int nx() const { return (int)A.rows(); }
  int nw() const { return (int)B1.cols(); }
  int nu() const { return (int)B2.cols(); }
  int nz() const { return (int)C1.rows(); }
  int ny() const { return (int)C2.rows(); }
};

// Generalized plant at a physical operating point. fs = 1 keeps force signals
// in N (tensor units); fs = kForceScale expresses them in kN.
AugPlant build_augmented(const Params& P, Mode mode, const OperatingPoint& op,
                         const RelRadii& rr, Family family, double fs);

struct VertexSet {
  Mode mode;
  Family family;
  RelRadii radii;
  tp::PolytopicModel poly;       // over [A | B1], N units
  std::vector<AugPlant> verts;   // synthesis units, shared constant blocks
};
VertexSet build_vertex_set(const Params& P, Mode mode, Family family,
                           int grid_pts = 26);

// Generalized Osborne balancing over the vertex set; powers of two.
VectorXd balance_scaling(const std::vector<AugPlant>& verts);
AugPlant apply_scaling(const AugPlant& p, const VectorXd& d);

struct LmiOptions {
  double eps = 1e-8;             // strict-inequality margin
  double stripe_lo = -200.0;     // poles in (stripe_lo, stripe_hi)
  double stripe_hi = 0.0;
  VectorXd Sw, Sz;               // diagonal scalings (empty: identity)
  sdp::Options sdp;
};

struct GridTarget {
  AugPlant plant;   // exact plant at a physical theta, synthesis units
  VectorXd w;       // vertex blending weights at that theta
};

struct LmiSolution {
  sdp::Status status = sdp::Status::failed;
  double gamma = 0;         // certified robust level
  double gamma_track = 0;   // phase-2 tracking bound (0 in phase 1)
  double margin = 0;        // phase-2b coupling margin (0 otherwise)
  MatrixXd X, Y;
  std::vector<MatrixXd> At, Bt, Ct, Dt;
  VectorXd Sw, Sz;
  int iters = 0;
};

// Phase 1: minimize gamma over vertex certificates + pole stripes.
LmiSolution solve_phase1(const std::vector<AugPlant>& verts,
                         const LmiOptions& opt);

// Phase 2: gamma fixed; minimize the tracking bound gamma_track certified on
// blended grid plants over the selected w/z channels.
LmiSolution solve_phase2(const std::vector<AugPlant>& verts,
                         const LmiOptions& opt, double gamma_fixed,
                         const std::vector<GridTarget>& grid,
                         const std::vector<int>& wsel,
                         const std::vector<int>& zsel);

// Phase 2b (conditioning rescue): gamma and gamma_track fixed; maximize the
// common positivity margin, improving cond(I - XY) before recovery.
LmiSolution solve_phase2_margin(const std::vector<AugPlant>& verts,
                                const LmiOptions& opt, double gamma_fixed,
                                double gtrack_fixed,
                                const std::vector<GridTarget>& grid,
                                const std::vector<int>& wsel,
                                const std::vector<int>& zsel);

// Largest eigenvalue of any re-substituted vertex LMI (feasible: <= 0).
double lmi_residual(const LmiSolution& sol, const std::vector<AugPlant>& verts,
                    const LmiOptions& opt);

struct VertexK {
  MatrixXd Ak, Bk, Ck, Dk;
};

struct ScheduledController {
  Mode mode = Mode::one_dof;
  Family family = Family::three_param;
  RelRadii radii;
  std::vector<tp::AxisGrid> axes;   // scheduling grids (active coords)
  std::vector<MatrixXd> axisW;      // per-axis weight samples
  std::vector<int> ranks;
  std::vector<VertexK> K;
  MatrixXd X, Y;                    // scaled coordinates (diagnostics)
  VectorXd d;                       // balance scaling used
  VectorXd S;                       // uncertainty-channel scaling
  double gamma = 0, gamma_track = 0, cond_ixy = 0;
  double stripe_lo = 0;

  int nk() const { return (int)K[0].Ak.rows(); }
  int ny() const { return (int)K[0].Bk.cols(); }
  int nu() const { return (int)K[0].Ck.rows(); }
  // full theta = (f_t, alpha, L_d); length_only uses only L_d
  VectorXd weights_at(const std::array<double, 3>& theta) const;
  VertexK at(const std::array<double, 3>& theta) const;

  json to_json() const;
  static ScheduledController from_json(const json& j);
};

// Recovery of vertex controllers; throws std::runtime_error when
// cond(I - XY) > 1e10 with advice to perturb X, Y.
std::vector<VertexK> recover_controllers(const LmiSolution& sol,
                                         const std::vector<AugPlant>& verts,
                                         double* cond_out = nullptr);

struct ClosedLoop {
  MatrixXd A, B, C, D;
};
ClosedLoop close_loop(const AugPlant& p, const VertexK& k);

// sup over the grid of sigma_max(Tz H Tw) with Tw = sqrt(Sw), Tz = 1/sqrt(Sz),
// and per-channel |H(z_i, w_i)| maxima.
struct SweepResult {
  double hinf = 0;
  VectorXd channels;
  double re_min = 0, re_max = 0;  // closed-loop eigenvalue range
};
SweepResult sweep_closed_loop(const ClosedLoop& cl, const VectorXd& Sw,
                              const VectorXd& Sz, const std::vector<int>& iw,
                              const std::vector<int>& iz);

struct SynthOptions {
  Mode mode = Mode::one_dof;
  Family family = Family::three_param;
  int grid_pts = 26;
  double eps = 1e-8;
  double krel = 10.0;            // gamma_cert = krel * gamma_phase1
  bool phase2 = true;
  bool scaling_search = false;   // coordinate descent on S (9-pt log grid)
  sdp::Options sdp;
};

struct SynthReport {
  std::string mode, family;
  double r1 = 0, r2 = 0;
  int nverts = 0;
  std::string status1, status2;
  double gamma1 = 0, gamma_cert = 0, gamma_track = 0;
  double resid = 0;                   // max vertex LMI eigenvalue
  double min_xy = 0, cond_ixy = 0;
  double pole_lo = 0, pole_hi = 0;    // over validation thetas
  double sweep = 0;                   // max ||S Tzw S^-1||_inf
  bool sweep_ok = false;
  VectorXd channel_gains;
  bool margin_rescue = false;
  double t_phase1 = 0, t_phase2 = 0, t_total = 0;
  json to_json() const;
};

ScheduledController synthesize(const Params& P, const SynthOptions& opt,
                               SynthReport* rep = nullptr);

// Frozen-theta closed loop of the scheduled controller against the exact
// plant at op (plant theta) with controller scheduled at sched_theta.
ClosedLoop closed_loop_at(const Params& P, const ScheduledController& K,
                          const OperatingPoint& op,
                          const std::array<double, 3>& sched_theta);

}  // namespace awe::syn
