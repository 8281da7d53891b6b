#pragma once
#include <Eigen/Dense>

#include "awe/params.hpp"

namespace awe {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Lumped-mass tether + drum + wing structural matrices for n segments of
// length ell. Generalized coordinates: radial node positions q_1..q_{n+1}
// (q_1 at the drum exit, q_{n+1} at the wing); internal states use strains
// eps_1..eps_n and velocities qdot_1..qdot_{n+1}.
struct StructMats {
  MatrixXd M;   // (n+1)x(n+1) mass
  MatrixXd C;   // (n+1)x(n+1) internal damping (from b_0t)
  MatrixXd K;   // (n+1)xn stiffness, maps strains to forces
  MatrixXd L;   // nx(n+1) strain-rate map
  MatrixXd Cf;  // (n+1)x(n+1) boundary damping placeholder (drum friction)
};

StructMats assemble(const Params& P, int n, double ell);

// Nonlinear state: x = [eps_1..eps_n, qdot_1..qdot_{n+1}].
struct PlantState {
  VectorXd eps;
  VectorXd qd;
};

// Right-hand side of the nonlinear lumped model. tau is the winch motor
// torque [N m] (rotor side), alpha in degrees, vwt the tangential wind
// speed at the wing [m/s], L_d the deployed length [m].
void plant_deriv(const Params& P, int n, double L_d, const PlantState& x,
                 double tau, double alpha, double vwt, VectorXd& deps,
                 VectorXd& dqd);

// Steady reel-out equilibrium at given wind, reel speed, alpha, length.
// Returns strains, uniform node velocity and the balancing motor torque.
struct Equilibrium {
  VectorXd eps;
  double qdot;
  double tau;
  double f_t;  // traction force at the wing [N]
};
Equilibrium trim(const Params& P, int n, double L_d, double vwt, double v_r,
                 double alpha);

}  // namespace awe
