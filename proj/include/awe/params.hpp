#pragma once
#include <cmath>
#include <stdexcept>

namespace awe {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Physical and aerodynamic parameters of the pumping-kite plant.
struct Params {
  // tether
  double d_t = 4e-3;      // diameter [m]
  double E_t = 90e9;      // Young modulus [Pa]
  double mu = 0.0123;     // linear density [kg/m]
  double L_t = 800.0;     // total stocked length [m]
  double b_0t = 0.0;      // internal damping coefficient [N s]
  double C_Dt = 0.96;     // tether drag coefficient
  // drum / drivetrain
  double eta = 15.0;      // gearbox ratio
  double I_r = 30.0;      // rotor-side inertia [kg m^2]
  double r = 0.2;         // drum radius [m]
  double b_d = 2.0;       // drum viscous friction [N s/m]
  // wing
  double S_w = 12.0;      // wing area [m^2]
  double m_w = 29.0;      // wing mass [kg]
  double rho = 1.22;      // air density [kg/m^3]
  double cl1 = 4.1e-2;    // dCL/dalpha [1/deg]
  double cl0 = 0.2;
  double cd1 = 1.74e-3;   // dCD/dalpha [1/deg]
  double cd0 = 0.29;

  double area() const { return kPi * d_t * d_t / 4.0; }
  double EA() const { return E_t * area(); }
  double wave_speed() const { return std::sqrt(EA() / mu); }

  double CL(double alpha_deg) const { return cl1 * alpha_deg + cl0; }
  double CD(double alpha_deg) const { return cd1 * alpha_deg + cd0; }

  // equivalent drag including the deployed-tether contribution
  double CD_eq(double alpha_deg, double L_d) const {
    return CD(alpha_deg) + d_t * L_d * C_Dt / (4.0 * S_w);
  }
  double E_eq(double alpha_deg, double L_d) const {
    return CL(alpha_deg) / CD_eq(alpha_deg, L_d);
  }

  // lumped aerodynamic force gain: f_t = c * (v_w,t - rdot)^2
  double aero_c(double alpha_deg, double L_d) const {
    const double cl = CL(alpha_deg);
    const double cd = CD_eq(alpha_deg, L_d);
    const double e = cl / cd;
    return 0.5 * rho * S_w * (1.0 + e * e) * std::sqrt(cl * cl + cd * cd);
  }
  // dc/dalpha by central difference
  double aero_c_alpha(double alpha_deg, double L_d, double h = 1e-4) const {
    return (aero_c(alpha_deg + h, L_d) - aero_c(alpha_deg - h, L_d)) / (2.0 * h);
  }
};

// Scheduling point: traction force [N], angle of attack [deg], deployed length [m].
struct OperatingPoint {
  double f_t;
  double alpha;
  double L_d;
};

struct DomainBox {
  double f_lo = 1.5e3, f_hi = 2.0e4;
  double a_lo = 4.0, a_hi = 20.0;
  double l_lo = 200.0, l_hi = 800.0;

  bool contains(const OperatingPoint& p) const {
    return p.f_t >= f_lo && p.f_t <= f_hi && p.alpha >= a_lo &&
           p.alpha <= a_hi && p.L_d >= l_lo && p.L_d <= l_hi;
  }
  void require(const OperatingPoint& p) const {
    if (!contains(p))
      throw std::domain_error("operating point outside scheduling domain");
  }
};

}  // namespace awe
