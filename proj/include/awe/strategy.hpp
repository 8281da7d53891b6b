#pragma once
#include <cmath>

#include "awe/params.hpp"

namespace awe {

struct StrategyConfig {
  double P_rated = 110e3;
  double hyst_frac = 0.05;  // hysteresis band as fraction of P_rated
  double alpha_max = 20.0;
  double alpha_min = 4.0;
  double pitch_lo = 0.0, pitch_hi = 25.0;
  double kp_pi = 2.0, ki_pi = 1.0;
  double tau_est = 1.0;  // estimator / setpoint low-pass [s]
  double L_nom = 400.0;  // nominal length for rated-speed derivation

  double band() const { return hyst_frac * P_rated; }
  // v_r at rated power under optimal operation P = 4 c v_r^3
  double v_r_rated(const Params& P) const {
    return std::cbrt(P_rated / (4.0 * P.aero_c(alpha_max, L_nom)));
  }
  double v_r_min(const Params& P) const { return 0.1 * v_r_rated(P); }
};

// Eq. 34: P = c(alpha, L_d) (v_w cos(phi) - v_r)^2 v_r
double instantaneous_power(const Params& P, double v_w, double phi_deg,
                           double v_r, double alpha, double L_d);

// Eq. 35: P_max = (4/27) c(alpha_max, L_d) v_w^3 cos^3(phi)
double available_power(const Params& P, double v_w, double phi_deg,
                       double alpha_max, double L_d);

// Inversion of the force balance: v_wt = v_r + sqrt(f_t / c(alpha_max, L_d)).
double wind_estimate(const Params& P, double v_r, double f_t, double alpha_max,
                     double L_d);

// Force-setpoint decay rate in L_d keeping f_ref * E_eq constant.
double fref_decay_rate(const Params& P, double f_latch, double alpha_max,
                       double L_d);

enum class Region { I, II };

// Hysteresis region classifier with the fine-pitch interlock on downswitch.
struct RegionSwitch {
  Region region = Region::I;
  // returns true if a switch event occurred
  bool update(double P_gen, double pitch, const StrategyConfig& cfg);
};

// Position-form PI with clamped anti-windup; returns the pitch rate
// (increment / dt). track() realigns the integrator for bumpless re-entry.
struct PitchPi {
  double integ = 0.0;
  void init(double pitch0, const StrategyConfig& cfg) {
    integ = pitch0 / cfg.ki_pi;
  }
  double rate(double alpha_cmd, double alpha_meas, double pitch, double dt,
              const StrategyConfig& cfg);
  void track(double alpha_cmd, double alpha_meas, double pitch,
             const StrategyConfig& cfg);
};

}  // namespace awe
