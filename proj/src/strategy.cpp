#include "awe/strategy.hpp"

#include <algorithm>

namespace awe {

double instantaneous_power(const Params& P, double v_w, double phi_deg,
                           double v_r, double alpha, double L_d) {
  const double vwt = v_w * std::cos(phi_deg * kPi / 180.0);
  const double rel = vwt - v_r;
  return P.aero_c(alpha, L_d) * rel * rel * v_r;
}

double available_power(const Params& P, double v_w, double phi_deg,
                       double alpha_max, double L_d) {
  const double cphi = std::cos(phi_deg * kPi / 180.0);
  const double c = P.aero_c(alpha_max, L_d);
  return 4.0 / 27.0 * c * v_w * v_w * v_w * cphi * cphi * cphi;
}

double wind_estimate(const Params& P, double v_r, double f_t, double alpha_max,
                     double L_d) {
  const double c = P.aero_c(alpha_max, L_d);
  return v_r + std::sqrt(std::max(f_t, 0.0) / c);
}

double fref_decay_rate(const Params& P, double f_latch, double alpha_max,
                       double L_d) {
  // d/dL of the tether drag share: f_ref E_eq constant under growing L_d.
  const double cdeq = P.CD_eq(alpha_max, L_d);
  return f_latch * (P.d_t * P.C_Dt / (4.0 * P.S_w)) / cdeq;
}

bool RegionSwitch::update(double P_gen, double pitch,
                          const StrategyConfig& cfg) {
  const double half = 0.5 * cfg.band();
  if (region == Region::I) {
    if (P_gen > cfg.P_rated + half) {
      region = Region::II;
      return true;
    }
  } else {
    if (P_gen < cfg.P_rated - half && pitch >= cfg.alpha_max - 0.5) {
      region = Region::I;
      return true;
    }
  }
  return false;
}

double PitchPi::rate(double alpha_cmd, double alpha_meas, double pitch,
                     double dt, const StrategyConfig& cfg) {
  const double err = alpha_cmd - alpha_meas;
  const double integ_new = integ + err * dt;
  double pnew = cfg.kp_pi * err + cfg.ki_pi * integ_new;
  if (pnew > cfg.pitch_hi || pnew < cfg.pitch_lo) {
    pnew = std::clamp(pnew, cfg.pitch_lo, cfg.pitch_hi);
  } else {
    integ = integ_new;
  }
  return (pnew - pitch) / dt;
}

void PitchPi::track(double alpha_cmd, double alpha_meas, double pitch,
                    const StrategyConfig& cfg) {
  integ = (pitch - cfg.kp_pi * (alpha_cmd - alpha_meas)) / cfg.ki_pi;
}

}  // namespace awe
