#pragma once
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace awe::wind {

using Eigen::VectorXd;

struct WindConfig {
  double mean = 10.0;    // [m/s] at reference height
  double z_ref = 100.0;  // [m]
  double z0 = 0.05;      // roughness length [m]
  double ti = 0.10;      // turbulence intensity, sigma = ti * mean
  double duration = 600.0;
  double dt = 0.02;
  std::uint64_t seed = 0;
};

// IEC Kaimal length scale
double kaimal_length(double z);

// S(f) = 4 sigma^2 (L/U) / (1 + 6 f L / U)^(5/3)
double kaimal_psd(double f, double mean_speed, double height, double sigma);

// Sum-of-sinusoids synthesis over 60 log-spaced frequencies in [2e-3, 2] Hz.
struct KaimalWave {
  double U = 0.0;
  VectorXd f, amp, phase;
  double operator()(double t) const;
};
KaimalWave kaimal_wave(double U, double sigma, std::uint64_t seed,
                       double z = 100.0);

struct TimeSeries {
  VectorXd t, v;
};
TimeSeries generate_series(const WindConfig& cfg);

double log_law(double v_ref, double z_ref, double z, double z0);

}  // namespace awe::wind
