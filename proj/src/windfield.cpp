#include "awe/windfield.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "awe/params.hpp"

namespace awe::wind {

double kaimal_length(double z) { return 8.1 * std::min(0.7 * z, 42.0); }

double kaimal_psd(double f, double mean_speed, double height, double sigma) {
  const double L = kaimal_length(height);
  const double x = L / mean_speed;
  return 4.0 * sigma * sigma * x / std::pow(1.0 + 6.0 * f * x, 5.0 / 3.0);
}

double KaimalWave::operator()(double t) const {
  double v = U;
  for (int i = 0; i < f.size(); ++i)
    v += amp(i) * std::cos(2.0 * kPi * f(i) * t + phase(i));
  return v;
}

KaimalWave kaimal_wave(double U, double sigma, std::uint64_t seed, double z) {
  const int nf = 60;
  KaimalWave w;
  w.U = U;
  w.f.resize(nf);
  w.amp.resize(nf);
  w.phase.resize(nf);
  const double l0 = std::log10(2e-3), l1 = std::log10(2.0);
  for (int i = 0; i < nf; ++i)
    w.f(i) = std::pow(10.0, l0 + (l1 - l0) * i / (nf - 1.0));

  std::mt19937_64 rng(seed);
  auto u01 = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
  double fprev = w.f(0) * 0.5;
  for (int i = 0; i < nf; ++i) {
    const double df = w.f(i) - fprev;
    fprev = w.f(i);
    w.amp(i) = std::sqrt(2.0 * kaimal_psd(w.f(i), U, z, sigma) * df);
    w.phase(i) = 2.0 * kPi * u01();
  }
  return w;
}

TimeSeries generate_series(const WindConfig& cfg) {
  if (cfg.dt <= 0 || cfg.duration < cfg.dt || cfg.z0 <= 0)
    throw std::invalid_argument("invalid wind config");
  const double sigma = cfg.ti * cfg.mean;
  KaimalWave w = kaimal_wave(cfg.mean, sigma, cfg.seed, cfg.z_ref);
  const int n = (int)std::llround(cfg.duration / cfg.dt) + 1;
  TimeSeries ts;
  ts.t.resize(n);
  ts.v.resize(n);
  for (int k = 0; k < n; ++k) {
    ts.t(k) = k * cfg.dt;
    ts.v(k) = w(ts.t(k));
  }
  // pin the sample mean to the configured mean
  const double bias = ts.v.mean() - cfg.mean;
  ts.v.array() -= bias;
  return ts;
}

double log_law(double v_ref, double z_ref, double z, double z0) {
  if (z <= z0 || z_ref <= z0) throw std::domain_error("log_law: z <= z0");
  return v_ref * std::log(z / z0) / std::log(z_ref / z0);
}

}  // namespace awe::wind
