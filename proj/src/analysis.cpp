#include "awe/analysis.hpp"

#include <algorithm>

namespace awe {

VectorXd log_grid(double lo, double hi, int npts) {
  VectorXd w(npts);
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < npts; ++i)
    w(i) = std::pow(10.0, a + (b - a) * i / (npts - 1.0));
  return w;
}

FrequencyResponse freq_response(const MatrixXd& A, const MatrixXd& B,
                                const MatrixXd& C, const MatrixXd& D,
                                const VectorXd& omega) {
  const int nx = (int)A.rows();
  FrequencyResponse fr;
  fr.omega = omega;
  fr.H.reserve(omega.size());

  Eigen::VectorXcd lam = A.eigenvalues();
  for (int k = 0; k < omega.size(); ++k) {
    const std::complex<double> s(0.0, omega(k));
    for (int i = 0; i < lam.size(); ++i)
      if (std::abs(s - lam(i)) < 1e-12 * (1.0 + std::abs(lam(i))))
        fr.pole_on_grid = true;
    MatrixXcd M = s * MatrixXcd::Identity(nx, nx) - A.cast<std::complex<double>>();
    fr.H.push_back(C.cast<std::complex<double>>() *
                       M.partialPivLu().solve(B.cast<std::complex<double>>()) +
                   D.cast<std::complex<double>>());
  }
  return fr;
}

double first_mode_estimate(const Params& P, double L_d) {
  return P.r * std::sqrt(P.EA() / (L_d * P.I_r));
}

FirstMode first_mode_of(const MatrixXd& A) {
  Eigen::VectorXcd lam = A.eigenvalues();
  std::vector<std::complex<double>> v(lam.data(), lam.data() + lam.size());
  std::sort(v.begin(), v.end(), [](auto a, auto b) {
    return std::abs(a) < std::abs(b);
  });
  FirstMode fm;
  fm.lam1 = v[0];
  fm.lam2 = v[1];
  if (std::abs(v[0].imag()) > 1e-9 * std::abs(v[0])) {
    fm.oscillatory = true;
    fm.omega_n = std::abs(v[0]);
  } else {
    fm.oscillatory = false;
    fm.omega_n = std::sqrt(std::abs(v[0].real() * v[1].real()));
  }
  return fm;
}

MatrixXd mode_residues(const MatrixXd& A, const VectorXd& b, const MatrixXd& C,
                       VectorXcd* eigs) {
  Eigen::EigenSolver<MatrixXd> es(A);
  MatrixXcd V = es.eigenvectors();
  VectorXcd lam = es.eigenvalues();
  MatrixXcd W = V.inverse();
  if (eigs) *eigs = lam;
  const int nx = (int)A.rows(), ny = (int)C.rows();
  MatrixXd res(nx, ny);
  for (int k = 0; k < nx; ++k) {
    const std::complex<double> inj = W.row(k) * b.cast<std::complex<double>>();
    for (int i = 0; i < ny; ++i) {
      const std::complex<double> obs =
          C.row(i).cast<std::complex<double>>() * V.col(k);
      res(k, i) = std::abs(obs * inj);
    }
  }
  return res;
}

double w_delta_mag(double omega) {
  const std::complex<double> s(0.0, omega);
  const std::complex<double> w = (3.16 * s + 0.63) / (s + 63.24);
  return std::norm(w);  // |w|^2 = magnitude of the squared weight
}

ModelError model_error(const Params& P, int n_full,
                       const std::vector<OperatingPoint>& thetas,
                       const VectorXd& omega) {
  ModelError me;
  me.omega = omega;
  me.err = MatrixXd::Zero(2, omega.size());

  const double fs = 1e-3;  // force rows compared in kN
  for (const auto& th : thetas) {
    LpvModel full = build_lpv(P, n_full, th);
    LpvModel red = build_lpv(P, 1, th);

    auto io = [&](const LpvModel& m) {
      MatrixXd B(m.A.rows(), 3);
      B << m.Bw, m.Bu;
      MatrixXd C = m.Cm;
      C.row(1) *= fs;
      return std::pair<MatrixXd, MatrixXd>(B, C);
    };
    auto [Bf, Cf] = io(full);
    auto [Br, Cr] = io(red);
    FrequencyResponse Hf = freq_response(full.A, Bf, Cf, MatrixXd::Zero(2, 3), omega);
    FrequencyResponse Hr = freq_response(red.A, Br, Cr, MatrixXd::Zero(2, 3), omega);

    for (int k = 0; k < omega.size(); ++k) {
      for (int i = 0; i < 2; ++i) {
        const double e = (Hr.H[k].row(i) - Hf.H[k].row(i)).norm();
        me.err(i, k) = std::max(me.err(i, k), e);
      }
    }
  }
  for (int i = 0; i < 2; ++i) {
    me.worst[i] = 0.0;
    me.covered[i] = true;
    for (int k = 0; k < omega.size(); ++k) {
      me.worst[i] = std::max(me.worst[i], me.err(i, k));
      if (w_delta_mag(omega(k)) < me.err(i, k)) me.covered[i] = false;
    }
  }
  return me;
}

}  // namespace awe
