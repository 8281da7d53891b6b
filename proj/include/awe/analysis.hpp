#pragma once
#include <complex>
#include <vector>

#include "awe/lpv.hpp"

namespace awe {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

VectorXd log_grid(double lo, double hi, int npts);
inline VectorXd default_omega_grid() { return log_grid(1e-2, 1e3, 400); }

struct FrequencyResponse {
  VectorXd omega;
  std::vector<MatrixXcd> H;  // one ny x nu sample per omega
  bool pole_on_grid = false;
};

FrequencyResponse freq_response(const MatrixXd& A, const MatrixXd& B,
                                const MatrixXd& C, const MatrixXd& D,
                                const VectorXd& omega);

// Coupled drum-tether mode estimate, omega_n = r*sqrt(EA/(L_d*I_r)).
double first_mode_estimate(const Params& P, double L_d);

// First vibrational mode of A: the two eigenvalues of smallest modulus.
// Returns |lambda| for a complex pair, sqrt(l1*l2) for an overdamped real pair.
struct FirstMode {
  double omega_n;
  bool oscillatory;
  std::complex<double> lam1, lam2;
};
FirstMode first_mode_of(const MatrixXd& A);

// Residues of each eigenmode in the rows of C for input column b.
// res(k, i) = |c_i * v_k| * |w_k' * b| with eigenvectors v, left rows w.
MatrixXd mode_residues(const MatrixXd& A, const VectorXd& b, const MatrixXd& C,
                       VectorXcd* eigs = nullptr);

// Worst-case reduced-vs-full output error per Eq. 38 right-hand side,
// evaluated on the shared channels [v_wt, tau, alpha] -> [v_r, f_t(kN)].
struct ModelError {
  VectorXd omega;
  MatrixXd err;           // 2 x nw: per-output sup over theta of row error
  double worst[2];        // sup over omega too
  bool covered[2];        // |W_Delta(jw)| >= err for all omega
};
ModelError model_error(const Params& P, int n_full,
                       const std::vector<OperatingPoint>& thetas,
                       const VectorXd& omega);

// |W_Delta(jw)| with W_Delta = ((3.16 s + 0.63)/(s + 63.24))^2.
double w_delta_mag(double omega);

}  // namespace awe
