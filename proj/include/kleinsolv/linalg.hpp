#pragma once

#include "kleinsolv/intmatrix.hpp"

#include <Eigen/Dense>

#include <complex>
#include <utility>
#include <vector>

namespace kleinsolv::linalg {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

enum class SpectralMode { Continuous, Discrete };

/// Eigenvalues of a generator or map together with the hyperbolicity margin:
/// distance of Re(lambda) to 0 (continuous) or of |lambda| to 1 (discrete).
struct SpectrumReport {
  SpectralMode mode = SpectralMode::Continuous;
  CVec eigenvalues;          // all N, with multiplicity
  std::vector<bool> stable;  // per eigenvalue
  double margin = 0.0;       // min distance to the forbidden locus

  int stable_count() const;
  int unstable_count() const;
};

/// Real bases and projections of the invariant splitting R^N = E^s + E^u.
/// Basis columns are orthonormal within each subspace; projections are the
/// (generally oblique) projections along the complementary subspace.
struct SubspaceSplit {
  Mat basis_stable;    // N x Ns
  Mat basis_unstable;  // N x Nu
  Mat proj_stable;     // N x N
  Mat proj_unstable;   // N x N

  int dim() const { return static_cast<int>(proj_stable.rows()); }
  int dim_stable() const { return static_cast<int>(basis_stable.cols()); }
  int dim_unstable() const { return static_cast<int>(basis_unstable.cols()); }
};

/// exp(t*m) by Pade scaling and squaring.
/// Throws NumericError("magnitude overflow") when the result leaves double range.
Mat expm(const Mat& m, double t = 1.0);

struct RealLog {
  Mat log;    // M with expm(M, 1) == B^power
  int power;  // 1 or 2
};

/// Real logarithm of b when b is diagonalizable with no eigenvalue on
/// (-inf, 0]; otherwise falls back to the logarithm of b^2 (power = 2).
RealLog logm(const Mat& b);

/// Eigenvalues, stability classification and hyperbolicity margin only;
/// rejects spectra within tol (relative to the spectral radius) of the
/// forbidden locus with NumericError("not hyperbolic").
SpectrumReport spectrum_report(const Mat& m, SpectralMode mode, double tol = 1e-9);

/// Splits R^N into the stable/unstable invariant subspaces of m; the same
/// hyperbolicity rejection as spectrum_report, and additionally requires a
/// residual-certified eigenvector basis on mixed spectra.
std::pair<SpectrumReport, SubspaceSplit> eigen_split(const Mat& m, SpectralMode mode,
                                                     double tol = 1e-9);

/// Unique symmetric positive definite P with P m + m^T P = -I, via the
/// Kronecker-vectorized N^2 x N^2 linear system. Requires m Hurwitz.
Mat solve_lyapunov(const Mat& m);

/// Operator 2-norm (largest singular value).
double operator_norm(const Mat& a);
double operator_norm(const CMat& a);

} // namespace kleinsolv::linalg
