#pragma once

#include "kleinsolv/linalg.hpp"

#include <gmpxx.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kleinsolv::dynamics {

using linalg::IntMatrix;
using linalg::Mat;
using linalg::Vec;
using linalg::ZVec;

/// A verified lattice datum: B = sigma exp(h M) sigma^{-1} in SL(N, Z),
/// hyperbolic, with the consistency residual |exp(hM) - sigma^{-1} B sigma|.
struct LatticeSpec {
  IntMatrix toral;
  Mat sigma;
  double step = 1.0;
  Mat generator;
  double residual = 0.0;
};

/// Passes iff det B = 1 exactly and no eigenvalue is within tol (relative)
/// of the unit circle.
linalg::SpectrumReport check_hyperbolic_toral(const IntMatrix& b, double tol = 1e-9);

struct LatticeCheck {
  bool passed = false;
  std::optional<LatticeSpec> spec;
  double max_deviation = 0.0;  // max entrywise distance of sigma exp(hM) sigma^{-1} to Z
  std::string failure;         // empty when passed
};

LatticeCheck check_lattice_condition(const Mat& m, const Mat& sigma, double h,
                                     double tol = 1e-6);

/// Fixed point x of z -> B^n z + b, i.e. the exact rational solution of
/// (I - B^n) x = b rounded to double.
struct FixedPointRecord {
  ZVec b;
  long n = 0;
  Vec x;
  double residual = 0.0;
};

FixedPointRecord fixed_point(const IntMatrix& b, const ZVec& rhs, long n);

struct SweepRecord {
  FixedPointRecord rec;
  double distance = 0.0;       // |x - target|
  double tile_distance = 0.0;  // |B^n target + b - target|
  bool bound_ok = false;       // distance <= C * tile_distance
};

struct SweepResult {
  std::vector<SweepRecord> records;  // sorted by distance, ties by n
  double bound_constant = 0.0;       // C = sup_n |(I - B^n)^{-1}|
  bool all_bounds_ok = false;
};

/// For each n in [1, n_max] picks the integer translation b landing
/// B^n target + b in the unit tile around the target, and records the
/// induced fixed point with its distance bound.
SweepResult fixed_point_sweep(const IntMatrix& b, const Vec& target, long n_max);

/// Orbit {B^n x0 mod 1 : 0 <= n <= n_max}, double precision with mod-1
/// reduction each step.
std::vector<Vec> torus_orbit(const IntMatrix& b, const Vec& x0, long n_max);

/// Exact rational orbit for rational x0.
std::vector<std::vector<mpq_class>> torus_orbit_exact(const IntMatrix& b,
                                                      const std::vector<mpq_class>& x0,
                                                      long n_max);

struct DensityReport {
  double epsilon = 0.0;
  long boxes_total = 0;
  long boxes_hit = 0;
  double coverage = 0.0;
  double max_gap = 0.0;  // largest distance from a box center to the nearest point
};

/// Box-counting density of points in [0,1)^N at resolution epsilon.
DensityReport density_report(const std::vector<Vec>& points, double epsilon);

struct NormScan {
  std::vector<std::pair<long, double>> values;  // (n, |(I - B^n)^{-1}|)
  double sup = 0.0;
  // norm of the structural limit, a spectral projection; the last scanned
  // value stands in when the eigenvector basis cannot certify one
  double limit_norm = 0.0;
  bool tail_stabilized = false;
  long stabilized_at = -1;
};

/// Exact-power scan of |(I - B^n)^{-1}| over n in [n_lo, n_hi] (0 excluded).
NormScan norm_bound_scan(const IntMatrix& b, long n_lo, long n_hi);
/// Double-precision variant for real matrices.
NormScan norm_bound_scan(const Mat& a, long n_lo, long n_hi);

struct OrbitApprox {
  ZVec b;
  long n = 0;
  double distance = 0.0;
};

/// Minimizes |B^n x* + b - target| over 0 <= n <= n_max with b the nearest
/// integer translation, in exact dyadic arithmetic.
OrbitApprox affine_orbit_approx(const IntMatrix& b, const Vec& xstar, const Vec& target,
                                long n_max);

/// The default generic point (sqrt(2)-1, sqrt(3)-1, sqrt(5)-2, ...).
Vec generic_point(int n);

} // namespace kleinsolv::dynamics
