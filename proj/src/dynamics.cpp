#include "kleinsolv/dynamics.hpp"

#include "kleinsolv/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace kleinsolv::dynamics {

namespace {

mpz_class round_nearest(const mpq_class& q) {
  // floor(q + 1/2), deterministic half-up
  mpq_class shifted = q + mpq_class(1, 2);
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
  return r;
}

mpq_class frac_part(const mpq_class& q) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return q - mpq_class(fl);
}

std::vector<mpq_class> to_rational(const Vec& v) {
  std::vector<mpq_class> out(static_cast<size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw NumericError("non-finite entry");
    out[static_cast<size_t>(i)] = mpq_class(v[i]);  // dyadic, exact
  }
  return out;
}

std::vector<mpq_class> apply_rational(const IntMatrix& b, const std::vector<mpq_class>& v) {
  const int n = b.dim();
  std::vector<mpq_class> out(static_cast<size_t>(n), mpq_class(0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (b.at(i, j) != 0) out[static_cast<size_t>(i)] += mpq_class(b.at(i, j)) * v[static_cast<size_t>(j)];
  return out;
}

void require_hyperbolic_spectrum(const Mat& a, double tol) {
  Eigen::EigenSolver<Mat> es(a);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  const auto vals = es.eigenvalues();
  const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (std::abs(std::abs(vals[i]) - 1.0) <= tol * scale) throw NumericError("not hyperbolic");
}

// Norm of the limit of (I - B^n)^{-1}: the spectral projection onto the
// stable subspace (n -> +inf) or the unstable one (n -> -inf). Empty when
// the eigenvector basis is too defective to certify.
std::optional<double> limit_projection_norm(const Mat& a, bool toward_plus_infinity) {
  try {
    auto [report, split] = linalg::eigen_split(a, linalg::SpectralMode::Discrete);
    const int ns = split.dim_stable();
    const int nu = split.dim_unstable();
    if (toward_plus_infinity) {
      if (nu == 0) return 1.0;  // (I - B^n)^{-1} -> I
      if (ns == 0) return 0.0;  // -> 0
      return linalg::operator_norm(split.proj_stable);
    }
    if (ns == 0) return 1.0;
    if (nu == 0) return 0.0;
    return linalg::operator_norm(split.proj_unstable);
  } catch (const NumericError&) {
    return std::nullopt;
  }
}

// First n (in scan order) after which 20 consecutive successive differences
// stay below 1e-6; -1 when never.
long detect_stabilization(const std::vector<std::pair<long, double>>& vals) {
  constexpr int kRun = 20;
  constexpr double kDiff = 1e-6;
  if (vals.size() < 2) return -1;
  int run = 0;
  for (size_t i = 1; i < vals.size(); ++i) {
    if (std::abs(vals[i].second - vals[i - 1].second) < kDiff) {
      ++run;
      if (run >= kRun) return vals[i - static_cast<size_t>(kRun)].first;
    } else {
      run = 0;
    }
  }
  return -1;
}

} // namespace

linalg::SpectrumReport check_hyperbolic_toral(const IntMatrix& b, double tol) {
  const mpz_class d = b.det();
  if (d != 1) {
    std::ostringstream os;
    os << "not in SL(N,Z): det = " << d.get_str();
    throw NumericError(os.str());
  }
  return linalg::spectrum_report(b.to_real(), linalg::SpectralMode::Discrete, tol);
}

LatticeCheck check_lattice_condition(const Mat& m, const Mat& sigma, double h, double tol) {
  if (sigma.rows() != sigma.cols() || sigma.rows() != m.rows())
    throw NumericError("dimension mismatch");
  Eigen::FullPivLU<Mat> lu(sigma);
  if (!lu.isInvertible()) throw NumericError("sigma not invertible");
  if (!(h > 0.0)) throw NumericError("h must be positive");

  const Mat ah = linalg::expm(m, h);
  const Mat k = sigma * ah * lu.inverse();

  LatticeCheck out;
  out.max_deviation = (k - k.array().round().matrix()).cwiseAbs().maxCoeff();
  if (out.max_deviation > tol) {
    out.failure = "non-integral entries";
    return out;
  }
  const IntMatrix b = IntMatrix::round_from(k);
  if (b.det() != 1) {
    out.failure = "not unimodular";
    return out;
  }
  try {
    check_hyperbolic_toral(b);
  } catch (const NumericError& e) {
    out.failure = e.what();
    return out;
  }
  LatticeSpec spec;
  spec.toral = b;
  spec.sigma = sigma;
  spec.step = h;
  spec.generator = m;
  spec.residual = (ah - lu.inverse() * b.to_real() * sigma).norm();
  if (spec.residual > 1e-8) {
    out.failure = "consistency residual too large";
    return out;
  }
  out.passed = true;
  out.spec = std::move(spec);
  return out;
}

FixedPointRecord fixed_point(const IntMatrix& b, const ZVec& rhs, long n) {
  if (n == 0) throw NumericError("n must be nonzero");
  if (static_cast<int>(rhs.size()) != b.dim()) throw NumericError("dimension mismatch");
  const IntMatrix g = IntMatrix::identity(b.dim()) - b.pow(n);
  FixedPointRecord rec;
  rec.b = rhs;
  rec.n = n;
  rec.x = linalg::solve_exact(g, rhs);
  rec.residual = (g.to_real() * rec.x - linalg::zvec_to_real(rhs)).norm();
  return rec;
}

SweepResult fixed_point_sweep(const IntMatrix& b, const Vec& target, long n_max) {
  if (n_max < 1) throw NumericError("empty sweep");
  if (target.size() != b.dim()) throw NumericError("dimension mismatch");
  check_hyperbolic_toral(b);

  SweepResult out;
  out.bound_constant = norm_bound_scan(b, 1, n_max).sup;

  const std::vector<mpq_class> tq = to_rational(target);
  std::vector<mpq_class> v = tq;  // B^n target, exact
  out.records.reserve(static_cast<size_t>(n_max));
  out.all_bounds_ok = true;
  for (long n = 1; n <= n_max; ++n) {
    v = apply_rational(b, v);
    ZVec trans(v.size());
    Vec tile(target.size());
    for (size_t i = 0; i < v.size(); ++i) {
      trans[i] = round_nearest(tq[i] - v[i]);
      tile[static_cast<Eigen::Index>(i)] = mpq_class(v[i] + trans[i] - tq[i]).get_d();
    }
    SweepRecord sr;
    sr.rec = fixed_point(b, trans, n);
    sr.distance = (sr.rec.x - target).norm();
    sr.tile_distance = tile.norm();
    sr.bound_ok = sr.distance <= out.bound_constant * sr.tile_distance * (1.0 + 1e-9) + 1e-12;
    out.all_bounds_ok = out.all_bounds_ok && sr.bound_ok;
    out.records.push_back(std::move(sr));
  }
  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const SweepRecord& a, const SweepRecord& c) {
                     if (a.distance != c.distance) return a.distance < c.distance;
                     return a.rec.n < c.rec.n;
                   });
  return out;
}

std::vector<Vec> torus_orbit(const IntMatrix& b, const Vec& x0, long n_max) {
  if (x0.size() != b.dim()) throw NumericError("dimension mismatch");
  if (n_max < 0) throw NumericError("n_max must be nonnegative");
  const Mat br = b.to_real();
  auto reduce = [](Vec v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      v[i] -= std::floor(v[i]);
      if (v[i] >= 1.0) v[i] = 0.0;
    }
    return v;
  };
  std::vector<Vec> orbit;
  orbit.reserve(static_cast<size_t>(n_max) + 1);
  Vec f = reduce(x0);
  orbit.push_back(f);
  for (long n = 1; n <= n_max; ++n) {
    f = reduce(br * f);
    orbit.push_back(f);
  }
  return orbit;
}

std::vector<std::vector<mpq_class>> torus_orbit_exact(const IntMatrix& b,
                                                      const std::vector<mpq_class>& x0,
                                                      long n_max) {
  if (static_cast<int>(x0.size()) != b.dim()) throw NumericError("dimension mismatch");
  if (n_max < 0) throw NumericError("n_max must be nonnegative");
  std::vector<std::vector<mpq_class>> orbit;
  orbit.reserve(static_cast<size_t>(n_max) + 1);
  std::vector<mpq_class> f(x0.size());
  for (size_t i = 0; i < x0.size(); ++i) f[i] = frac_part(x0[i]);
  orbit.push_back(f);
  for (long n = 1; n <= n_max; ++n) {
    f = apply_rational(b, f);
    for (auto& q : f) q = frac_part(q);
    orbit.push_back(f);
  }
  return orbit;
}

DensityReport density_report(const std::vector<Vec>& points, double epsilon) {
  if (!(epsilon > 0.0) || epsilon > 0.5) throw NumericError("epsilon out of range");
  if (points.empty()) throw NumericError("no points");
  const int dim = static_cast<int>(points[0].size());
  const long k = static_cast<long>(std::ceil(1.0 / epsilon));
  double total_d = std::pow(static_cast<double>(k), dim);
  if (total_d > 5e7) throw NumericError("resolution too fine");
  const long total = static_cast<long>(std::llround(total_d));

  auto box_of = [&](const Vec& p) {
    long idx = 0;
    for (int i = 0; i < dim; ++i) {
      const double c = p[i];
      if (!(c >= 0.0 && c < 1.0)) throw NumericError("points must lie in [0,1)^N");
      long bi = static_cast<long>(std::floor(c * static_cast<double>(k)));
      bi = std::min(bi, k - 1);
      idx = idx * k + bi;
    }
    return idx;
  };

  std::vector<std::vector<int>> buckets(static_cast<size_t>(total));
  for (size_t pi = 0; pi < points.size(); ++pi) {
    if (static_cast<int>(points[pi].size()) != dim) throw NumericError("dimension mismatch");
    buckets[static_cast<size_t>(box_of(points[pi]))].push_back(static_cast<int>(pi));
  }

  DensityReport rep;
  rep.epsilon = epsilon;
  rep.boxes_total = total;
  for (const auto& bkt : buckets)
    if (!bkt.empty()) ++rep.boxes_hit;
  rep.coverage = static_cast<double>(rep.boxes_hit) / static_cast<double>(total);

  // torus distance from each box center to the nearest point, by expanding
  // Chebyshev rings of boxes
  const double cell = 1.0 / static_cast<double>(k);
  auto torus_dist2 = [&](const Vec& a, const Vec& bb) {
    double d2 = 0;
    for (int i = 0; i < dim; ++i) {
      double d = std::abs(a[i] - bb[i]);
      d = std::min(d, 1.0 - d);
      d2 += d * d;
    }
    return d2;
  };

  std::vector<long> center_idx(static_cast<size_t>(dim), 0);
  std::vector<long> offset(static_cast<size_t>(dim), 0);
  double worst2 = 0.0;
  Vec center(dim), probe(dim);
  for (long c = 0; c < total; ++c) {
    long rem = c;
    for (int i = dim - 1; i >= 0; --i) {
      center_idx[static_cast<size_t>(i)] = rem % k;
      rem /= k;
    }
    for (int i = 0; i < dim; ++i)
      center[i] = (static_cast<double>(center_idx[static_cast<size_t>(i)]) + 0.5) * cell;

    double best2 = std::numeric_limits<double>::infinity();
    for (long r = 0; r <= k; ++r) {
      if (best2 < std::numeric_limits<double>::infinity()) {
        const double lower = static_cast<double>(r - 1) * cell;
        if (lower > 0.0 && lower * lower > best2) break;
      }
      // enumerate boxes at Chebyshev ring r around the center box
      std::fill(offset.begin(), offset.end(), -r);
      while (true) {
        long cheb = 0;
        for (int i = 0; i < dim; ++i) cheb = std::max(cheb, std::labs(offset[static_cast<size_t>(i)]));
        if (cheb == r) {
          long idx = 0;
          for (int i = 0; i < dim; ++i) {
            long bi = (center_idx[static_cast<size_t>(i)] + offset[static_cast<size_t>(i)]) % k;
            if (bi < 0) bi += k;
            idx = idx * k + bi;
          }
          for (int pi : buckets[static_cast<size_t>(idx)])
            best2 = std::min(best2, torus_dist2(center, points[static_cast<size_t>(pi)]));
        }
        int i = dim - 1;
        while (i >= 0 && offset[static_cast<size_t>(i)] == r) {
          offset[static_cast<size_t>(i)] = -r;
          --i;
        }
        if (i < 0) break;
        ++offset[static_cast<size_t>(i)];
      }
      if (r > k / 2 + 1 && best2 < std::numeric_limits<double>::infinity()) break;
    }
    worst2 = std::max(worst2, best2);
  }
  rep.max_gap = std::sqrt(worst2);
  return rep;
}

namespace {

NormScan finish_scan(std::vector<std::pair<long, double>> vals, std::optional<double> limit_pos,
                     std::optional<double> limit_neg) {
  NormScan scan;
  scan.values = std::move(vals);
  scan.sup = 0.0;
  for (const auto& [n, v] : scan.values) scan.sup = std::max(scan.sup, v);

  std::vector<std::pair<long, double>> pos, neg;
  for (const auto& e : scan.values) (e.first > 0 ? pos : neg).push_back(e);
  std::reverse(neg.begin(), neg.end());  // order by increasing |n|

  bool ok = true;
  long at = -1;
  if (!pos.empty()) {
    const long a = detect_stabilization(pos);
    ok = ok && a >= 0;
    at = std::max(at, a);
    scan.limit_norm = limit_pos.value_or(pos.back().second);
  }
  if (!neg.empty()) {
    const long a = detect_stabilization(neg);
    ok = ok && a >= 0;
    if (a >= 0) at = std::max(at, std::labs(a));
    if (pos.empty()) scan.limit_norm = limit_neg.value_or(neg.back().second);
  }
  scan.tail_stabilized = ok;
  scan.stabilized_at = ok ? at : -1;
  return scan;
}

} // namespace

NormScan norm_bound_scan(const IntMatrix& b, long n_lo, long n_hi) {
  if (n_lo > n_hi) throw NumericError("empty scan range");
  if (n_lo <= 0 && 0 <= n_hi) throw NumericError("n range must not contain 0");
  require_hyperbolic_spectrum(b.to_real(), 1e-9);
  if (n_lo < 0 && b.det() != 1 && b.det() != -1) throw NumericError("not unimodular");

  const IntMatrix id = IntMatrix::identity(b.dim());
  std::vector<std::pair<long, double>> vals;
  vals.reserve(static_cast<size_t>(n_hi - n_lo + 1));
  IntMatrix cur = b.pow(n_lo);
  for (long n = n_lo; n <= n_hi; ++n) {
    if (n != n_lo) cur = cur * b;
    vals.emplace_back(n, linalg::operator_norm(inverse_exact(id - cur)));
  }
  return finish_scan(std::move(vals), limit_projection_norm(b.to_real(), true),
                     limit_projection_norm(b.to_real(), false));
}

NormScan norm_bound_scan(const Mat& a, long n_lo, long n_hi) {
  if (a.rows() != a.cols()) throw NumericError("matrix must be square");
  if (n_lo > n_hi) throw NumericError("empty scan range");
  if (n_lo <= 0 && 0 <= n_hi) throw NumericError("n range must not contain 0");
  require_hyperbolic_spectrum(a, 1e-9);

  const Mat id = Mat::Identity(a.rows(), a.cols());
  const Mat base = n_lo < 0 ? Mat(a.partialPivLu().solve(id)) : a;
  Mat cur = id;
  for (long k = 0; k < std::labs(n_lo); ++k) cur = cur * base;
  std::vector<std::pair<long, double>> vals;
  for (long n = n_lo; n <= n_hi; ++n) {
    if (n != n_lo) cur = cur * a;
    if (!cur.allFinite()) throw NumericError("magnitude overflow in norm scan");
    vals.emplace_back(n, linalg::operator_norm(Mat((id - cur).partialPivLu().solve(id))));
  }
  return finish_scan(std::move(vals), limit_projection_norm(a, true),
                     limit_projection_norm(a, false));
}

OrbitApprox affine_orbit_approx(const IntMatrix& b, const Vec& xstar, const Vec& target,
                                long n_max) {
  if (xstar.size() != b.dim() || target.size() != b.dim()) throw NumericError("dimension mismatch");
  if (n_max < 0) throw NumericError("n_max must be nonnegative");
  for (Eigen::Index i = 0; i < target.size(); ++i)
    if (!(target[i] > 0.0 && target[i] < 1.0))
      throw NumericError("target must lie in the open unit cube");

  const std::vector<mpq_class> tq = to_rational(target);
  std::vector<mpq_class> v = to_rational(xstar);  // B^n x*, exact
  OrbitApprox best;
  best.distance = std::numeric_limits<double>::infinity();
  for (long n = 0; n <= n_max; ++n) {
    if (n > 0) v = apply_rational(b, v);
    ZVec trans(v.size());
    double d2 = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
      trans[i] = round_nearest(tq[i] - v[i]);
      const double di = mpq_class(v[i] + trans[i] - tq[i]).get_d();
      d2 += di * di;
    }
    const double d = std::sqrt(d2);
    if (d < best.distance) {
      best.distance = d;
      best.n = n;
      best.b = trans;
    }
  }
  return best;
}

Vec generic_point(int n) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (n < 1 || n > static_cast<int>(std::size(primes)))
    throw NumericError("generic point dimension out of range");
  Vec v(n);
  for (int i = 0; i < n; ++i) {
    const double s = std::sqrt(static_cast<double>(primes[i]));
    v[i] = s - std::floor(s);
  }
  return v;
}

} // namespace kleinsolv::dynamics
