#include "kleinsolv/regions.hpp"

#include "kleinsolv/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace kleinsolv::regions {

namespace {

LyapunovMetric make_metric(const Mat& block_generator) {
  LyapunovMetric m;
  m.p = linalg::solve_lyapunov(block_generator);
  Eigen::SelfAdjointEigenSolver<Mat> es(m.p);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  m.growth_constant = std::sqrt(hi / lo);
  m.decay_rate = 1.0 / (2.0 * hi);
  return m;
}

void require_stable_nontrivial(const HyperbolicSplitting& s) {
  if (s.dim_stable() == 0) throw NumericError("stable subspace is trivial");
}

} // namespace

double HyperbolicSplitting::sphere_value(const Vec& x) const {
  if (!metric_stable) throw NumericError("stable subspace is trivial");
  return metric_stable->value(stable_coords(x));
}

HyperbolicSplitting build_splitting(const Mat& m, double tol) {
  HyperbolicSplitting s;
  auto [report, split] = linalg::eigen_split(m, linalg::SpectralMode::Continuous, tol);
  s.spectrum = std::move(report);
  s.split = std::move(split);
  const int ns = s.dim_stable();
  const int nu = s.dim_unstable();
  s.gen_stable = s.split.basis_stable.transpose() * m * s.split.basis_stable;
  s.gen_unstable = s.split.basis_unstable.transpose() * m * s.split.basis_unstable;
  if (ns > 0) s.metric_stable = make_metric(s.gen_stable);
  // the reversed flow is stable on E^u
  if (nu > 0) s.metric_unstable = make_metric(Mat(-s.gen_unstable));
  return s;
}

ChartDecomposition decompose(const CVec& z, const HyperbolicSplitting& s) {
  if (z.size() != s.dim()) throw NumericError("dimension mismatch");
  ChartDecomposition d;
  d.real_part = z.real();
  d.imag_stable = s.split.proj_stable * z.imag();
  d.imag_unstable = s.split.proj_unstable * z.imag();
  return d;
}

double time_to_sphere(const Vec& x, const HyperbolicSplitting& s) {
  require_stable_nontrivial(s);
  if (x.size() != s.dim()) throw NumericError("dimension mismatch");
  const double xn = x.norm();
  if (!(xn > 0.0) || (s.split.proj_stable * x - x).norm() > 1e-9 * xn)
    throw NumericError("invalid stable vector");

  const Vec c = s.stable_coords(x);
  const Mat& r = s.gen_stable;
  const Mat& p = s.metric_stable->p;
  auto value = [&](double t) {
    const Vec y = linalg::expm(r, t) * c;
    return y.dot(p * y);
  };
  auto slope = [&](double t) {
    const Vec y = linalg::expm(r, t) * c;
    return -y.squaredNorm();  // d/dt V = -|exp(tR)c|^2
  };

  const double v0 = value(0.0);
  if (std::abs(v0 - 1.0) <= 1e-14) return 0.0;

  // bracket the crossing of the strictly decreasing V
  double lo = 0.0, hi = 0.0;
  double step = 1.0;
  if (v0 > 1.0) {
    while (value(hi) > 1.0) {
      lo = hi;
      hi += step;
      step *= 2.0;
      if (step > 1e12) throw NumericError("time_to_sphere failed to bracket");
    }
  } else {
    while (value(lo) < 1.0) {
      hi = lo;
      lo -= step;
      step *= 2.0;
      if (step > 1e12) throw NumericError("time_to_sphere failed to bracket");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (value(mid) > 1.0 ? lo : hi) = mid;
  }
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) t -= (value(t) - 1.0) / slope(t);
  if (std::abs(value(t) - 1.0) > 1e-10) throw NumericError("time_to_sphere did not converge");
  return t;
}

CVec psi_minus(const GroupElement& g, const Vec& x, const Vec& y, const GroupContext& ctx,
               const HyperbolicSplitting& s) {
  require_stable_nontrivial(s);
  if (x.size() != s.dim() || y.size() != s.dim() || g.b.size() != s.dim())
    throw NumericError("dimension mismatch");
  if ((s.split.proj_stable * x - x).norm() > 1e-9 * (1.0 + x.norm()) ||
      std::abs(s.sphere_value(x) - 1.0) > 1e-9)
    throw NumericError("not on sphere");
  if ((s.split.proj_unstable * y - y).norm() > 1e-9 * (1.0 + y.norm()))
    throw NumericError("not in unstable subspace");
  const Mat a = ctx.flow(g.t);
  CVec z(s.dim());
  z.real() = g.b;
  z.imag() = a * (x + y);
  return z;
}

PsiPreimage psi_minus_inv(const CVec& z, const GroupContext& ctx, const HyperbolicSplitting& s) {
  require_stable_nontrivial(s);
  const ChartDecomposition d = decompose(z, s);
  if (d.imag_stable.norm() <= 1e-12 * (1.0 + z.norm())) throw NumericError("not in U-minus");
  const double t = time_to_sphere(d.imag_stable, s);
  const Mat a = ctx.flow(t);
  PsiPreimage pre;
  pre.g = {d.real_part, -t};
  pre.x = a * d.imag_stable;
  pre.y = a * d.imag_unstable;
  return pre;
}

const char* to_string(RegionLabel label) {
  switch (label) {
    case RegionLabel::OmegaMinusOnly: return "OmegaMinusOnly";
    case RegionLabel::OmegaPlusOnly: return "OmegaPlusOnly";
    case RegionLabel::Both: return "Both";
    case RegionLabel::LimitSetChart: return "LimitSetChart";
    case RegionLabel::LimitSetInfinity: return "LimitSetInfinity";
  }
  return "?";
}

Classification classify_chart(const CVec& z, const HyperbolicSplitting& s, double tol) {
  const ChartDecomposition d = decompose(z, s);
  const double denom = 1.0 + z.norm();
  Classification c;
  c.stable_size = d.imag_stable.norm() / denom;
  c.unstable_size = d.imag_unstable.norm() / denom;
  const bool in_minus = c.stable_size > tol;
  const bool in_plus = c.unstable_size > tol;
  if (in_minus && in_plus)
    c.label = RegionLabel::Both;
  else if (in_minus)
    c.label = RegionLabel::OmegaMinusOnly;
  else if (in_plus)
    c.label = RegionLabel::OmegaPlusOnly;
  else
    c.label = RegionLabel::LimitSetChart;
  auto near_cut = [tol](double v) { return v > tol * 0.1 && v < tol * 10.0; };
  c.boundary_hit = near_cut(c.stable_size) || near_cut(c.unstable_size);
  return c;
}

Classification classify(const ProjectivePoint& p, const HyperbolicSplitting& s, double tol) {
  const CVec& v = p.coords();
  if (std::abs(v[v.size() - 1]) <= 1e-12) {
    Classification c;
    c.label = RegionLabel::LimitSetInfinity;
    return c;
  }
  return classify_chart(group::chart(p), s, tol);
}

WitnessTable divergence_witness(const CVec& z1, const CVec& z2, long n_max,
                                const GroupContext& ctx, const HyperbolicSplitting& s) {
  if (n_max < 1) throw NumericError("n_max must be positive");
  if (classify_chart(z1, s).label != RegionLabel::OmegaPlusOnly ||
      classify_chart(z2, s).label != RegionLabel::OmegaMinusOnly)
    throw NumericError("wrong regions");

  const Vec b1 = z1.real(), b2 = z2.real();
  const Vec y1 = s.split.proj_unstable * z1.imag();
  const Vec y2 = s.split.proj_stable * z2.imag();

  WitnessTable table;
  table.rows.reserve(static_cast<size_t>(n_max));
  for (long n = 1; n <= n_max; ++n) {
    const Mat back = ctx.flow(-static_cast<double>(n));
    const Mat fwd = ctx.flow(static_cast<double>(n));
    WitnessRow row;
    row.n = n;
    row.w = CVec(s.dim());
    row.w.real() = b2;
    row.w.imag() = back * y1 + y2;
    // g_n = (b1, 0) . (0, n) . (-b2, 0); its flow part diverges with n
    const GroupElement gn{b1 - fwd * b2, static_cast<double>(n)};
    row.gw = group::act_affine(gn, row.w, ctx);
    row.dist_to_z2 = (row.w - z2).norm();
    row.dist_to_z1 = (row.gw - z1).norm();
    table.rows.push_back(std::move(row));
  }
  table.settled_at = -1;
  for (long i = static_cast<long>(table.rows.size()) - 1; i > 0; --i) {
    const auto& prev = table.rows[static_cast<size_t>(i - 1)];
    const auto& cur = table.rows[static_cast<size_t>(i)];
    const double slack = 1e-12;
    if (cur.dist_to_z2 <= prev.dist_to_z2 * (1.0 + slack) + slack &&
        cur.dist_to_z1 <= prev.dist_to_z1 * (1.0 + slack) + slack)
      table.settled_at = prev.n;
    else
      break;
  }
  if (table.settled_at < 0) throw NumericError("witness distances never settled");
  return table;
}

SphereMapResult induced_sphere_map(const Vec& x, const GroupContext& ctx,
                                   const HyperbolicSplitting& s) {
  require_stable_nontrivial(s);
  if (!ctx.toral) throw NumericError("context has no toral matrix");
  if (std::abs(s.sphere_value(x) - 1.0) > 1e-9 ||
      (s.split.proj_stable * x - x).norm() > 1e-9 * (1.0 + x.norm()))
    throw NumericError("not on sphere");
  const Mat b = ctx.toral->to_real();
  const Vec bx = b * x;
  if ((s.split.proj_unstable * bx).norm() > 1e-8 * (1.0 + bx.norm()))
    throw NumericError("split mismatch");
  const Vec bxs = s.split.proj_stable * bx;
  SphereMapResult r;
  r.time = time_to_sphere(bxs, s);
  const Mat a = ctx.flow(r.time);
  r.f1 = a * bxs;
  if (s.dim_unstable() > 0) {
    r.f2 = s.split.basis_unstable.transpose() * a * b * s.split.basis_unstable;
    if (std::abs(Eigen::FullPivLU<Mat>(r.f2).determinant()) <= 1e-12)
      throw NumericError("induced unstable map is singular");
  } else {
    r.f2 = Mat(0, 0);
  }
  return r;
}

} // namespace kleinsolv::regions
