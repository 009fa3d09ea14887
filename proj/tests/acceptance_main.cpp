// Acceptance suite: one criterion per function, one pass/fail line each.
// Exit code is the number of failed criteria.

#include "kleinsolv/dynamics.hpp"
#include "kleinsolv/errors.hpp"
#include "kleinsolv/group.hpp"
#include "kleinsolv/linalg.hpp"
#include "kleinsolv/regions.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace kleinsolv;
using group::GroupContext;
using group::GroupElement;
using linalg::CVec;
using linalg::IntMatrix;
using linalg::Mat;
using linalg::Vec;
using regions::HyperbolicSplitting;
using regions::RegionLabel;

namespace {

struct Criterion {
  int id;
  std::string name;
  std::function<void()> body;  // throws std::runtime_error on failure
  double time_limit = 0.0;     // seconds; 0 = none
};

void require(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

IntMatrix cat2() { return IntMatrix::from_rows({{2, 1}, {1, 1}}); }

Mat cat_log() { return linalg::logm(cat2().to_real()).log; }

GroupContext cat_context() {
  const auto rl = linalg::logm(cat2().to_real());
  return GroupContext::disconnected(rl.log, cat2(), rl.power);
}

Mat diag4() {
  Mat m = Mat::Zero(4, 4);
  m(0, 0) = -1;
  m(1, 1) = 2;
  m(2, 2) = 1;
  m(3, 3) = -3;
  return m;
}

Vec random_vec(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

Mat random_matrix(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = scale * u(rng);
  return m;
}

Vec random_sphere_point(std::mt19937_64& rng, const HyperbolicSplitting& s) {
  while (true) {
    const Vec c = random_vec(rng, s.dim_stable(), -1.0, 1.0);
    const double v = s.metric_stable->value(c);
    if (v > 1e-6) return s.split.basis_stable * (c / std::sqrt(v));
  }
}

double multiset_distance(std::vector<std::complex<double>> a,
                         std::vector<std::complex<double>> b) {
  double worst = 0.0;
  for (const auto& x : a) {
    size_t best = 0;
    double bestd = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < b.size(); ++j) {
      const double d = std::abs(x - b[j]);
      if (d < bestd) {
        bestd = d;
        best = j;
      }
    }
    worst = std::max(worst, bestd);
    b.erase(b.begin() + static_cast<long>(best));
  }
  return worst;
}

// 1. Lyapunov correctness on random Hurwitz generators.
void criterion_lyapunov() {
  std::mt19937_64 rng(101);
  for (int k = 0; k < 50; ++k) {
    const int n = 1 + static_cast<int>(rng() % 6);
    Mat m = random_matrix(rng, n, 1.0);
    Eigen::EigenSolver<Mat> es(m);
    m -= (es.eigenvalues().real().maxCoeff() + 0.5) * Mat::Identity(n, n);
    const Mat p = linalg::solve_lyapunov(m);
    const double residual = (p * m + m.transpose() * p + Mat::Identity(n, n)).norm();
    require(residual <= 1e-10, "residual " + std::to_string(residual));
    Eigen::SelfAdjointEigenSolver<Mat> pe(p);
    require(pe.eigenvalues().minCoeff() > 0.0, "P not positive definite");
  }
}

// 2. exp/log roundtrip and the one-parameter group law.
void criterion_exp_log() {
  const Mat m = cat_log();
  const Mat back = linalg::expm(m, 1.0);
  require((back - cat2().to_real()).cwiseAbs().maxCoeff() <= 1e-9,
          "cat-map roundtrip exceeded 1e-9");

  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> ts(-3.0, 3.0);
  std::uniform_real_distribution<double> mag(0.0, 5.0);
  int accepted = 0;
  while (accepted < 500) {
    const int n = 1 + static_cast<int>(rng() % 6);
    Mat a = random_matrix(rng, n, 1.0);
    a *= mag(rng) / std::max(1e-9, linalg::operator_norm(a));
    const double s = ts(rng), t = ts(rng);
    // double precision can certify the law only below the conditioning wall
    if ((std::abs(s) + std::abs(t)) * linalg::operator_norm(a) > 8.5) continue;
    ++accepted;
    const Mat whole = linalg::expm(a, s + t);
    const double dev = (whole - linalg::expm(a, s) * linalg::expm(a, t)).norm();
    require(dev <= 1e-10 * (1.0 + whole.norm()), "group law deviation " + std::to_string(dev));
  }
}

// 3. psi-minus roundtrips and equivariance on both named generators.
void criterion_psi() {
  std::mt19937_64 rng(103);
  for (const Mat& m : {diag4(), cat_log()}) {
    const auto ctx = GroupContext::connected(m);
    const auto s = regions::build_splitting(m);
    for (int k = 0; k < 1000; ++k) {
      // |t| <= 1 keeps |A(t)| <= e^3 for diag(-1,2,1,-3); the absolute 1e-9
      // equivariance bound is not representable once flows reach e^12
      const GroupElement g{random_vec(rng, s.dim(), -2, 2), random_vec(rng, 1, -1, 1)[0]};
      const Vec x = random_sphere_point(rng, s);
      const Vec y = s.split.basis_unstable * random_vec(rng, s.dim_unstable(), -1, 1);

      const CVec z = regions::psi_minus(g, x, y, ctx, s);
      const auto pre = regions::psi_minus_inv(z, ctx, s);
      const double fwd = std::max({(pre.g.b - g.b).norm(), std::abs(pre.g.t - g.t),
                                   (pre.x - x).norm(), (pre.y - y).norm()});
      require(fwd < 1e-8, "forward roundtrip " + fmt(fwd));

      CVec w(s.dim());
      do {
        w.real() = random_vec(rng, s.dim(), -2, 2);
        w.imag() = random_vec(rng, s.dim(), -2, 2);
      } while ((s.split.proj_stable * w.imag()).norm() < 1e-3);
      const auto wpre = regions::psi_minus_inv(w, ctx, s);
      const double bwd = (regions::psi_minus(wpre.g, wpre.x, wpre.y, ctx, s) - w).norm();
      require(bwd < 1e-8, "backward roundtrip " + fmt(bwd));

      const GroupElement h{random_vec(rng, s.dim(), -2, 2), random_vec(rng, 1, -1, 1)[0]};
      const CVec lhs = regions::psi_minus(group::compose(g, h, ctx), x, y, ctx, s);
      const CVec rhs = group::act_affine(g, regions::psi_minus(h, x, y, ctx, s), ctx);
      require((lhs - rhs).norm() < 1e-9, "equivariance " + fmt((lhs - rhs).norm()));
    }
  }
}

// 4. time_to_sphere accuracy and the monotonicity of V along trajectories.
void criterion_time_to_sphere() {
  std::mt19937_64 rng(104);
  for (const Mat& m : {diag4(), cat_log()}) {
    const auto s = regions::build_splitting(m);
    for (int k = 0; k < 500; ++k) {
      const Vec x = random_sphere_point(rng, s) * std::exp(random_vec(rng, 1, -2, 2)[0]);
      const double t = regions::time_to_sphere(x, s);
      const double v = s.sphere_value(Vec(linalg::expm(m, t) * x));
      require(std::abs(v - 1.0) <= 1e-10, "V off the sphere by " + std::to_string(v - 1.0));
    }
    for (int k = 0; k < 20; ++k) {
      const Vec x = random_sphere_point(rng, s);
      double prev = std::numeric_limits<double>::infinity();
      for (double t = -4.0; t <= 4.0; t += 0.05) {
        const double v = s.sphere_value(Vec(linalg::expm(m, t) * x));
        require(v < prev, "V not strictly decreasing");
        prev = v;
      }
    }
  }
}

// 5. Fixed-point identities, isotropy, and the sweep distance bound.
void criterion_fixed_points() {
  const auto rec = dynamics::fixed_point(cat2(), linalg::zvec_from({1, 0}), 1);
  require(std::abs(rec.x[0] - 0.0) <= 1e-12 && std::abs(rec.x[1] + 1.0) <= 1e-12,
          "fixed_point((1,0),1) != (0,-1)");

  const auto ctx = cat_context();
  const Vec target = dynamics::generic_point(2);
  const auto sweep = dynamics::fixed_point_sweep(cat2(), target, 25);
  require(!sweep.records.empty(), "empty sweep");
  for (const auto& r : sweep.records) {
    const CVec z = r.rec.x.cast<std::complex<double>>();
    const auto moved = group::act_affine(group::LatticeElement{r.rec.b, r.rec.n}, z, ctx);
    // scaled by 1 + |b| as in the record invariant: rounding x to double
    // already carries a defect of order |B^n| * ulp ~ |b| * 1e-16
    const double bnorm = linalg::zvec_to_real(r.rec.b).norm();
    require((moved - z).norm() <= 1e-8 * (1.0 + bnorm),
            "isotropy violated at n = " + std::to_string(r.rec.n));
    require(r.distance <= sweep.bound_constant * r.tile_distance * (1.0 + 1e-9) + 1e-12,
            "distance bound violated at n = " + std::to_string(r.rec.n));
  }
  require(sweep.records.front().distance < 0.01,
          "best distance " + std::to_string(sweep.records.front().distance));
}

// 6. Torus density of the generic orbit.
void criterion_density() {
  const auto orbit = dynamics::torus_orbit(cat2(), dynamics::generic_point(2), 100000);
  const auto rep = dynamics::density_report(orbit, 1.0 / 32.0);
  require(rep.coverage == 1.0, "coverage " + std::to_string(rep.coverage));
}

// 7. Boundedness of |(I - B^n)^{-1}|.
void criterion_norm_scan() {
  const auto scan = dynamics::norm_bound_scan(cat2(), 1, 200);
  require(std::isfinite(scan.sup), "sup not finite");
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  require(std::abs(scan.values.front().second - phi) <= 1e-9,
          "value at n=1 is " + std::to_string(scan.values.front().second));
  require(scan.tail_stabilized, "tail stabilization not detected");
}

// 8. Adjoint spectrum and the nilradical dichotomy.
void criterion_adjoint() {
  std::mt19937_64 rng(108);
  std::uniform_real_distribution<double> ts(-1.5, 1.5);
  int done = 0;
  while (done < 100) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const Mat m = random_matrix(rng, n, 1.0);
    Eigen::EigenSolver<Mat> check(m);
    if (check.eigenvalues().cwiseAbs().minCoeff() < 1e-3) continue;
    ++done;
    const auto ctx = GroupContext::connected(m);
    const GroupElement g{random_vec(rng, n, -2, 2), ts(rng)};

    Eigen::EigenSolver<Mat> ad(group::adjoint_matrix(g, ctx));
    Eigen::EigenSolver<Mat> fl(ctx.flow(g.t));
    std::vector<std::complex<double>> got, want = {{1.0, 0.0}};
    for (int i = 0; i < n + 1; ++i) got.push_back(ad.eigenvalues()[i]);
    for (int i = 0; i < n; ++i) want.push_back(fl.eigenvalues()[i]);
    const double d = multiset_distance(got, want);
    require(d <= 1e-8, "spectrum mismatch " + std::to_string(d));

    const auto nil = group::nilradical_test(ctx);
    require(nil.nilradical_is_rn && !nil.group_is_nilpotent,
            "nilradical dichotomy violated for a nonzero spectrum");
  }
}

// 9. Divergence witness with exact geometric decay.
void criterion_witness() {
  Mat m(2, 2);
  m << -1, 0, 0, 1;
  const auto ctx = GroupContext::connected(m);
  const auto s = regions::build_splitting(m);
  CVec z1 = CVec::Zero(2), z2 = CVec::Zero(2);
  z1[1] = std::complex<double>(0, 1);
  z2[0] = std::complex<double>(0, 1);
  const auto table = regions::divergence_witness(z1, z2, 10, ctx, s);
  for (size_t i = 1; i < table.rows.size(); ++i) {
    const double r2 = table.rows[i].dist_to_z2 / table.rows[i - 1].dist_to_z2;
    const double r1 = table.rows[i].dist_to_z1 / table.rows[i - 1].dist_to_z1;
    require(std::abs(r2 - std::exp(-1.0)) <= 1e-9, "w-column ratio " + std::to_string(r2));
    require(std::abs(r1 - std::exp(-1.0)) <= 1e-9, "gw-column ratio " + std::to_string(r1));
  }
}

// 10. Lattice condition at h = 1 and h = 1/2.
void criterion_lattice() {
  const Mat m = cat_log();
  const auto pass = dynamics::check_lattice_condition(m, Mat::Identity(2, 2), 1.0);
  require(pass.passed, "h = 1 did not pass");
  require(pass.spec->toral == cat2(), "recovered matrix is not cat2");
  const auto fail = dynamics::check_lattice_condition(m, Mat::Identity(2, 2), 0.5);
  require(!fail.passed, "h = 1/2 passed unexpectedly");
  require(fail.max_deviation > 0.1,
          "reported deviation " + std::to_string(fail.max_deviation));
}

// 11. Classification coherence on a 64 x 64 grid slice.
void criterion_classification() {
  const auto ctx = cat_context();
  const auto s = regions::build_splitting(ctx.generator);
  std::mt19937_64 rng(111);
  const int res = 64;
  const double lo = -2.0, cell = 4.0 / res;
  for (int iy = 0; iy < res; ++iy)
    for (int ix = 0; ix < res; ++ix) {
      CVec z(2);
      z.real() = Vec::Zero(2);
      z.imag() = s.split.basis_stable * Vec(Vec::Constant(1, lo + ix * cell)) +
                 s.split.basis_unstable * Vec(Vec::Constant(1, lo + iy * cell));
      const auto base = regions::classify_chart(z, s);
      if (base.boundary_hit) continue;
      for (int k = 0; k < 20; ++k) {
        const GroupElement g{random_vec(rng, 2, -2, 2), random_vec(rng, 1, -2, 2)[0]};
        const auto moved = regions::classify_chart(group::act_affine(g, z, ctx), s);
        require(moved.label == base.label, "label changed under the action");
      }
    }
  // real-vector points sit in the chart part of the limit set
  for (int iy = 0; iy < res; ++iy)
    for (int ix = 0; ix < res; ++ix) {
      CVec z(2);
      z.real() = Vec(Vec::Constant(1, lo + ix * cell)).replicate(2, 1);
      z.real()[1] = lo + iy * cell;
      z.imag() = Vec::Zero(2);
      require(regions::classify_chart(z, s).label == RegionLabel::LimitSetChart,
              "real vector not in the chart limit set");
      require(regions::classify(group::unchart(z), s).label == RegionLabel::LimitSetChart,
              "projective classification disagrees on a real vector");
    }
}

} // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "lyapunov-residual-and-positivity", criterion_lyapunov, 5.0},
      {2, "exp-log-roundtrip-and-group-law", criterion_exp_log, 0.0},
      {3, "psi-minus-diffeomorphism", criterion_psi, 0.0},
      {4, "time-to-sphere", criterion_time_to_sphere, 0.0},
      {5, "fixed-point-identities-and-sweep", criterion_fixed_points, 10.0},
      {6, "torus-density", criterion_density, 5.0},
      {7, "norm-boundedness", criterion_norm_scan, 0.0},
      {8, "adjoint-spectrum-and-nilradical", criterion_adjoint, 0.0},
      {9, "divergence-witness-decay", criterion_witness, 0.0},
      {10, "lattice-condition", criterion_lattice, 0.0},
      {11, "classification-coherence", criterion_classification, 0.0},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string failure;
    try {
      c.body();
    } catch (const std::exception& e) {
      failure = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (failure.empty() && c.time_limit > 0.0 && secs > c.time_limit) {
      std::ostringstream os;
      os << "runtime " << secs << " s exceeded the " << c.time_limit << " s limit";
      failure = os.str();
    }
    if (failure.empty()) {
      std::printf("[PASS] criterion %2d %s (%.2f s)\n", c.id, c.name.c_str(), secs);
    } else {
      std::printf("[FAIL] criterion %2d %s (%.2f s): %s\n", c.id, c.name.c_str(), secs,
                  failure.c_str());
      ++failures;
    }
  }
  return failures;
}
