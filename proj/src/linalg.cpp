#include "kleinsolv/linalg.hpp"

#include "kleinsolv/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>

namespace kleinsolv::linalg {

namespace {

void require_square_finite(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() < 1) throw NumericError("matrix must be square");
  if (!m.allFinite()) throw NumericError("non-finite entry");
}

double l1_norm(const Mat& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

// Pade approximant of order m to exp(a), for the Higham degree set.
Mat pade_approximant(const Mat& a, int order) {
  static const double b3[] = {120, 60, 12, 1};
  static const double b5[] = {30240, 15120, 3360, 420, 30, 1};
  static const double b7[] = {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1};
  static const double b9[] = {17643225600, 8821612800, 2075673600, 302702400, 30270240,
                              2162160,     110880,     3960,       90,        1};
  static const double b13[] = {64764752532480000.,
                               32382376266240000.,
                               7771770303897600.,
                               1187353796428800.,
                               129060195264000.,
                               10559470521600.,
                               670442572800.,
                               33522128640.,
                               1323241920.,
                               40840800.,
                               960960.,
                               16380.,
                               182.,
                               1.};
  const Eigen::Index n = a.rows();
  const Mat id = Mat::Identity(n, n);
  Mat u, v;
  if (order == 13) {
    const double* b = b13;
    Mat a2 = a * a;
    Mat a4 = a2 * a2;
    Mat a6 = a2 * a4;
    u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 +
             b[1] * id);
    v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  } else {
    const double* b = order == 3 ? b3 : order == 5 ? b5 : order == 7 ? b7 : b9;
    std::vector<Mat> even{id};  // a^0, a^2, a^4, ...
    Mat a2 = a * a;
    for (int k = 2; k <= order; k += 2) even.push_back(even.back() * a2);
    Mat us = Mat::Zero(n, n), vs = Mat::Zero(n, n);
    for (int k = 0; 2 * k + 1 <= order; ++k) us += b[2 * k + 1] * even[static_cast<size_t>(k)];
    for (int k = 0; 2 * k <= order; ++k) vs += b[2 * k] * even[static_cast<size_t>(k)];
    u = a * us;
    v = vs;
  }
  return Mat((v - u).partialPivLu().solve(v + u));
}

} // namespace

int SpectrumReport::stable_count() const {
  return static_cast<int>(std::count(stable.begin(), stable.end(), true));
}

int SpectrumReport::unstable_count() const {
  return static_cast<int>(stable.size()) - stable_count();
}

Mat expm(const Mat& m, double t) {
  require_square_finite(m);
  if (!std::isfinite(t)) throw NumericError("non-finite entry");
  Mat a = t * m;
  const double nrm = l1_norm(a);
  // e^708 is already the edge of double range
  if (nrm > 1.0e6) throw NumericError("magnitude overflow in expm");

  static const double theta[] = {1.495585217958292e-2, 2.539398330063230e-1,
                                 9.504178996162932e-1, 2.097847961257068e0,
                                 5.371920351148152e0};
  static const int degrees[] = {3, 5, 7, 9, 13};
  Mat r;
  if (nrm <= theta[4]) {
    int order = 13;
    for (int k = 0; k < 5; ++k)
      if (nrm <= theta[k]) {
        order = degrees[k];
        break;
      }
    r = pade_approximant(a, order);
  } else {
    const int s = static_cast<int>(std::ceil(std::log2(nrm / theta[4])));
    r = pade_approximant(a / std::ldexp(1.0, s), 13);
    for (int k = 0; k < s; ++k) r = r * r;
  }
  if (!r.allFinite()) throw NumericError("magnitude overflow in expm");
  return r;
}

namespace {

// Principal-branch log via the complex eigendecomposition; empty when the
// spectrum touches (-inf, 0] or the reconstruction fails to verify.
std::optional<Mat> try_real_log(const Mat& target) {
  const Eigen::Index n = target.rows();
  Eigen::ComplexEigenSolver<CMat> es(target.cast<std::complex<double>>());
  if (es.info() != Eigen::Success) return std::nullopt;
  const CVec d = es.eigenvalues();
  const double scale = d.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto z = d[i];
    if (std::abs(z) <= 1e-14 * scale) return std::nullopt; // singular
    if (z.real() <= 0.0 && std::abs(z.imag()) <= 1e-12 * std::abs(z)) return std::nullopt;
  }
  CVec logd(n);
  for (Eigen::Index i = 0; i < n; ++i) logd[i] = std::log(d[i]);
  const CMat v = es.eigenvectors();
  Eigen::FullPivLU<CMat> lu(v);
  if (!lu.isInvertible()) return std::nullopt;
  CMat lc = v * logd.asDiagonal() * lu.inverse();
  const double imag_mag = lc.imag().cwiseAbs().maxCoeff();
  if (imag_mag > 1e-8 * (1.0 + lc.real().cwiseAbs().maxCoeff())) return std::nullopt;
  Mat l = lc.real();
  const Mat check = expm(l, 1.0);
  if ((check - target).norm() > 1e-9 * (1.0 + target.norm())) return std::nullopt;
  return l;
}

} // namespace

RealLog logm(const Mat& b) {
  require_square_finite(b);
  Eigen::FullPivLU<Mat> lu(b);
  if (!lu.isInvertible()) throw NumericError("not invertible");
  if (auto l = try_real_log(b)) return {*l, 1};
  if (auto l = try_real_log(b * b)) return {*l, 2};
  throw NumericError("no real logarithm found");
}

namespace {

SpectrumReport classify_spectrum(const CVec& vals, SpectralMode mode, double tol) {
  SpectrumReport report;
  report.mode = mode;
  report.eigenvalues = vals;
  report.stable.resize(static_cast<size_t>(vals.size()));
  const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
  report.margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    const double dist = mode == SpectralMode::Continuous ? std::abs(vals[i].real())
                                                         : std::abs(std::abs(vals[i]) - 1.0);
    report.margin = std::min(report.margin, dist);
    report.stable[static_cast<size_t>(i)] = mode == SpectralMode::Continuous
                                                ? vals[i].real() < 0.0
                                                : std::abs(vals[i]) < 1.0;
  }
  if (report.margin <= tol * scale) throw NumericError("not hyperbolic");
  return report;
}

} // namespace

SpectrumReport spectrum_report(const Mat& m, SpectralMode mode, double tol) {
  require_square_finite(m);
  if (!(tol > 0.0)) throw NumericError("tolerance must be positive");
  Eigen::EigenSolver<Mat> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  return classify_spectrum(es.eigenvalues(), mode, tol);
}

std::pair<SpectrumReport, SubspaceSplit> eigen_split(const Mat& m, SpectralMode mode, double tol) {
  require_square_finite(m);
  if (!(tol > 0.0)) throw NumericError("tolerance must be positive");
  const int n = static_cast<int>(m.rows());

  Eigen::EigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  const CVec vals = es.eigenvalues();
  const CMat vecs = es.eigenvectors();
  const SpectrumReport report = classify_spectrum(vals, mode, tol);
  const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());

  SubspaceSplit split;
  const int ns = report.stable_count();
  const int nu = n - ns;

  // Trivial splittings need no eigenvectors; this also covers defective
  // one-sided spectra where the eigenvector matrix is singular.
  if (ns == n || nu == n) {
    split.basis_stable = ns == n ? Mat(Mat::Identity(n, n)) : Mat(n, 0);
    split.basis_unstable = nu == n ? Mat(Mat::Identity(n, n)) : Mat(n, 0);
    split.proj_stable = ns == n ? Mat(Mat::Identity(n, n)) : Mat(Mat::Zero(n, n));
    split.proj_unstable = nu == n ? Mat(Mat::Identity(n, n)) : Mat(Mat::Zero(n, n));
    return {report, split};
  }

  // Real bases by conjugate-pair recombination.
  std::vector<bool> used(static_cast<size_t>(n), false);
  std::vector<Vec> cols_s, cols_u;
  const double pair_tol = 1e-8 * scale;
  for (int i = 0; i < n; ++i) {
    if (used[static_cast<size_t>(i)]) continue;
    used[static_cast<size_t>(i)] = true;
    auto& out = report.stable[static_cast<size_t>(i)] ? cols_s : cols_u;
    if (std::abs(vals[i].imag()) <= pair_tol) {
      // rotate the phase so the vector is (numerically) real
      CVec v = vecs.col(i);
      Eigen::Index k;
      v.cwiseAbs().maxCoeff(&k);
      v *= std::conj(v[k]) / std::abs(v[k]);
      Vec r = v.real();
      out.push_back(r / r.norm());
    } else {
      int partner = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int j = i + 1; j < n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double d = std::abs(vals[j] - std::conj(vals[i]));
        if (d < best) {
          best = d;
          partner = j;
        }
      }
      if (partner < 0 || best > 1e-6 * scale)
        throw NumericError("unpaired complex eigenvalue");
      used[static_cast<size_t>(partner)] = true;
      CVec v = vecs.col(i);
      Eigen::Index k;
      v.cwiseAbs().maxCoeff(&k);
      v *= std::conj(v[k]) / std::abs(v[k]);
      Vec re = v.real(), im = v.imag();
      out.push_back(re / re.norm());
      Vec w = im - out.back() * out.back().dot(im);
      if (w.norm() <= 1e-12 * (1.0 + im.norm()))
        throw NumericError("degenerate complex eigenvector");
      out.push_back(w / w.norm());
    }
  }
  if (static_cast<int>(cols_s.size()) != ns || static_cast<int>(cols_u.size()) != nu)
    throw NumericError("inconsistent splitting dimensions");

  auto assemble = [n](const std::vector<Vec>& cols) {
    Mat b(n, static_cast<Eigen::Index>(cols.size()));
    for (size_t j = 0; j < cols.size(); ++j) b.col(static_cast<Eigen::Index>(j)) = cols[j];
    // orthonormalize within the subspace
    Eigen::HouseholderQR<Mat> qr(b);
    Mat q = qr.householderQ() * Mat::Identity(n, static_cast<Eigen::Index>(cols.size()));
    return q;
  };
  split.basis_stable = assemble(cols_s);
  split.basis_unstable = assemble(cols_u);

  Mat w(n, n);
  w << split.basis_stable, split.basis_unstable;
  Eigen::PartialPivLU<Mat> wlu(w);
  Mat winv = wlu.solve(Mat::Identity(n, n));
  split.proj_stable = split.basis_stable * winv.topRows(ns);
  split.proj_unstable = split.basis_unstable * winv.bottomRows(nu);

  // invariance residual, per basis column
  const double res_tol = 1e-9 * (1.0 + m.norm());
  auto invariance = [&](const Mat& basis) {
    if (basis.cols() == 0) return 0.0;
    Mat rep = basis.transpose() * m * basis;
    return (m * basis - basis * rep).colwise().norm().maxCoeff();
  };
  if (invariance(split.basis_stable) > res_tol || invariance(split.basis_unstable) > res_tol)
    throw NumericError("invariant subspace residual too large");
  return {report, split};
}

Mat solve_lyapunov(const Mat& m) {
  require_square_finite(m);
  const int n = static_cast<int>(m.rows());

  Eigen::EigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  if (es.eigenvalues().real().maxCoeff() >= 0.0) throw NumericError("not stable");

  // (M^T (x) I + I (x) M^T) vec(P) = vec(-I)
  const Mat mt = m.transpose();
  Mat k = Mat::Zero(n * n, n * n);
  // kron(mt, id): block (i,j) is mt(i,j) * I
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int r = 0; r < n; ++r) k(i * n + r, j * n + r) += mt(i, j);
  // kron(id, mt): diagonal blocks equal to mt
  for (int b = 0; b < n; ++b) k.block(b * n, b * n, n, n) += mt;

  Vec rhs = Vec::Zero(n * n);
  for (int i = 0; i < n; ++i) rhs[i * n + i] = -1.0;

  Eigen::FullPivLU<Mat> lu(k);
  if (!lu.isInvertible()) throw NumericError("conditioning failure: singular Lyapunov system");
  Vec p = lu.solve(rhs);

  Eigen::JacobiSVD<Mat> svd(k);
  const double cond = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
  if (!(cond < 1e14)) {
    std::ostringstream os;
    os << "conditioning failure: cond ~ " << cond;
    throw NumericError(os.str());
  }

  Mat pm(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) pm(i, j) = p[j * n + i];
  pm = 0.5 * (pm + pm.transpose()).eval();

  if ((pm * m + m.transpose() * pm + Mat::Identity(n, n)).norm() > 1e-10) {
    std::ostringstream os;
    os << "conditioning failure: Lyapunov residual too large (cond ~ " << cond << ")";
    throw NumericError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Mat> pe(pm);
  if (pe.eigenvalues().minCoeff() <= 0.0) throw NumericError("not stable");
  return pm;
}

double operator_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  if (!a.allFinite()) throw NumericError("non-finite entry");
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

double operator_norm(const CMat& a) {
  if (a.size() == 0) return 0.0;
  if (!a.allFinite()) throw NumericError("non-finite entry");
  Eigen::JacobiSVD<CMat> svd(a);
  return svd.singularValues()(0);
}

} // namespace kleinsolv::linalg
