#include "kleinsolv/group.hpp"

#include "kleinsolv/errors.hpp"

#include <cmath>
#include <complex>

namespace kleinsolv::group {

namespace {

void require_dim(const GroupContext& ctx, Eigen::Index n) {
  if (ctx.dim() != static_cast<int>(n)) throw NumericError("dimension mismatch");
}

} // namespace

GroupElement identity_element(int n) { return {Vec::Zero(n), 0.0}; }

ProjectivePoint::ProjectivePoint(const CVec& homogeneous) : v_(homogeneous) {
  const double norm = v_.norm();
  if (!(norm > 0.0) || !v_.allFinite()) throw NumericError("invalid projective point");
  v_ /= norm;
  for (Eigen::Index i = 0; i < v_.size(); ++i) {
    const double a = std::abs(v_[i]);
    if (a > 1e-14) {
      v_ *= std::conj(v_[i]) / a;
      break;
    }
  }
}

Mat GroupContext::flow(double t) const { return linalg::expm(generator, t); }

GroupContext GroupContext::connected(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() < 1) throw NumericError("matrix must be square");
  return {m, LiftMode::Connected, std::nullopt, 1};
}

GroupContext GroupContext::disconnected(const Mat& m, const IntMatrix& b, int power) {
  if (m.rows() != m.cols() || m.rows() != b.dim()) throw NumericError("dimension mismatch");
  if (power != 1 && power != 2) throw NumericError("power must be 1 or 2");
  const Mat target = b.pow(power).to_real();
  if ((linalg::expm(m, 1.0) - target).norm() > 1e-9 * (1.0 + target.norm()))
    throw NumericError("lift mismatch: exp(M) != B^power");
  return {m, LiftMode::Disconnected, b, power};
}

GroupElement compose(const GroupElement& g, const GroupElement& h, const GroupContext& ctx) {
  require_dim(ctx, g.b.size());
  require_dim(ctx, h.b.size());
  return {g.b + ctx.flow(g.t) * h.b, g.t + h.t};
}

GroupElement inverse(const GroupElement& g, const GroupContext& ctx) {
  require_dim(ctx, g.b.size());
  return {-(ctx.flow(-g.t) * g.b), -g.t};
}

Mat rho(const GroupElement& g, const GroupContext& ctx) {
  const int n = ctx.dim();
  Mat r = Mat::Zero(n + 1, n + 1);
  r.topLeftCorner(n, n) = ctx.flow(g.t);
  r.topRightCorner(n, 1) = g.b;
  r(n, n) = 1.0;
  return r;
}

Mat rho(const LatticeElement& g, const GroupContext& ctx) {
  if (!ctx.toral) throw NumericError("context has no toral matrix");
  const int n = ctx.dim();
  Mat r = Mat::Zero(n + 1, n + 1);
  r.topLeftCorner(n, n) = ctx.toral->pow(g.n).to_real();
  r.topRightCorner(n, 1) = linalg::zvec_to_real(g.b);
  r(n, n) = 1.0;
  return r;
}

CVec act_affine(const GroupElement& g, const CVec& z, const GroupContext& ctx) {
  require_dim(ctx, z.size());
  const Mat a = ctx.flow(g.t);
  CVec out(z.size());
  out.real() = a * z.real() + g.b;
  out.imag() = a * z.imag();
  return out;
}

CVec act_affine(const LatticeElement& g, const CVec& z, const GroupContext& ctx) {
  if (!ctx.toral) throw NumericError("context has no toral matrix");
  require_dim(ctx, z.size());
  const Mat a = ctx.toral->pow(g.n).to_real();
  CVec out(z.size());
  out.real() = a * z.real() + linalg::zvec_to_real(g.b);
  out.imag() = a * z.imag();
  return out;
}

namespace {

ProjectivePoint act_matrix(const Mat& m, const ProjectivePoint& p) {
  return ProjectivePoint(m.cast<std::complex<double>>() * p.coords());
}

} // namespace

ProjectivePoint act_projective(const GroupElement& g, const ProjectivePoint& p,
                               const GroupContext& ctx) {
  return act_matrix(rho(g, ctx), p);
}

ProjectivePoint act_projective(const LatticeElement& g, const ProjectivePoint& p,
                               const GroupContext& ctx) {
  return act_matrix(rho(g, ctx), p);
}

CVec chart(const ProjectivePoint& p) {
  const CVec& v = p.coords();
  const Eigen::Index n = v.size() - 1;
  if (std::abs(v[n]) <= 1e-12) throw NumericError("point at infinity");
  return v.head(n) / v[n];
}

ProjectivePoint unchart(const CVec& z) {
  CVec h(z.size() + 1);
  h.head(z.size()) = z;
  h[z.size()] = 1.0;
  return ProjectivePoint(h);
}

Mat adjoint_matrix(const GroupElement& g, const GroupContext& ctx) {
  const int n = ctx.dim();
  require_dim(ctx, g.b.size());
  Mat ad = Mat::Zero(n + 1, n + 1);
  ad(0, 0) = 1.0;
  ad.block(1, 0, n, 1) = -(ctx.generator * g.b);
  ad.block(1, 1, n, n) = ctx.flow(g.t);
  return ad;
}

LieAlgebraElement apply_adjoint(const GroupElement& g, const LieAlgebraElement& x,
                                const GroupContext& ctx) {
  const Mat ad = adjoint_matrix(g, ctx);
  Vec v(ctx.dim() + 1);
  v[0] = x.s;
  v.tail(ctx.dim()) = x.p;
  Vec w = ad * v;
  return {w[0], w.tail(ctx.dim())};
}

NilradicalReport nilradical_test(const GroupContext& ctx, double tol) {
  const Mat& m = ctx.generator;
  const int n = ctx.dim();
  // spectrum(M) = {0} iff M^N = 0; the power test is robust for nilpotent
  // matrices where computed eigenvalues smear to magnitude ~ eps^(1/N)
  Mat p = Mat::Identity(n, n);
  for (int k = 0; k < n; ++k) p = p * m;
  const double scale = std::pow(std::max(1.0, m.norm()), n);
  NilradicalReport r;
  r.group_is_nilpotent = p.norm() <= tol * scale;
  r.nilradical_is_rn = !r.group_is_nilpotent;
  return r;
}

DisconnectedElement from_lattice(const LatticeElement& e, const GroupContext& ctx) {
  if (!ctx.toral) throw NumericError("context has no toral matrix");
  const Vec b = linalg::zvec_to_real(e.b);
  if (ctx.power == 1) return {{b, static_cast<double>(e.n)}, false};
  // B^n = A(k) B^parity with n = 2k + parity
  const long parity = ((e.n % 2) + 2) % 2;
  const long k = (e.n - parity) / 2;
  return {{b, static_cast<double>(k)}, parity == 1};
}

DisconnectedElement compose(const DisconnectedElement& a, const DisconnectedElement& b,
                            const GroupContext& ctx) {
  if (!ctx.toral) throw NumericError("context has no toral matrix");
  Mat ca = ctx.flow(a.g.t);
  if (a.odd) ca = ctx.toral->to_real() * ca;
  double t = a.g.t + b.g.t;
  if (a.odd && b.odd) t += ctx.power == 2 ? 1.0 : 2.0;
  return {{a.g.b + ca * b.g.b, t}, a.odd != b.odd};
}

Mat rho(const DisconnectedElement& e, const GroupContext& ctx) {
  if (!ctx.toral) throw NumericError("context has no toral matrix");
  const int n = ctx.dim();
  Mat c = ctx.flow(e.g.t);
  if (e.odd) c = ctx.toral->to_real() * c;
  Mat r = Mat::Zero(n + 1, n + 1);
  r.topLeftCorner(n, n) = c;
  r.topRightCorner(n, 1) = e.g.b;
  r(n, n) = 1.0;
  return r;
}

} // namespace kleinsolv::group
