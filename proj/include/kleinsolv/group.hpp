#pragma once

#include "kleinsolv/linalg.hpp"

#include <optional>

namespace kleinsolv::group {

using linalg::CMat;
using linalg::CVec;
using linalg::IntMatrix;
using linalg::Mat;
using linalg::Vec;
using linalg::ZVec;

/// Element (b, t) of R^N x|_A R with A(t) = exp(tM).
struct GroupElement {
  Vec b;
  double t = 0.0;
};

GroupElement identity_element(int n);

/// Element (b, n) of the lattice Z^N x|_B Z.
struct LatticeElement {
  ZVec b;
  long n = 0;
};

/// Element sM (+) p of the Lie algebra, in (s, p) coordinates.
struct LieAlgebraElement {
  double s = 0.0;
  Vec p;
};

/// Point of complex projective N-space, stored as the canonical homogeneous
/// representative: unit Euclidean norm, first nonzero coordinate real-positive.
class ProjectivePoint {
public:
  explicit ProjectivePoint(const CVec& homogeneous);

  const CVec& coords() const { return v_; }
  /// Projective dimension N (coords has N+1 entries).
  int dim() const { return static_cast<int>(v_.size()) - 1; }

private:
  CVec v_;
};

enum class LiftMode { Connected, Disconnected };

/// The one-parameter group data: generator M, and for disconnected lifts the
/// integer matrix B with exp(M) = B^power.
struct GroupContext {
  Mat generator;
  LiftMode mode = LiftMode::Connected;
  std::optional<IntMatrix> toral;
  int power = 1;

  int dim() const { return static_cast<int>(generator.rows()); }
  /// A(t) = exp(t M).
  Mat flow(double t) const;

  static GroupContext connected(const Mat& m);
  /// Validates exp(M) = B^power to 1e-9 (relative).
  static GroupContext disconnected(const Mat& m, const IntMatrix& b, int power);
};

GroupElement compose(const GroupElement& g, const GroupElement& h, const GroupContext& ctx);
GroupElement inverse(const GroupElement& g, const GroupContext& ctx);

/// Block matrix [[A(t), b], [0, 1]].
Mat rho(const GroupElement& g, const GroupContext& ctx);
/// Block matrix [[B^n, b], [0, 1]] with the power computed exactly.
Mat rho(const LatticeElement& g, const GroupContext& ctx);

CVec act_affine(const GroupElement& g, const CVec& z, const GroupContext& ctx);
CVec act_affine(const LatticeElement& g, const CVec& z, const GroupContext& ctx);

ProjectivePoint act_projective(const GroupElement& g, const ProjectivePoint& p,
                               const GroupContext& ctx);
ProjectivePoint act_projective(const LatticeElement& g, const ProjectivePoint& p,
                               const GroupContext& ctx);

/// Affine coordinates of a chart point; throws NumericError("point at infinity")
/// when the last homogeneous coordinate vanishes.
CVec chart(const ProjectivePoint& p);
ProjectivePoint unchart(const CVec& z);

/// Matrix of Ad_g acting on (s, p) coordinates: (s, p) -> (s, -s M b + A(t) p).
Mat adjoint_matrix(const GroupElement& g, const GroupContext& ctx);

LieAlgebraElement apply_adjoint(const GroupElement& g, const LieAlgebraElement& x,
                                const GroupContext& ctx);

struct NilradicalReport {
  bool nilradical_is_rn = false;
  bool group_is_nilpotent = false;
};

/// Nilradical dichotomy: R^N when M has a nonzero eigenvalue, the whole group
/// when M is nilpotent.
NilradicalReport nilradical_test(const GroupContext& ctx, double tol = 1e-9);

/// Element C = B^odd A(t) of the disconnected lift, with parity tracked
/// through multiplication (B^2 = A(1) when power = 2).
struct DisconnectedElement {
  GroupElement g;
  bool odd = false;
};

DisconnectedElement from_lattice(const LatticeElement& e, const GroupContext& ctx);
DisconnectedElement compose(const DisconnectedElement& a, const DisconnectedElement& b,
                            const GroupContext& ctx);
Mat rho(const DisconnectedElement& e, const GroupContext& ctx);

} // namespace kleinsolv::group
