#pragma once

#include "kleinsolv/group.hpp"
#include "kleinsolv/linalg.hpp"

#include <optional>
#include <vector>

namespace kleinsolv::regions {

using group::GroupContext;
using group::GroupElement;
using group::ProjectivePoint;
using linalg::CVec;
using linalg::Mat;
using linalg::Vec;

/// Lyapunov inner product on a stable (or reversed-unstable) block, in the
/// orthonormal basis coordinates of that block, with the derived decay
/// estimate |exp(tM)x| <= C e^{-lambda t} |x|.
struct LyapunovMetric {
  Mat p;                   // SPD solution of P R + R^T P = -I
  double growth_constant;  // C = sqrt(cond(P))
  double decay_rate;       // lambda = 1 / (2 lambda_max(P))

  double value(const Vec& coords) const { return coords.dot(p * coords); }
};

/// A chart vector z in C^N decomposed as b + i y_s + i y_u.
struct ChartDecomposition {
  Vec real_part;
  Vec imag_stable;
  Vec imag_unstable;
};

/// Stable/unstable splitting of the generator with Lyapunov metrics on both
/// blocks. Degenerate sides (Ns = 0 or Nu = 0) carry no metric.
struct HyperbolicSplitting {
  linalg::SpectrumReport spectrum;
  linalg::SubspaceSplit split;
  Mat gen_stable;    // Vs^T M Vs
  Mat gen_unstable;  // Vu^T M Vu
  std::optional<LyapunovMetric> metric_stable;
  std::optional<LyapunovMetric> metric_unstable;

  int dim() const { return split.dim(); }
  int dim_stable() const { return split.dim_stable(); }
  int dim_unstable() const { return split.dim_unstable(); }

  /// Coordinates of an E^s vector in the orthonormal stable basis.
  Vec stable_coords(const Vec& x) const { return split.basis_stable.transpose() * x; }
  Vec unstable_coords(const Vec& x) const { return split.basis_unstable.transpose() * x; }

  /// Lyapunov value V(x) = <x, x>_P of an ambient E^s vector.
  double sphere_value(const Vec& x) const;
};

HyperbolicSplitting build_splitting(const Mat& m, double tol = 1e-9);

ChartDecomposition decompose(const CVec& z, const HyperbolicSplitting& s);

/// The unique t with V(exp(tM)x) = 1 for a nonzero x in E^s, found by
/// bracketing plus bisection with a Newton polish on the strictly
/// decreasing map t -> V(exp(tM)x).
double time_to_sphere(const Vec& x, const HyperbolicSplitting& s);

/// psi^-(g, x, y) = g * (ix + iy) = b + i A(t)(x + y); x on the stable
/// sphere, y in E^u.
CVec psi_minus(const GroupElement& g, const Vec& x, const Vec& y, const GroupContext& ctx,
               const HyperbolicSplitting& s);

struct PsiPreimage {
  GroupElement g;
  Vec x;  // on the stable sphere
  Vec y;  // in E^u
};

/// Inverse of psi^- on U^-; throws NumericError("not in U-minus") when the
/// stable imaginary part vanishes.
PsiPreimage psi_minus_inv(const CVec& z, const GroupContext& ctx, const HyperbolicSplitting& s);

enum class RegionLabel {
  OmegaMinusOnly,
  OmegaPlusOnly,
  Both,
  LimitSetChart,
  LimitSetInfinity,
};

const char* to_string(RegionLabel label);

struct Classification {
  RegionLabel label = RegionLabel::LimitSetChart;
  bool boundary_hit = false;  // within a decade of the tolerance cut
  double stable_size = 0.0;   // |pi_s Im z| / (1 + |z|)
  double unstable_size = 0.0; // |pi_u Im z| / (1 + |z|)
};

Classification classify(const ProjectivePoint& p, const HyperbolicSplitting& s,
                        double tol = 1e-9);
Classification classify_chart(const CVec& z, const HyperbolicSplitting& s, double tol = 1e-9);

struct WitnessRow {
  long n = 0;
  CVec w;                // w_n = Re z2 + i (A(-n) y1 + y2)
  CVec gw;               // g_n * w_n
  double dist_to_z2 = 0; // |w_n - z2|
  double dist_to_z1 = 0; // |g_n * w_n - z1|
};

struct WitnessTable {
  std::vector<WitnessRow> rows;
  long settled_at = -1;  // first n with both columns non-increasing onward
};

/// Properness failure witness: z1 strictly in U^+, z2 strictly in U^-;
/// w_n -> z2 while g_n * w_n -> z1 and g_n diverges in the group.
WitnessTable divergence_witness(const CVec& z1, const CVec& z2, long n_max,
                                const GroupContext& ctx, const HyperbolicSplitting& s);

struct SphereMapResult {
  Vec f1;       // A(t(Bx)) B x, back on the stable sphere
  Mat f2;       // A(t(Bx)) B restricted to E^u, in V_u coordinates
  double time;  // t(Bx)
};

/// Induced maps of the disconnected generator on the stable sphere and the
/// unstable fibre; requires ctx.toral with the same splitting as M.
SphereMapResult induced_sphere_map(const Vec& x, const GroupContext& ctx,
                                   const HyperbolicSplitting& s);

} // namespace kleinsolv::regions
