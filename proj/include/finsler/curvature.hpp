#pragma once

#include "finsler/core.hpp"
#include "finsler/diffengine.hpp"

#include <optional>
#include <vector>

namespace finsler {

/// Ricci data at a line element. Ric is 0-homogeneous in y; Ric_ij is the
/// y-Hessian of (1/2) F^2 Ric; ell = y / F.
struct CurvatureData {
  double ric = 0.0;
  Matrix ric_tensor;
  Vector ell;
  /// R^i_k (2-homogeneous; trace = F^2 Ric), when requested.
  std::optional<Matrix> riemann;
  /// |Ric_ij ell^i ell^j - Ric|
  double contraction_residual = 0.0;
};

/// Ric from the spray:
/// 2F^2 Ric = 2 dG^i/dx^i - (1/2) dG^i/dy^j dG^j/dy^i - y^j d2G^i/dy^i dx^j
///            + G^j d2G^i/dy^i dy^j.
double ricci_scalar(const FinslerStructure& metric, const Vector& x, const Vector& y,
                    const EngineConfig& config = {});

/// F^2 Ric (2-homogeneous).
double ricci_quadratic(const FinslerStructure& metric, const Vector& x, const Vector& y,
                       const EngineConfig& config = {});

/// Ric_ik = (1/2) d2(F^2 Ric)/dy^i dy^k. Raises AccuracyError when the
/// contraction Ric_ik ell^i ell^k = Ric fails by more than `contraction_tolerance`.
CurvatureData ricci_tensor(const FinslerStructure& metric, const Vector& x, const Vector& y,
                           const EngineConfig& config = {}, bool with_riemann = false,
                           double contraction_tolerance = 1e-3);

/// R^i_k = dG^i/dx^k - (1/2) y^j d2G^i/dx^j dy^k + (1/2) G^j d2G^i/dy^j dy^k
///         - (1/4) dG^i/dy^j dG^j/dy^k  (nonlinear-connection curvature of the spray).
Matrix riemann_curvature(const FinslerStructure& metric, const Vector& x, const Vector& y,
                         const EngineConfig& config = {});

struct RicciBoundSample {
  LineElement element;
  double max_eigenvalue = 0.0;  ///< of Ric_ij + c^2 g_ij
};

struct RicciBoundReport {
  double c = 0.0;
  double tolerance = 0.0;
  std::vector<RicciBoundSample> samples;
  double worst = 0.0;
  bool pass = false;
};

/// Tests Ric_ij <= -c^2 g_ij (as matrices) at every sample.
RicciBoundReport check_ricci_bound(const FinslerStructure& metric,
                                   const std::vector<LineElement>& samples, double c,
                                   double tolerance = 1e-4, const EngineConfig& config = {});

struct ProjectiveFactor {
  double P = 0.0;
  double residual = 0.0;  ///< |Gbar - G - P y| / max(1, |G|, |Gbar|)
};

/// Least-squares P in Gbar^i - G^i = P y^i; NotProjectiveError when the
/// relative residual exceeds `tolerance`.
ProjectiveFactor projective_factor(const FinslerStructure& metric, const FinslerStructure& other,
                                   const Vector& x, const Vector& y, double tolerance = 1e-6,
                                   const EngineConfig& config = {});

struct RicTransformation {
  double P = 0.0;
  double lhs = 0.0;  ///< Fbar^2 Ricbar - F^2 Ric
  /// (n-1)/2 (P_x.y - P_y.G + P^2/2), the law as commonly printed.
  double printed_rhs = 0.0;
  /// -(n-1)/2 (P_x.y - P_y.G - P^2/2), the law implied by Gbar = G + P y.
  double consistent_rhs = 0.0;
  double residual_printed = 0.0;
  double residual_consistent = 0.0;
};

/// Both sides of the change of F^2 Ric under the projective change from
/// `metric` to `other`, with P and its derivatives taken from the sprays.
RicTransformation verify_ric_transformation(const FinslerStructure& metric,
                                            const FinslerStructure& other, const Vector& x,
                                            const Vector& y, const EngineConfig& config = {});

}  // namespace finsler
