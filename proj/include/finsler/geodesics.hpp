#pragma once

#include "finsler/core.hpp"
#include "finsler/diffengine.hpp"
#include "finsler/ode.hpp"

#include <memory>
#include <vector>

namespace finsler {

/// Spray coefficients G^i = gamma^i_jk y^j y^k at a line element (geodesics
/// solve x'' + G(x, x') = 0) and the Jacobian N^i_j = dG^i/dy^j.
struct SprayData {
  Vector G;
  Matrix jacobian;
};

SprayData spray(const FinslerStructure& metric, const Vector& x, const Vector& y,
                const EngineConfig& config = {});

/// G only; the fast path used by the integrators.
Vector spray_value(const FinslerStructure& metric, const Vector& x, const Vector& y,
                   const EngineConfig& config = {});

/// True when spray jets of arbitrary order are available (analytic spray
/// expression or jet-capable metric).
bool supports_spray_jets(const FinslerStructure& metric);

/// G^i as jets of the given order in the 2n line-element variables seeded at
/// (x, y). Uses the analytic spray when present, otherwise
/// G^i = (1/2) g^il ([F^2]_{x^k y^l} y^k - [F^2]_{x^l}) on jets of F.
std::vector<Jet> spray_jet(const FinslerStructure& metric, const Vector& x, const Vector& y,
                           int order);

struct GeodesicOptions {
  double rtol = 1e-13;
  double atol = 1e-13;
  /// Integration stops when phi(x) < boundary_margin * domain_scale.
  double boundary_margin = 1e-6;
  /// Also stops once |x| exceeds this (coordinates blowing up in finite arc length).
  double escape_radius = 1e6;
  EngineConfig diff;
};

/// Arc-length parametrized geodesic with dense output. Covers
/// [s_begin, s_end]; the initial point sits at s = 0.
class GeodesicSegment {
 public:
  struct Sample {
    double s;
    Vector x;
    Vector velocity;
  };

  GeodesicSegment() = default;
  /// Pieces are backward and/or forward integrations from s = 0.
  GeodesicSegment(std::string metric_name, int dimension, std::vector<DenseSolution> pieces,
                  bool truncated_begin, bool truncated_end);

  double s_begin() const { return s_begin_; }
  double s_end() const { return s_end_; }
  double length() const { return s_end_ - s_begin_; }
  int dimension() const { return dimension_; }
  const std::string& metric_name() const { return metric_name_; }
  bool truncated_begin() const { return truncated_begin_; }
  bool truncated_end() const { return truncated_end_; }
  bool truncated() const { return truncated_begin_ || truncated_end_; }

  Vector position(double s) const;
  Vector velocity(double s) const;
  /// Step endpoints of the integrator, s strictly increasing.
  const std::vector<Sample>& samples() const { return samples_; }

 private:
  const DenseSolution& piece(double s) const;

  std::string metric_name_;
  int dimension_ = 0;
  std::vector<DenseSolution> pieces_;
  std::vector<Sample> samples_;
  double s_begin_ = 0.0;
  double s_end_ = 0.0;
  bool truncated_begin_ = false;
  bool truncated_end_ = false;
};

/// Integrates x'' + G(x, x') = 0 from x0 with initial direction y0 (rescaled to
/// unit Finsler norm) over arc length `length`; negative length runs backward.
/// Stops early near the domain boundary (flagged as truncated).
GeodesicSegment integrate_geodesic(const FinslerStructure& metric, const Vector& x0,
                                   const Vector& y0, double length,
                                   const GeodesicOptions& options = {});

/// Geodesic through x0 with direction y0 extended both ways until the boundary
/// margin or `cap` arc length in each direction.
GeodesicSegment extend_geodesic(const FinslerStructure& metric, const Vector& x0,
                                const Vector& y0, double cap = 50.0,
                                const GeodesicOptions& options = {});

/// max |F(x, x') - 1| over the samples.
double unit_speed_drift(const FinslerStructure& metric, const GeodesicSegment& segment);

struct BVPResult {
  GeodesicSegment segment;
  double miss = 0.0;
  int iterations = 0;
  Vector initial_velocity;  ///< exp_x(v) = y at parameter 1; F(x, v) is the length
};

struct ConnectOptions {
  double tolerance = 1e-10;
  int max_iterations = 40;
  GeodesicOptions geodesic;
};

/// Shooting on the initial velocity, starting from the chord y - x.
BVPResult connect(const FinslerStructure& metric, const Vector& x, const Vector& y,
                  const ConnectOptions& options = {});

/// Length of the connecting geodesic; 0 for x = y.
double finsler_distance(const FinslerStructure& metric, const Vector& x, const Vector& y,
                        const ConnectOptions& options = {});

}  // namespace finsler
