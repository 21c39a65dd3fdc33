#pragma once

#include "finsler/core.hpp"
#include "finsler/diffengine.hpp"
#include "finsler/geodesics.hpp"
#include "finsler/jet.hpp"
#include "finsler/ode.hpp"

#include <array>
#include <functional>
#include <vector>

namespace finsler {

/// t -> (a t + b)/(c t + d), normalized so that |ad - bc| = 1.
class MobiusTransform {
 public:
  MobiusTransform() = default;
  /// ConstructionError when ad - bc = 0 (or not finite).
  MobiusTransform(double a, double b, double c, double d);

  static MobiusTransform identity() { return {}; }
  /// Hyperbolic translation of I = (-1, 1) sending 0 to tanh(t).
  static MobiusTransform interval_translation(double t);
  /// Affine map sending -1, 1 to lo, hi.
  static MobiusTransform affine(double lo, double hi);

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }
  double determinant() const { return a_ * d_ - b_ * c_; }

  /// PoleError when c t + d = 0.
  double operator()(double t) const;
  Jet operator()(const Jet& t) const;
  double derivative(double t) const;
  /// Pole -d/c, or infinity when c = 0.
  double pole() const;

  /// (this o other)(t) = this(other(t)).
  MobiusTransform compose(const MobiusTransform& other) const;
  MobiusTransform inverse() const;

 private:
  double a_ = 1.0, b_ = 0.0, c_ = 0.0, d_ = 1.0;
};

/// (p1 - p3)(p2 - p4) / ((p2 - p3)(p1 - p4)).
double cross_ratio(double p1, double p2, double p3, double p4);

using JetFunction = std::function<Jet(const Jet&)>;
using ScalarFunction = std::function<double(double)>;

/// {f, t} = f'''/f' - (3/2)(f''/f')^2 from third-order jets. CriticalPointError
/// when |f'(t)| <= critical * max(1, |f(t)|).
double schwarzian(const JetFunction& f, double t, double critical = 1e-10);

/// Same from finite differences of a black-box function.
double schwarzian_numeric(const ScalarFunction& f, double t, const EngineConfig& config = {},
                          double critical = 1e-10);

/// From samples (t_i, f_i), t increasing: a degree-6 local interpolant on the 7
/// nearest samples is differentiated.
double schwarzian_sampled(const std::vector<double>& t, const std::vector<double>& f, double at,
                          double critical = 1e-10);

/// |{f o g, t} - ({f, g(t)} g'(t)^2 + {g, t})|.
double check_composition(const JetFunction& f, const JetFunction& g, double t);

struct ProjectiveOptions {
  double rtol = 1e-13;
  double atol = 1e-13;
  /// Spacing of the q samples behind the cubic B-spline the ODE is integrated against.
  double sample_spacing = 0.05;
  EngineConfig diff;
};

/// Solution of {pi, s} = q through w'' + q w / 2 = 0 (q interpolated from samples) with
/// w1(s0) = 0, w1'(s0) = 1, w2(s0) = 1, w2'(s0) = 0 and pi = w1 / w2.
class ProjectiveParameter {
 public:
  struct Sample {
    double s, q, w1, w2, pi;
  };

  ProjectiveParameter(std::function<double(double)> q, double s_begin, double s_end, double s0,
                      const ProjectiveOptions& options = {});

  double s0() const { return s0_; }
  double s_begin() const { return s_begin_; }
  double s_end() const { return s_end_; }
  double q(double s) const { return q_(s); }

  /// (w1, w1', w2, w2') at s.
  Vector basis(double s) const;
  /// ChartError naming the pole when s sits on (or within 1e-12 of) a zero of w2.
  double pi(double s) const;
  double wronskian(double s) const;

  /// Zeros of w2 in [s_begin, s_end], increasing.
  const std::vector<double>& poles() const { return poles_; }
  /// Interval between the poles adjacent to s0, clipped to [s_begin, s_end].
  std::pair<double, double> chart_interval() const;
  /// Range of pi over chart_interval() (pi is increasing there).
  std::pair<double, double> chart_range() const;
  /// s in the chart containing s0 with pi(s) = value; ChartError outside the range.
  double inverse(double value) const;

  /// max |W(s) - W(s0)| over the integrator steps.
  double wronskian_drift() const;
  /// sup |{pi, s} - q(s)| on a grid inside the chart containing s0, keeping
  /// `margin` away from its ends; the Schwarzian is taken by finite differences.
  double schwarzian_residual(int points = 41, double margin = 0.5) const;
  /// Table on a uniform grid (pi is NaN outside the chart containing s0).
  std::vector<Sample> table(double spacing) const;

 private:
  const DenseSolution& piece(double s) const;

  std::function<double(double)> q_;
  double s0_, s_begin_, s_end_;
  ProjectiveOptions options_;
  DenseSolution forward_, backward_;
  std::vector<double> poles_;
};

/// q(s) = (2/(n-1)) Ric(x(s), x'(s)) along a unit-speed geodesic, normalized at arc length s0.
ProjectiveParameter projective_parameter(const FinslerStructure& metric,
                                         const GeodesicSegment& segment, double s0 = 0.0,
                                         const ProjectiveOptions& options = {});

/// Parameter-free check that two metrics sharing a geodesic (as a point set)
/// induce Moebius-related projective parameters on it.
struct InvarianceCheck {
  std::array<double, 4> pi_a{}, pi_b{};
  double cross_ratio_a = 0.0, cross_ratio_b = 0.0;
  double residual = 0.0;
};

/// Extends each metric's geodesic through x0 in direction y0, locates the probe
/// points on it and compares cross-ratios of their projective parameters.
/// UsageError if a probe is off either geodesic by more than 1e-6.
InvarianceCheck invariance_cross_check(const FinslerStructure& a, const FinslerStructure& b,
                                       const Vector& x0, const Vector& y0,
                                       const std::array<Vector, 4>& probes,
                                       const ProjectiveOptions& options = {});

/// Arc length on a straight geodesic at which it passes closest to p (p must lie
/// on the traced point set to within 1e-6).
double locate_on_geodesic(const GeodesicSegment& segment, const Vector& p);

}  // namespace finsler
