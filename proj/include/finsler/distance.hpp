#pragma once

#include "finsler/core.hpp"
#include "finsler/geodesics.hpp"
#include "finsler/projective.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace finsler {

/// Oriented pair of points of I = (-1, 1) with the Funk constant k.
struct IntervalPair {
  double a = 0.0;
  double b = 0.0;
  double k = 1.0;
};

/// D_f(a, b) = (1/2k)(|ln((1-a)(1+b)/((1-b)(1+a)))| + ln((1-a^2)/(1-b^2))).
double funk_distance_interval(const IntervalPair& p);
double funk_distance_interval(double a, double b, double k = 1.0);

/// Same from the complements 1 + a, 1 - a, 1 + b, 1 - b, which stay accurate
/// next to the endpoints of I.
double funk_distance_from_gaps(double a_plus, double a_minus, double b_plus, double b_minus,
                               double k);

/// Line integral of the interval Funk element (|du| + u du)/(k(1 - u^2)) from a
/// to b by adaptive Gauss-Kronrod quadrature.
double funk_interval_line_integral(double a, double b, double k = 1.0);

/// A projective map f: I -> M restricted to [a, b]: f(u) is the point of the
/// geodesic whose projective parameter equals chart(u). The parameter refers
/// to the metric it was built from, which must outlive the link.
struct ChainLink {
  GeodesicSegment geodesic;
  std::shared_ptr<const ProjectiveParameter> parameter;
  MobiusTransform chart;
  double a = 0.0;
  double b = 0.0;
  double s_start = 0.0;  ///< arc length of the start point on `geodesic`
  double s_end = 0.0;
};

struct Chain {
  std::vector<ChainLink> links;
  std::vector<Vector> waypoints;
  double k = 1.0;
};

/// L(chain) = sum of D_f(a_i, b_i).
double chain_length(const Chain& chain);

/// Point f(u) of a link.
Vector link_point(const ChainLink& link, double u);

struct LinkOptions {
  ConnectOptions connect;
  ProjectiveOptions projective;
  double extension_cap = 50.0;
  /// A chart may overshoot the computed parameter range by this fraction of
  /// its width (the geodesic window stops at the boundary margin).
  double range_slack = 1e-5;
};

/// Link along the geodesic from x to y. With no chart given, the affine chart
/// of I onto the parameter range of the chart containing x is used (ranges
/// reaching a pole are clipped just before it). Throws InadmissibleChartError
/// when y is not in that chart or a given chart leaves the range.
ChainLink make_link(const FinslerStructure& metric, const Vector& x, const Vector& y,
                    std::optional<MobiusTransform> chart = std::nullopt,
                    const LinkOptions& options = {});

/// Parameter range (lo, hi) usable by charts of a link.
std::pair<double, double> link_parameter_range(const ChainLink& link);

/// Same link re-charted by chart o tau_t (o swap), tau_t the hyperbolic
/// translation of I; the endpoints follow.
ChainLink rechart(const ChainLink& link, double t, bool swap);

struct PseudoDistanceOptions {
  double k = 1.0;
  /// Number of links; waypoints sit on the connecting geodesic and are refined
  /// by coordinate descent when segments > 1.
  int segments = 1;
  /// Search rounds; round j scans translations in [-T_j, T_j], T_j = min(0.5 * 2^j, max_shift).
  int budget = 8;
  double max_shift = 15.0;
  int multistart = 3;
  /// If set, the lower bound (2c/(sqrt(n-1) k)) d_F(x, y) is reported.
  std::optional<double> c;
  LinkOptions link;
};

struct PseudoDistanceReport {
  /// Upper estimate of d_M(x, y) (an infimum over chains, approximated from above).
  double estimate = 0.0;
  /// Single link in the base chart, before searching.
  double base_chart_value = 0.0;
  Chain best;
  int evaluations = 0;
  int rounds = 0;
  double finsler_distance = 0.0;
  std::optional<double> lower_bound;
  std::optional<double> alternate_lower_bound;  ///< (c/(sqrt(n-1) k)) d_F
};

PseudoDistanceReport pseudo_distance_upper(const FinslerStructure& metric, const Vector& x,
                                           const Vector& y,
                                           const PseudoDistanceOptions& options = {});

struct SchwarzReport {
  std::vector<double> u;
  std::vector<double> h;  ///< ds_M / ds_I in the direction of traversal
  double sup = 0.0;
  double argsup = 0.0;
  double bound = 0.0;  ///< k sqrt(n-1) / (2c)
  bool pass = false;
  bool interior_maximum = false;
  std::string diagnosis;
};

/// h(u) along a link on the grid, compared with the bound. Throws HypothesisError
/// if Ric_ij <= -c^2 g_ij fails on the link's line elements.
SchwarzReport schwarz_ratio(const FinslerStructure& metric, const ChainLink& link,
                            const std::vector<double>& grid, double c, double k = 1.0);

struct CorollaryReport {
  double lhs = 0.0;  ///< D_f(a, b)
  double finsler_distance = 0.0;
  double rhs = 0.0;            ///< (2c/(sqrt(n-1) k)) d_F(f(a), f(b))
  double alternate_rhs = 0.0;  ///< (c/(sqrt(n-1) k)) d_F(f(a), f(b))
  bool pass = false;
  bool alternate_pass = false;
  double ratio = 0.0;  ///< lhs / d_F
};

CorollaryReport corollary_check(const FinslerStructure& metric, const ChainLink& link, double c,
                                double k = 1.0);

struct PositivityEntry {
  Vector x, y;
  double estimate = 0.0;
  double finsler_distance = 0.0;
  double lower_bound = 0.0;
  double alternate_lower_bound = 0.0;
  bool positive = false;
  bool consistent = false;
  bool alternate_consistent = false;
};

struct PositivityReport {
  double c = 0.0;
  double k = 1.0;
  std::vector<PositivityEntry> entries;
  bool all_positive = false;
  bool all_consistent = false;
  bool all_alternate_consistent = false;
};

/// Compares pseudo-distance upper estimates with the candidate lower bounds.
/// Throws HypothesisError when the Ricci bound for c fails at the pair points.
PositivityReport positivity_probe(const FinslerStructure& metric,
                                  const std::vector<std::pair<Vector, Vector>>& pairs, double c,
                                  const PseudoDistanceOptions& options = {});

}  // namespace finsler
