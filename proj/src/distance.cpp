#include "finsler/distance.hpp"

#include "finsler/curvature.hpp"
#include "finsler/errors.hpp"
#include "finsler/format.hpp"
#include "finsler/parallel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace finsler {

namespace {

void require_in_interval(double u, const char* name) {
  if (!(std::abs(u) < 1.0))
    throw DomainError(std::string("interval Funk distance: ") + name + " = " + format_number(u) +
                      " outside (-1, 1)");
}

/// Gaps 1 + w and 1 - w of w = tau_t^{-1}(v), optionally followed by u -> -u.
std::pair<double, double> translated_gaps(double v, double t, bool swap) {
  const double up = std::exp(t) * (1.0 - v);
  const double down = std::exp(-t) * (1.0 + v);
  const double den = 0.5 * (up + down);
  const double plus = down / den;
  const double minus = up / den;
  return swap ? std::pair{minus, plus} : std::pair{plus, minus};
}

struct ChartSearch {
  double value = std::numeric_limits<double>::infinity();
  double t = 0.0;
  bool swap = false;
};

double chart_objective(double va, double vb, double t, bool swap, double k) {
  const auto [ap, am] = translated_gaps(va, t, swap);
  const auto [bp, bm] = translated_gaps(vb, t, swap);
  return funk_distance_from_gaps(ap, am, bp, bm, k);
}

/// Minimizes D_f over chart o tau_t (o swap) for t in growing windows.
ChartSearch search_charts(const ChainLink& link, const PseudoDistanceOptions& options,
                          int& evaluations, int& rounds) {
  const double va = link.a;
  const double vb = link.b;
  ChartSearch best;
  auto consider = [&](double t, bool swap) {
    const double v = chart_objective(va, vb, t, swap, options.k);
    ++evaluations;
    if (v < best.value) best = {v, t, swap};
    return v;
  };
  consider(0.0, false);
  for (int j = 0; j < options.budget; ++j) {
    const double T = std::min(0.5 * std::ldexp(1.0, j), options.max_shift);
    ++rounds;
    for (bool swap : {false, true}) {
      consider(-T, swap);
      consider(T, swap);
      const int starts = std::max(1, options.multistart);
      for (int i = 0; i < starts; ++i) {
        const double lo = -T + 2.0 * T * i / starts;
        const double hi = -T + 2.0 * T * (i + 1) / starts;
        std::uintmax_t iterations = 100;
        const auto r = boost::math::tools::brent_find_minima(
            [&](double t) { return consider(t, swap); }, lo, hi, 40, iterations);
        (void)r;
      }
    }
  }
  return best;
}

double link_length(const ChainLink& link, double k) {
  return funk_distance_interval(link.a, link.b, k);
}

ChainLink searched_link(const ChainLink& link, const PseudoDistanceOptions& options,
                        int& evaluations, int& rounds, double& value) {
  const auto best = search_charts(link, options, evaluations, rounds);
  value = best.value;
  return rechart(link, best.t, best.swap);
}

}  // namespace

double funk_distance_from_gaps(double a_plus, double a_minus, double b_plus, double b_minus,
                               double k) {
  if (!(k > 0.0)) throw DomainError("interval Funk distance: k must be positive");
  const double la_p = std::log(a_plus), la_m = std::log(a_minus);
  const double lb_p = std::log(b_plus), lb_m = std::log(b_minus);
  const double cross = la_m + lb_p - lb_m - la_p;
  const double drift = la_m + la_p - lb_m - lb_p;
  return std::max(0.0, (std::abs(cross) + drift) / (2.0 * k));
}

double funk_distance_interval(double a, double b, double k) {
  require_in_interval(a, "a");
  require_in_interval(b, "b");
  if (a == b) return 0.0;
  return funk_distance_from_gaps(1.0 + a, 1.0 - a, 1.0 + b, 1.0 - b, k);
}

double funk_distance_interval(const IntervalPair& p) {
  return funk_distance_interval(p.a, p.b, p.k);
}

double funk_interval_line_integral(double a, double b, double k) {
  require_in_interval(a, "a");
  require_in_interval(b, "b");
  if (a == b) return 0.0;
  const double sign = b > a ? 1.0 : -1.0;
  // (|du| + u du) / (1 - u^2) = du / (1 - sign u) along the oriented segment.
  auto element = [&](double u) { return 1.0 / (k * (1.0 - sign * u)); };
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      element, std::min(a, b), std::max(a, b), 15, 1e-12, &error);
  return value;
}

double chain_length(const Chain& chain) {
  double total = 0.0;
  for (const auto& link : chain.links) total += link_length(link, chain.k);
  return total;
}

std::pair<double, double> link_parameter_range(const ChainLink& link) {
  const auto& p = *link.parameter;
  auto [vlo, vhi] = p.chart_range();
  const auto [lo, hi] = p.chart_interval();
  const double delta = 1e-6 * (hi - lo);
  if (std::isinf(vlo)) vlo = p.pi(lo + delta);
  if (std::isinf(vhi)) vhi = p.pi(hi - delta);
  return {vlo, vhi};
}

Vector link_point(const ChainLink& link, double u) {
  require_in_interval(u, "u");
  return link.geodesic.position(link.parameter->inverse(link.chart(u)));
}

ChainLink make_link(const FinslerStructure& metric, const Vector& x, const Vector& y,
                    std::optional<MobiusTransform> chart, const LinkOptions& options) {
  const auto bvp = connect(metric, x, y, options.connect);
  const double length = metric.evaluate(x, bvp.initial_velocity);
  ChainLink link;
  link.geodesic = extend_geodesic(metric, x, bvp.initial_velocity,
                                  std::max(options.extension_cap, 1.5 * length),
                                  options.connect.geodesic);
  link.parameter = std::make_shared<const ProjectiveParameter>(
      projective_parameter(metric, link.geodesic, 0.0, options.projective));
  link.s_start = 0.0;
  link.s_end = length;
  const double s_hi = link.parameter->chart_interval().second;
  const auto [vlo, vhi] = link_parameter_range(link);
  const std::string range = "[" + format_number(vlo) + ", " + format_number(vhi) + "]";
  if (!(length < s_hi))
    throw InadmissibleChartError("end point at arc length " + format_number(length) +
                                 " lies beyond the projective chart of the start point (s < " +
                                 format_number(s_hi) + ", parameter range " + range + ")");
  if (chart) {
    const double slack = options.range_slack * std::max(1.0, vhi - vlo);
    const double pole = chart->pole();
    bool inside = !(pole >= -1.0 && pole <= 1.0);
    if (inside) {
      const double e0 = (*chart)(-1.0), e1 = (*chart)(1.0);
      inside = std::min(e0, e1) >= vlo - slack && std::max(e0, e1) <= vhi + slack;
    }
    if (!inside)
      throw InadmissibleChartError("chart does not map I into the attainable parameter range " +
                                   range);
    link.chart = *chart;
  } else {
    if (!(vhi > vlo)) throw InadmissibleChartError("degenerate parameter range " + range);
    link.chart = MobiusTransform::affine(vlo, vhi);
  }
  const auto inverse = link.chart.inverse();
  link.a = inverse(link.parameter->pi(link.s_start));
  link.b = inverse(link.parameter->pi(link.s_end));
  require_in_interval(link.a, "a");
  require_in_interval(link.b, "b");
  return link;
}

ChainLink rechart(const ChainLink& link, double t, bool swap) {
  ChainLink out = link;
  auto shift = MobiusTransform::interval_translation(t);
  if (swap) shift = shift.compose(MobiusTransform(-1.0, 0.0, 0.0, 1.0));
  out.chart = link.chart.compose(shift);
  const auto [ap, am] = translated_gaps(link.a, t, swap);
  const auto [bp, bm] = translated_gaps(link.b, t, swap);
  out.a = 0.5 * (ap - am);
  out.b = 0.5 * (bp - bm);
  return out;
}

PseudoDistanceReport pseudo_distance_upper(const FinslerStructure& metric, const Vector& x,
                                           const Vector& y,
                                           const PseudoDistanceOptions& options) {
  if (!(options.k > 0.0)) throw UsageError("pseudo-distance: k must be positive");
  if (options.segments < 1 || options.segments > 4)
    throw UsageError("pseudo-distance: segments must be in 1..4");
  if (options.budget < 0) throw UsageError("pseudo-distance: budget must be nonnegative");
  PseudoDistanceReport report;
  report.best.k = options.k;
  metric.require_point(x);
  metric.require_point(y);
  const int n = metric.dimension();
  auto bounds = [&](double d) {
    if (!options.c) return;
    const double factor = *options.c / (std::sqrt(n - 1.0) * options.k);
    report.lower_bound = 2.0 * factor * d;
    report.alternate_lower_bound = factor * d;
  };
  if (x == y) {
    report.best.waypoints = {x};
    bounds(0.0);
    return report;
  }

  const ChainLink base = make_link(metric, x, y, std::nullopt, options.link);
  report.base_chart_value = link_length(base, options.k);
  report.finsler_distance = base.s_end;
  bounds(report.finsler_distance);
  double value = 0.0;
  report.best.links = {searched_link(base, options, report.evaluations, report.rounds, value)};
  report.best.waypoints = {x, y};
  report.estimate = value;

  if (options.segments > 1) {
    // Waypoints on the connecting geodesic at fractions f_1 < ... < f_{m-1}.
    const int m = options.segments;
    std::vector<double> fractions;
    for (int i = 1; i < m; ++i) fractions.push_back(static_cast<double>(i) / m);
    auto build = [&](const std::vector<double>& f, Chain& chain) {
      chain = Chain{};
      chain.k = options.k;
      chain.waypoints.push_back(x);
      for (double v : f) chain.waypoints.push_back(base.geodesic.position(v * base.s_end));
      chain.waypoints.push_back(y);
      double total = 0.0;
      int rounds = 0;
      for (std::size_t i = 0; i + 1 < chain.waypoints.size(); ++i) {
        const ChainLink link =
            make_link(metric, chain.waypoints[i], chain.waypoints[i + 1], std::nullopt, options.link);
        double part = 0.0;
        chain.links.push_back(searched_link(link, options, report.evaluations, rounds, part));
        total += part;
      }
      return total;
    };
    Chain chain;
    double total = build(fractions, chain);
    for (std::size_t j = 0; j < fractions.size(); ++j) {
      const double lo = j == 0 ? 0.0 : fractions[j - 1];
      const double hi = j + 1 == fractions.size() ? 1.0 : fractions[j + 1];
      std::uintmax_t iterations = 12;
      auto trial = fractions;
      const auto r = boost::math::tools::brent_find_minima(
          [&](double f) {
            trial[j] = f;
            Chain scratch;
            return build(trial, scratch);
          },
          lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), 20, iterations);
      if (r.second < total) {
        fractions[j] = r.first;
        total = build(fractions, chain);
      }
    }
    if (total < report.estimate) {
      report.estimate = total;
      report.best = std::move(chain);
    }
  }
  return report;
}

SchwarzReport schwarz_ratio(const FinslerStructure& metric, const ChainLink& link,
                            const std::vector<double>& grid, double c, double k) {
  if (!(c > 0.0) || !(k > 0.0)) throw UsageError("schwarz_ratio: c and k must be positive");
  if (grid.empty()) throw UsageError("schwarz_ratio: empty grid");
  const int n = metric.dimension();
  const auto& p = *link.parameter;
  const bool forward = link.b >= link.a;
  struct Point {
    double s, ds_du;
  };
  std::vector<Point> points;
  std::vector<LineElement> elements;
  for (double u : grid) {
    require_in_interval(u, "grid point");
    const double pi = link.chart(u);
    const double s = p.inverse(pi);
    const Vector w = p.basis(s);
    const double pi_prime = -(w[0] * w[3] - w[1] * w[2]) / (w[2] * w[2]);
    points.push_back({s, link.chart.derivative(u) / pi_prime});
    elements.push_back({link.geodesic.position(s), link.geodesic.velocity(s)});
  }
  const auto bound_check = check_ricci_bound(metric, elements, c);
  if (!bound_check.pass)
    throw HypothesisError("Ric_ij <= -c^2 g_ij fails for c = " + format_number(c) +
                          " (largest eigenvalue of Ric + c^2 g: " +
                          format_number(bound_check.worst) + ")");
  SchwarzReport report;
  report.bound = k * std::sqrt(n - 1.0) / (2.0 * c);
  report.sup = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double u = grid[i];
    const double dir = forward ? 1.0 : -1.0;
    const double ds_du = points[i].ds_du;
    const Vector tangent = link.geodesic.velocity(points[i].s) * (ds_du * dir >= 0.0 ? 1.0 : -1.0);
    const double ds_m = metric.evaluate(link.geodesic.position(points[i].s), tangent) *
                        std::abs(ds_du);
    const double ds_i = 1.0 / (k * (1.0 - dir * u));
    report.u.push_back(u);
    report.h.push_back(ds_m / ds_i);
    if (report.h.back() > report.sup) {
      report.sup = report.h.back();
      arg = i;
    }
  }
  report.argsup = grid[arg];
  report.interior_maximum = arg > 0 && arg + 1 < grid.size() && report.h[arg - 1] < report.sup &&
                            report.h[arg + 1] < report.sup;
  report.diagnosis = report.interior_maximum ? "interior maximum" : "no interior maximum";
  report.pass = report.sup <= report.bound;
  return report;
}

CorollaryReport corollary_check(const FinslerStructure& metric, const ChainLink& link, double c,
                                double k) {
  if (!(c > 0.0) || !(k > 0.0)) throw UsageError("corollary_check: c and k must be positive");
  const int n = metric.dimension();
  CorollaryReport report;
  report.lhs = funk_distance_interval(link.a, link.b, k);
  if (link.a != link.b) {
    const Vector pa = link_point(link, link.a);
    const Vector pb = link_point(link, link.b);
    report.finsler_distance = finsler_distance(metric, pa, pb);
  }
  const double factor = c / (std::sqrt(n - 1.0) * k);
  report.rhs = 2.0 * factor * report.finsler_distance;
  report.alternate_rhs = factor * report.finsler_distance;
  const double slack = 1e-12 * std::max(1.0, report.rhs);
  report.pass = report.lhs >= report.rhs - slack;
  report.alternate_pass = report.lhs >= report.alternate_rhs - slack;
  report.ratio = report.finsler_distance > 0.0 ? report.lhs / report.finsler_distance : 0.0;
  return report;
}

PositivityReport positivity_probe(const FinslerStructure& metric,
                                  const std::vector<std::pair<Vector, Vector>>& pairs, double c,
                                  const PseudoDistanceOptions& options) {
  if (!(c > 0.0)) throw UsageError("positivity_probe: c must be positive");
  const int n = metric.dimension();
  std::vector<LineElement> elements;
  for (const auto& [x, y] : pairs)
    for (const Vector* p : {&x, &y})
      for (int i = 0; i < n; ++i) elements.push_back({*p, Vector::Unit(n, i)});
  const auto bound_check = check_ricci_bound(metric, elements, c);
  if (!bound_check.pass)
    throw HypothesisError("Ric_ij <= -c^2 g_ij fails for c = " + format_number(c) +
                          " (largest eigenvalue of Ric + c^2 g: " +
                          format_number(bound_check.worst) + ")");
  PositivityReport report;
  report.c = c;
  report.k = options.k;
  report.all_positive = report.all_consistent = report.all_alternate_consistent = true;
  PseudoDistanceOptions opts = options;
  opts.c = c;
  const auto results = parallel_map(pairs.size(), [&](std::size_t i) {
    return pseudo_distance_upper(metric, pairs[i].first, pairs[i].second, opts);
  });
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, y] = pairs[i];
    const auto& r = results[i];
    PositivityEntry e;
    e.x = x;
    e.y = y;
    e.estimate = r.estimate;
    e.finsler_distance = r.finsler_distance;
    e.lower_bound = r.lower_bound.value_or(0.0);
    e.alternate_lower_bound = r.alternate_lower_bound.value_or(0.0);
    e.positive = x == y || e.estimate > 0.0;
    const double slack = 1e-9 * std::max(1.0, e.lower_bound);
    e.consistent = e.estimate >= e.lower_bound - slack;
    e.alternate_consistent = e.estimate >= e.alternate_lower_bound - slack;
    report.all_positive = report.all_positive && e.positive;
    report.all_consistent = report.all_consistent && e.consistent;
    report.all_alternate_consistent = report.all_alternate_consistent && e.alternate_consistent;
    report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace finsler
