#include "finsler/projective.hpp"

#include "finsler/curvature.hpp"
#include "finsler/errors.hpp"
#include "finsler/format.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace finsler {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double schwarzian_from(double f1, double f2, double f3, double f, double critical) {
  if (!(std::abs(f1) > critical * std::max(1.0, std::abs(f))))
    throw CriticalPointError("Schwarzian undefined: f' = " + format_number(f1));
  const double r = f2 / f1;
  return f3 / f1 - 1.5 * r * r;
}

// Root of a function with a sign change on [lo, hi], to full precision.
template <class F>
double bracketed_root(F f, double lo, double hi) {
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  std::uintmax_t iterations = 200;
  const auto r = boost::math::tools::toms748_solve(
      f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), iterations);
  return 0.5 * (r.first + r.second);
}

}  // namespace

MobiusTransform::MobiusTransform(double a, double b, double c, double d) {
  const double det = a * d - b * c;
  if (!std::isfinite(det) || det == 0.0)
    throw ConstructionError("Moebius transform needs ad - bc != 0 (got " + format_number(det) + ")");
  const double scale = 1.0 / std::sqrt(std::abs(det));
  a_ = a * scale;
  b_ = b * scale;
  c_ = c * scale;
  d_ = d * scale;
}

MobiusTransform MobiusTransform::interval_translation(double t) {
  return {std::cosh(t), std::sinh(t), std::sinh(t), std::cosh(t)};
}

MobiusTransform MobiusTransform::affine(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
    throw ConstructionError("affine chart needs finite lo < hi");
  return {0.5 * (hi - lo), 0.5 * (hi + lo), 0.0, 1.0};
}

double MobiusTransform::operator()(double t) const {
  const double den = c_ * t + d_;
  if (den == 0.0) throw PoleError("Moebius transform evaluated at its pole " + format_number(t));
  return (a_ * t + b_) / den;
}

Jet MobiusTransform::operator()(const Jet& t) const {
  if (c_ * t.value() + d_ == 0.0)
    throw PoleError("Moebius transform evaluated at its pole " + format_number(t.value()));
  return (a_ * t + b_) / (c_ * t + d_);
}

double MobiusTransform::derivative(double t) const {
  const double den = c_ * t + d_;
  if (den == 0.0) throw PoleError("Moebius transform evaluated at its pole " + format_number(t));
  return determinant() / (den * den);
}

double MobiusTransform::pole() const { return c_ == 0.0 ? kInf : -d_ / c_; }

MobiusTransform MobiusTransform::compose(const MobiusTransform& o) const {
  return {a_ * o.a_ + b_ * o.c_, a_ * o.b_ + b_ * o.d_, c_ * o.a_ + d_ * o.c_,
          c_ * o.b_ + d_ * o.d_};
}

MobiusTransform MobiusTransform::inverse() const { return {d_, -b_, -c_, a_}; }

double cross_ratio(double p1, double p2, double p3, double p4) {
  const double den = (p2 - p3) * (p1 - p4);
  if (den == 0.0) throw UsageError("cross-ratio of coincident points");
  return (p1 - p3) * (p2 - p4) / den;
}

double schwarzian(const JetFunction& f, double t, double critical) {
  const Jet v = f(Jet::variable(JetSpace::get(1, 3), 0, t));
  const int i1[] = {1}, i2[] = {2}, i3[] = {3};
  return schwarzian_from(v.derivative(i1), v.derivative(i2), v.derivative(i3), v.value(),
                         critical);
}

double schwarzian_numeric(const ScalarFunction& f, double t, const EngineConfig& config,
                          double critical) {
  // Differentiate u -> f(t + u) at u = 0 so the step does not scale with |t|.
  TangentField field;
  field.value = [&](const Vector&, const Vector& y) { return f(t + y[0]); };
  EngineConfig fd = config;
  fd.mode = DiffMode::finite_difference;
  const Vector x = Vector::Zero(1);
  const Vector u = Vector::Zero(1);
  auto d = [&](int k) { return partial({field, {0}, {k}, x, u}, fd); };
  return schwarzian_from(d(1), d(2), d(3), f(t), critical);
}

double schwarzian_sampled(const std::vector<double>& t, const std::vector<double>& f, double at,
                          double critical) {
  constexpr int kWidth = 7;
  if (t.size() != f.size() || t.size() < kWidth)
    throw UsageError("schwarzian_sampled: need at least 7 samples with matching sizes");
  const auto it = std::lower_bound(t.begin(), t.end(), at);
  auto first = static_cast<std::ptrdiff_t>(it - t.begin()) - kWidth / 2;
  first = std::clamp<std::ptrdiff_t>(first, 0, static_cast<std::ptrdiff_t>(t.size()) - kWidth);
  const double h = (t[first + kWidth - 1] - t[first]) / (kWidth - 1);
  Matrix vandermonde(kWidth, kWidth);
  Vector rhs(kWidth);
  for (int i = 0; i < kWidth; ++i) {
    const double z = (t[first + i] - at) / h;
    double p = 1.0;
    for (int k = 0; k < kWidth; ++k, p *= z) vandermonde(i, k) = p;
    rhs[i] = f[first + i];
  }
  const Vector c = vandermonde.colPivHouseholderQr().solve(rhs);
  return schwarzian_from(c[1] / h, 2.0 * c[2] / (h * h), 6.0 * c[3] / (h * h * h), c[0],
                         critical);
}

double check_composition(const JetFunction& f, const JetFunction& g, double t) {
  const double lhs = schwarzian([&](const Jet& u) { return f(g(u)); }, t);
  const Jet gj = g(Jet::variable(JetSpace::get(1, 1), 0, t));
  const int i1[] = {1};
  const double g1 = gj.derivative(i1);
  const double rhs = schwarzian(f, gj.value()) * g1 * g1 + schwarzian(g, t);
  return std::abs(lhs - rhs);
}

ProjectiveParameter::ProjectiveParameter(std::function<double(double)> q, double s_begin,
                                         double s_end, double s0,
                                         const ProjectiveOptions& options)
    : q_(std::move(q)), s0_(s0), s_begin_(s_begin), s_end_(s_end), options_(options) {
  if (!(s_begin <= s0 && s0 <= s_end))
    throw UsageError("projective parameter: s0 = " + format_number(s0) + " outside [" +
                     format_number(s_begin) + ", " + format_number(s_end) + "]");
  // The linear ODE sees q through a cubic B-spline of samples: evaluating q
  // inside the integrator lets evaluation noise drive the step size down.
  if (!(options.sample_spacing > 0.0)) throw UsageError("projective parameter: spacing must be positive");
  const double span = s_end - s_begin;
  const auto count = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(span / options.sample_spacing)) + 1);
  const double step = span / static_cast<double>(count - 1);
  std::vector<double> samples(count);
  if (span > 0.0)
    for (std::size_t i = 0; i < count; ++i)
      samples[i] = q_(i + 1 == count ? s_end : s_begin + step * static_cast<double>(i));
  using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
  const auto spline = span > 0.0 ? std::make_shared<Spline>(samples.begin(), samples.end(), s_begin, step)
                                 : nullptr;
  const OdeRhs rhs = [spline](double s, const Vector& w, Vector& dw) {
    const double half_q = 0.5 * (*spline)(s);
    dw.resize(4);
    dw << w[1], -half_q * w[0], w[3], -half_q * w[2];
  };
  Vector w0(4);
  w0 << 0.0, 1.0, 1.0, 0.0;
  OdeOptions ode;
  ode.rtol = options.rtol;
  ode.atol = options.atol;
  if (s_end > s0) forward_ = integrate_dop853(rhs, s0, w0, s_end, ode).solution;
  if (s_begin < s0) backward_ = integrate_dop853(rhs, s0, w0, s_begin, ode).solution;

  // Sign changes of w2, checked at step ends and three interior points.
  auto w2 = [this](double s) { return basis(s)[2]; };
  for (const DenseSolution* sol : {&backward_, &forward_}) {
    for (const auto& step : sol->steps()) {
      double prev_s = step.t0;
      double prev = step.state(prev_s)[2];
      for (int k = 1; k <= 4; ++k) {
        const double s = step.t0 + step.h * k / 4.0;
        const double cur = step.state(s)[2];
        if ((prev < 0.0) != (cur < 0.0) || cur == 0.0) {
          poles_.push_back(bracketed_root(w2, std::min(prev_s, s), std::max(prev_s, s)));
        }
        prev_s = s;
        prev = cur;
      }
    }
  }
  std::sort(poles_.begin(), poles_.end());
  poles_.erase(std::unique(poles_.begin(), poles_.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               poles_.end());
}

const DenseSolution& ProjectiveParameter::piece(double s) const {
  return (s >= s0_ && !forward_.empty()) || backward_.empty() ? forward_ : backward_;
}

Vector ProjectiveParameter::basis(double s) const {
  if (s == s0_) {
    Vector w(4);
    w << 0.0, 1.0, 1.0, 0.0;
    return w;
  }
  return piece(s).state(s);
}

double ProjectiveParameter::pi(double s) const {
  for (double p : poles_)
    if (std::abs(s - p) <= 1e-12 * std::max(1.0, std::abs(p)))
      throw ChartError("projective parameter has a pole at s = " + format_number(p));
  const Vector w = basis(s);
  if (w[2] == 0.0) throw ChartError("projective parameter has a pole at s = " + format_number(s));
  return w[0] / w[2];
}

double ProjectiveParameter::wronskian(double s) const {
  const Vector w = basis(s);
  return w[0] * w[3] - w[1] * w[2];
}

std::pair<double, double> ProjectiveParameter::chart_interval() const {
  double lo = s_begin_, hi = s_end_;
  for (double p : poles_) {
    if (p < s0_) lo = std::max(lo, p);
    if (p > s0_) hi = std::min(hi, p);
  }
  return {lo, hi};
}

std::pair<double, double> ProjectiveParameter::chart_range() const {
  const auto [lo, hi] = chart_interval();
  const bool lo_pole = std::find(poles_.begin(), poles_.end(), lo) != poles_.end();
  const bool hi_pole = std::find(poles_.begin(), poles_.end(), hi) != poles_.end();
  return {lo_pole ? -kInf : pi(lo), hi_pole ? kInf : pi(hi)};
}

double ProjectiveParameter::inverse(double value) const {
  const auto [vlo, vhi] = chart_range();
  if (!(value >= vlo && value <= vhi))
    throw ChartError("projective parameter value " + format_number(value) +
                     " outside the chart range [" + format_number(vlo) + ", " +
                     format_number(vhi) + "]");
  auto [lo, hi] = chart_interval();
  // Pull open ends off the poles until pi brackets the value.
  auto f = [&](double s) { return pi(s) - value; };
  double a = s0_, b = s0_;
  if (value < 0.0) {
    a = lo;
    for (double gap = 0.5 * (s0_ - lo); vlo == -kInf; gap *= 0.5) {
      a = lo + gap;
      if (f(a) <= 0.0 || gap < 1e-15) break;
    }
  } else {
    b = hi;
    for (double gap = 0.5 * (hi - s0_); vhi == kInf; gap *= 0.5) {
      b = hi - gap;
      if (f(b) >= 0.0 || gap < 1e-15) break;
    }
  }
  return bracketed_root(f, a, b);
}

double ProjectiveParameter::wronskian_drift() const {
  const double w0 = wronskian(s0_);
  double drift = 0.0;
  for (const DenseSolution* sol : {&backward_, &forward_})
    for (const auto& step : sol->steps())
      for (double s : {step.t0, step.t0 + 0.5 * step.h, step.t0 + step.h}) {
        const Vector w = step.state(s);
        drift = std::max(drift, std::abs(w[0] * w[3] - w[1] * w[2] - w0));
      }
  return drift;
}

double ProjectiveParameter::schwarzian_residual(int points, double margin) const {
  auto [lo, hi] = chart_interval();
  margin = std::min(margin, 0.1 * (hi - lo));
  lo += margin;
  hi -= margin;
  // Wide stencils: the basis grows like exp(|s|) on hyperbolic geodesics, so
  // fine steps amplify the integrator's local error in the third derivative.
  EngineConfig fd = options_.diff;
  if (fd.base_step == 0.0) {
    fd.base_step = std::min(0.2, 0.4 * margin);
    fd.richardson_levels = 4;
  }
  fd.target_accuracy = std::max(fd.target_accuracy, 1e-4);
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const double s = points == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (points - 1);
    // Differentiate the Moebius image of pi normalized at s (value 0, slope 1):
    // the ratio of the basis solutions with those initial data at s.
    const Vector w = basis(s);
    const ScalarFunction normalized = [&](double u) {
      const Vector v = basis(u);
      return (w[0] * v[2] - w[2] * v[0]) / (w[3] * v[0] - w[1] * v[2]);
    };
    worst = std::max(worst, std::abs(schwarzian_numeric(normalized, s, fd) - q_(s)));
  }
  return worst;
}

std::vector<ProjectiveParameter::Sample> ProjectiveParameter::table(double spacing) const {
  if (!(spacing > 0.0)) throw UsageError("table spacing must be positive");
  const auto [lo, hi] = chart_interval();
  std::vector<Sample> out;
  const auto count = static_cast<long>(std::floor((s_end_ - s_begin_) / spacing));
  for (long i = 0; i <= count + 1; ++i) {
    const double s = std::min(s_end_, s_begin_ + spacing * static_cast<double>(i));
    const Vector w = basis(s);
    const bool inside = s >= lo && s <= hi && w[2] != 0.0;
    out.push_back({s, q_(s), w[0], w[2],
                   inside ? w[0] / w[2] : std::numeric_limits<double>::quiet_NaN()});
    if (s == s_end_) break;
  }
  return out;
}

ProjectiveParameter projective_parameter(const FinslerStructure& metric,
                                         const GeodesicSegment& segment, double s0,
                                         const ProjectiveOptions& options) {
  const int n = metric.dimension();
  if (n < 2) throw DimensionError(metric.name() + ": projective parameter needs dimension >= 2");
  auto q = [&metric, segment, options, n](double s) {
    return 2.0 / (n - 1) *
           ricci_scalar(metric, segment.position(s), segment.velocity(s), options.diff);
  };
  return ProjectiveParameter(q, segment.s_begin(), segment.s_end(), s0, options);
}

double locate_on_geodesic(const GeodesicSegment& segment, const Vector& p) {
  const auto& samples = segment.samples();
  if (samples.empty()) throw UsageError("locate_on_geodesic: empty geodesic");
  std::size_t best = 0;
  for (std::size_t i = 1; i < samples.size(); ++i)
    if ((samples[i].x - p).norm() < (samples[best].x - p).norm()) best = i;
  // Foot of the perpendicular: (x(s) - p) . x'(s) = 0.
  auto h = [&](double s) { return (segment.position(s) - p).dot(segment.velocity(s)); };
  double s = samples[best].s;
  for (std::size_t j : {best == 0 ? best : best - 1, best}) {
    if (j + 1 >= samples.size()) continue;
    const double a = samples[j].s, b = samples[j + 1].s;
    if ((h(a) <= 0.0) != (h(b) <= 0.0)) {
      s = bracketed_root(h, a, b);
      break;
    }
  }
  const double miss = (segment.position(s) - p).norm();
  if (miss > 1e-6)
    throw UsageError("point " + format_vector(p) + " is off the geodesic by " +
                     format_number(miss));
  return s;
}

InvarianceCheck invariance_cross_check(const FinslerStructure& a, const FinslerStructure& b,
                                       const Vector& x0, const Vector& y0,
                                       const std::array<Vector, 4>& probes,
                                       const ProjectiveOptions& options) {
  InvarianceCheck out;
  auto parameters = [&](const FinslerStructure& metric, std::array<double, 4>& pis) {
    GeodesicOptions go;
    go.diff = options.diff;
    const auto segment = extend_geodesic(metric, x0, y0, 50.0, go);
    const auto pp = projective_parameter(metric, segment, 0.0, options);
    for (int i = 0; i < 4; ++i) pis[i] = pp.pi(locate_on_geodesic(segment, probes[i]));
    return cross_ratio(pis[0], pis[1], pis[2], pis[3]);
  };
  out.cross_ratio_a = parameters(a, out.pi_a);
  out.cross_ratio_b = parameters(b, out.pi_b);
  out.residual = std::abs(out.cross_ratio_a - out.cross_ratio_b);
  return out;
}

}  // namespace finsler
