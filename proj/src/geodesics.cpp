#include "finsler/geodesics.hpp"

#include "finsler/format.hpp"

#include <algorithm>
#include <cmath>

namespace finsler {

namespace {

std::vector<int> unit_index(int size, int at) {
  std::vector<int> e(size, 0);
  e[at] = 1;
  return e;
}

Vector spray_finite_difference(const FinslerStructure& metric, const Vector& x, const Vector& y,
                               const EngineConfig& config) {
  const int n = metric.dimension();
  EngineConfig fd = config;
  fd.mode = DiffMode::finite_difference;
  const Matrix g = fundamental_tensor(metric, x, y, fd);
  Vector rhs(n);
  if (metric.analytic_fundamental_tensor(x, y)) {
    // With g available: [F^2]_{x^k y^l} = 2 d_k (g y)_l and [F^2]_{x^l} = d_l (y^T g y),
    // both first derivatives in x.
    auto in_domain = [&metric](const Vector& px) { return metric.contains(px); };
    for (int l = 0; l < n; ++l) {
      TangentField gy_l{[&metric, l](const Vector& px, const Vector& py) {
                          return (*metric.analytic_fundamental_tensor(px, py) * py)[l];
                        },
                        {}, in_domain};
      TangentField f2{[&metric](const Vector& px, const Vector& py) {
                        return py.dot(*metric.analytic_fundamental_tensor(px, py) * py);
                      },
                      {}, in_domain};
      double mixed = 0.0;
      for (int k = 0; k < n; ++k) {
        if (y[k] == 0.0) continue;
        DerivativeRequest r{gy_l, unit_index(n, k), std::vector<int>(n, 0), x, y};
        mixed += 2.0 * partial(r, fd) * y[k];
      }
      DerivativeRequest r{f2, unit_index(n, l), std::vector<int>(n, 0), x, y};
      rhs[l] = mixed - partial(r, fd);
    }
  } else {
    const TangentField f2 = squared_norm_field(metric);
    for (int l = 0; l < n; ++l) {
      double mixed = 0.0;
      for (int k = 0; k < n; ++k) {
        if (y[k] == 0.0) continue;
        DerivativeRequest r{f2, unit_index(n, k), unit_index(n, l), x, y};
        mixed += partial(r, fd) * y[k];
      }
      DerivativeRequest r{f2, unit_index(n, l), std::vector<int>(n, 0), x, y};
      rhs[l] = mixed - partial(r, fd);
    }
  }
  Eigen::LDLT<Matrix> ldlt(g);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw ConvexityError(metric.name() + ": singular fundamental tensor at " + format_vector(x));
  return 0.5 * ldlt.solve(rhs);
}

}  // namespace

bool supports_spray_jets(const FinslerStructure& metric) { return metric.supports_jets(); }

std::vector<Jet> spray_jet(const FinslerStructure& metric, const Vector& x, const Vector& y,
                           int order) {
  metric.require_line_element(x, y);
  if (y.isZero(0.0)) throw DomainError(metric.name() + ": spray needs y != 0");
  if (!metric.supports_jets()) throw UsageError(metric.name() + ": spray jets unavailable");
  const int n = metric.dimension();
  if (metric.has_analytic_spray()) {
    const auto jets = seed_line_element(x, y, order);
    return metric.analytic_spray_jet(jets.x, jets.y);
  }
  const auto jets = seed_line_element(x, y, order + 2);
  const Jet f = metric.evaluate_jet(jets.x, jets.y);
  const Jet f2 = f * f;
  std::vector<Jet> g(n * n);
  std::vector<Jet> rhs(n);
  std::vector<Jet> f2_y(n);
  for (int l = 0; l < n; ++l) f2_y[l] = f2.diff(n + l);
  for (int l = 0; l < n; ++l) {
    for (int j = 0; j < n; ++j) g[l * n + j] = 0.5 * f2_y[l].diff(n + j);
    Jet mixed = f2_y[l].diff(0) * jets.y[0];
    for (int k = 1; k < n; ++k) mixed += f2_y[l].diff(k) * jets.y[k];
    rhs[l] = mixed - f2.diff(l);
  }
  auto out = solve_linear(std::move(g), std::move(rhs), n);
  for (auto& v : out) v *= 0.5;
  return out;
}

Vector spray_value(const FinslerStructure& metric, const Vector& x, const Vector& y,
                   const EngineConfig& config) {
  metric.require_line_element(x, y);
  if (y.isZero(0.0)) return Vector::Zero(metric.dimension());
  if (metric.has_analytic_spray()) return metric.analytic_spray(x, y);
  if (metric.supports_jets() && config.mode == DiffMode::automatic) {
    const auto g = spray_jet(metric, x, y, 0);
    Vector out(metric.dimension());
    for (int i = 0; i < metric.dimension(); ++i) out[i] = g[i].value();
    return out;
  }
  return spray_finite_difference(metric, x, y, config);
}

SprayData spray(const FinslerStructure& metric, const Vector& x, const Vector& y,
                const EngineConfig& config) {
  metric.require_line_element(x, y);
  if (y.isZero(0.0)) throw DomainError(metric.name() + ": spray needs y != 0");
  const int n = metric.dimension();
  SprayData data;
  data.G.resize(n);
  data.jacobian.resize(n, n);
  if (metric.supports_jets() && config.mode == DiffMode::automatic) {
    const auto g = spray_jet(metric, x, y, 1);
    for (int i = 0; i < n; ++i) {
      data.G[i] = g[i].value();
      for (int j = 0; j < n; ++j) data.jacobian(i, j) = g[i].derivative(unit_index(2 * n, n + j));
    }
    return data;
  }
  data.G = spray_value(metric, x, y, config);
  EngineConfig fd = config;
  fd.mode = DiffMode::finite_difference;
  for (int i = 0; i < n; ++i) {
    TangentField component;
    component.value = [&, i](const Vector& px, const Vector& py) {
      return spray_value(metric, px, py, config)[i];
    };
    component.in_domain = [&](const Vector& px) { return metric.contains(px); };
    for (int j = 0; j < n; ++j) {
      DerivativeRequest r{component, std::vector<int>(n, 0), unit_index(n, j), x, y};
      data.jacobian(i, j) = partial(r, fd);
    }
  }
  return data;
}

// ---------------------------------------------------------------------------

GeodesicSegment::GeodesicSegment(std::string metric_name, int dimension,
                                 std::vector<DenseSolution> pieces, bool truncated_begin,
                                 bool truncated_end)
    : metric_name_(std::move(metric_name)),
      dimension_(dimension),
      truncated_begin_(truncated_begin),
      truncated_end_(truncated_end) {
  for (auto& p : pieces) {
    if (p.empty()) continue;
    s_begin_ = std::min(s_begin_, p.t_end());
    s_end_ = std::max(s_end_, p.t_end());
    for (const auto& step : p.steps()) {
      const Vector z = step.state(step.t0);
      samples_.push_back({step.t0, z.head(dimension), z.tail(dimension)});
    }
    const Vector z = p.state(p.t_end());
    samples_.push_back({p.t_end(), z.head(dimension), z.tail(dimension)});
    pieces_.push_back(std::move(p));
  }
  std::sort(samples_.begin(), samples_.end(),
            [](const Sample& a, const Sample& b) { return a.s < b.s; });
  samples_.erase(std::unique(samples_.begin(), samples_.end(),
                             [](const Sample& a, const Sample& b) { return a.s == b.s; }),
                 samples_.end());
}

const DenseSolution& GeodesicSegment::piece(double s) const {
  if (pieces_.empty()) throw DomainError("empty geodesic segment");
  for (const auto& p : pieces_) {
    const double lo = std::min(p.t_begin(), p.t_end());
    const double hi = std::max(p.t_begin(), p.t_end());
    if (s >= lo && s <= hi) return p;
  }
  const double slack = 1e-12 * std::max(1.0, s_end_ - s_begin_);
  if (s < s_begin_ && s >= s_begin_ - slack) return piece(s_begin_);
  if (s > s_end_ && s <= s_end_ + slack) return piece(s_end_);
  throw DomainError("geodesic evaluated at s = " + format_number(s) + " outside [" +
                    format_number(s_begin_) + ", " + format_number(s_end_) + "]");
}

Vector GeodesicSegment::position(double s) const {
  return piece(s).state(std::clamp(s, s_begin_, s_end_)).head(dimension_);
}

Vector GeodesicSegment::velocity(double s) const {
  return piece(s).state(std::clamp(s, s_begin_, s_end_)).tail(dimension_);
}

namespace {

OdeResult run_geodesic(const FinslerStructure& metric, const Vector& x0, const Vector& v0,
                       double t_end, const GeodesicOptions& options, bool with_margin) {
  const int n = metric.dimension();
  auto rhs = [&](double, const Vector& z, Vector& dz) {
    const Vector x = z.head(n);
    if (!metric.contains(x)) throw DomainError("geodesic left the domain");
    const Vector v = z.tail(n);
    dz.head(n) = v;
    dz.tail(n) = -spray_value(metric, x, v, options.diff);
  };
  const double margin = options.boundary_margin * metric.domain_scale();
  const double escape = options.escape_radius;
  OdeStop stop = [&metric, margin, escape, with_margin, n](double, const Vector& z) {
    const auto x = z.head(n);
    return x.norm() > escape || (with_margin && metric.domain_function(x) < margin);
  };
  Vector z0(2 * n);
  z0 << x0, v0;
  OdeOptions o;
  o.rtol = options.rtol;
  o.atol = options.atol;
  return integrate_dop853(rhs, 0.0, z0, t_end, o, stop);
}

Vector unit_direction(const FinslerStructure& metric, const Vector& x0, const Vector& y0) {
  const double f = metric.evaluate(x0, y0);
  if (!(f > 0.0)) throw DomainError(metric.name() + ": zero initial direction");
  return y0 / f;
}

}  // namespace

GeodesicSegment integrate_geodesic(const FinslerStructure& metric, const Vector& x0,
                                   const Vector& y0, double length,
                                   const GeodesicOptions& options) {
  metric.require_line_element(x0, y0);
  const Vector v0 = unit_direction(metric, x0, y0);
  std::vector<DenseSolution> pieces;
  bool truncated = false;
  if (length != 0.0) {
    auto r = run_geodesic(metric, x0, v0, length, options, true);
    truncated = r.truncated;
    pieces.push_back(std::move(r.solution));
  }
  return GeodesicSegment(metric.name(), metric.dimension(), std::move(pieces),
                         length < 0.0 && truncated, length > 0.0 && truncated);
}

GeodesicSegment extend_geodesic(const FinslerStructure& metric, const Vector& x0,
                                const Vector& y0, double cap, const GeodesicOptions& options) {
  metric.require_line_element(x0, y0);
  if (!(cap > 0.0)) throw UsageError("extend_geodesic: cap must be positive");
  const Vector v0 = unit_direction(metric, x0, y0);
  auto backward = run_geodesic(metric, x0, v0, -cap, options, true);
  auto forward = run_geodesic(metric, x0, v0, cap, options, true);
  const bool tb = backward.truncated;
  const bool tf = forward.truncated;
  std::vector<DenseSolution> pieces;
  pieces.push_back(std::move(backward.solution));
  pieces.push_back(std::move(forward.solution));
  return GeodesicSegment(metric.name(), metric.dimension(), std::move(pieces), tb, tf);
}

double unit_speed_drift(const FinslerStructure& metric, const GeodesicSegment& segment) {
  double worst = 0.0;
  const auto& samples = segment.samples();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    worst = std::max(worst, std::abs(metric.evaluate(samples[i].x, samples[i].velocity) - 1.0));
    if (i + 1 < samples.size()) {
      const double mid = 0.5 * (samples[i].s + samples[i + 1].s);
      worst = std::max(worst,
                       std::abs(metric.evaluate(segment.position(mid), segment.velocity(mid)) - 1.0));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

BVPResult connect(const FinslerStructure& metric, const Vector& x, const Vector& y,
                  const ConnectOptions& options) {
  metric.require_point(x);
  metric.require_point(y);
  if (x == y) throw UsageError("connect: endpoints coincide");
  const int n = metric.dimension();

  // exp_x(v) at parameter 1, or nullopt if the shot leaves the domain.
  auto shoot = [&](const Vector& v) -> std::optional<Vector> {
    try {
      const auto r = run_geodesic(metric, x, v, 1.0, options.geodesic, true);
      if (r.truncated) return std::nullopt;
      return Vector(r.y_final.head(n));
    } catch (const DomainError&) {
      return std::nullopt;
    }
  };

  const Vector chord = y - x;
  double best_miss = std::numeric_limits<double>::infinity();
  int iterations = 0;
  for (double start_scale : {1.0, 0.5, 2.0}) {
    Vector v = start_scale * chord;
    auto hit = shoot(v);
    if (!hit) continue;
    double miss = (*hit - y).norm();
    for (int it = 0; it < options.max_iterations && miss > options.tolerance; ++it) {
      ++iterations;
      Matrix jac(n, n);
      bool ok = true;
      const double delta = 1e-6 * std::max(v.norm(), 1e-3);
      for (int j = 0; j < n && ok; ++j) {
        Vector vp = v, vm = v;
        vp[j] += delta;
        vm[j] -= delta;
        const auto p = shoot(vp);
        const auto m = shoot(vm);
        if (!p || !m) ok = false;
        else jac.col(j) = (*p - *m) / (2.0 * delta);
      }
      if (!ok) break;
      const Vector step = jac.fullPivLu().solve(y - *hit);
      double lambda = 1.0;
      bool improved = false;
      for (int ls = 0; ls < 20; ++ls, lambda *= 0.5) {
        const Vector trial = v + lambda * step;
        const auto h = shoot(trial);
        if (!h) continue;
        const double m = (*h - y).norm();
        if (m < miss) {
          v = trial;
          hit = h;
          miss = m;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    best_miss = std::min(best_miss, miss);
    if (miss <= options.tolerance) {
      BVPResult result;
      result.initial_velocity = v;
      const double length = metric.evaluate(x, v);
      result.segment = integrate_geodesic(metric, x, v, length, options.geodesic);
      result.miss = (result.segment.position(result.segment.s_end()) - y).norm();
      result.iterations = iterations;
      return result;
    }
  }
  throw ConnectivityError(metric.name() + ": shooting from " + format_vector(x) + " to " +
                          format_vector(y) + " did not converge (best miss " +
                          format_number(best_miss) + ")");
}

double finsler_distance(const FinslerStructure& metric, const Vector& x, const Vector& y,
                        const ConnectOptions& options) {
  metric.require_point(x);
  metric.require_point(y);
  if (x == y) return 0.0;
  return connect(metric, x, y, options).segment.length();
}

}  // namespace finsler
