#include "finsler/curvature.hpp"

#include "finsler/format.hpp"
#include "finsler/geodesics.hpp"
#include "finsler/parallel.hpp"

#include <cmath>

namespace finsler {

namespace {

std::vector<int> multi_index(int size, std::initializer_list<int> vars) {
  std::vector<int> e(size, 0);
  for (int v : vars) e[v] += 1;
  return e;
}

/// G and the derivatives of G entering the curvature formulas, at one line element.
struct SprayDerivatives {
  Vector G;
  Matrix Gx;                // (i, k) = dG^i/dx^k
  Matrix Gy;                // (i, j) = dG^i/dy^j
  std::vector<Matrix> Gxy;  // [i](j, k) = d2G^i/dx^j dy^k
  std::vector<Matrix> Gyy;  // [i](j, k) = d2G^i/dy^j dy^k
};

SprayDerivatives spray_derivatives(const FinslerStructure& metric, const Vector& x,
                                   const Vector& y, const EngineConfig& config) {
  const int n = metric.dimension();
  SprayDerivatives d;
  d.G.resize(n);
  d.Gx.resize(n, n);
  d.Gy.resize(n, n);
  d.Gxy.assign(n, Matrix(n, n));
  d.Gyy.assign(n, Matrix(n, n));
  if (supports_spray_jets(metric) && config.mode == DiffMode::automatic) {
    const auto g = spray_jet(metric, x, y, 2);
    for (int i = 0; i < n; ++i) {
      d.G[i] = g[i].value();
      for (int j = 0; j < n; ++j) {
        d.Gx(i, j) = g[i].derivative(multi_index(2 * n, {j}));
        d.Gy(i, j) = g[i].derivative(multi_index(2 * n, {n + j}));
        for (int k = 0; k < n; ++k) {
          d.Gxy[i](j, k) = g[i].derivative(multi_index(2 * n, {j, n + k}));
          d.Gyy[i](j, k) = g[i].derivative(multi_index(2 * n, {n + j, n + k}));
        }
      }
    }
    return d;
  }
  EngineConfig fd = config;
  fd.mode = DiffMode::finite_difference;
  d.G = spray_value(metric, x, y, config);
  const std::vector<int> none(n, 0);
  for (int i = 0; i < n; ++i) {
    TangentField component;
    component.value = [&metric, &config, i](const Vector& px, const Vector& py) {
      return spray_value(metric, px, py, config)[i];
    };
    component.in_domain = [&metric](const Vector& px) { return metric.contains(px); };
    auto at = [&](std::vector<int> xo, std::vector<int> yo) {
      return partial(DerivativeRequest{component, std::move(xo), std::move(yo), x, y}, fd);
    };
    for (int j = 0; j < n; ++j) {
      d.Gx(i, j) = at(multi_index(n, {j}), none);
      d.Gy(i, j) = at(none, multi_index(n, {j}));
      for (int k = 0; k < n; ++k) {
        d.Gxy[i](j, k) = at(multi_index(n, {j}), multi_index(n, {k}));
        d.Gyy[i](j, k) = k < j ? d.Gyy[i](k, j) : at(none, multi_index(n, {j, k}));
      }
    }
  }
  return d;
}

double two_f2_ric(const SprayDerivatives& d, const Vector& y) {
  const auto n = y.size();
  double out = 2.0 * d.Gx.trace();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out -= 0.5 * d.Gy(i, j) * d.Gy(j, i);
      out -= y[j] * d.Gxy[i](j, i);
      out += d.G[j] * d.Gyy[i](i, j);
    }
  }
  return out;
}

/// 2F^2 Ric as a jet; exact to order (order of G) - 2.
Jet two_f2_ric_jet(const std::vector<Jet>& G, const std::vector<Jet>& y) {
  const int n = static_cast<int>(G.size());
  std::vector<Jet> gy(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gy[i * n + j] = G[i].diff(n + j);
  Jet out = 2.0 * G[0].diff(0);
  for (int i = 1; i < n; ++i) out += 2.0 * G[i].diff(i);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out -= 0.5 * gy[i * n + j] * gy[j * n + i];
      out -= y[j] * gy[i * n + i].diff(j);
      out += G[j] * gy[i * n + i].diff(n + j);
    }
  }
  return out;
}

/// y as jets in the space of the spray jets (constant sprays get a fresh space).
std::vector<Jet> direction_jets(const std::vector<Jet>& G, const Vector& x, const Vector& y,
                                int order) {
  for (const auto& g : G) {
    if (g.is_constant()) continue;
    std::vector<Jet> out;
    for (int i = 0; i < y.size(); ++i)
      out.push_back(Jet::variable(g.space(), static_cast<int>(y.size()) + i, y[i]));
    return out;
  }
  return seed_line_element(x, y, order).y;
}

}  // namespace

double ricci_quadratic(const FinslerStructure& metric, const Vector& x, const Vector& y,
                       const EngineConfig& config) {
  metric.require_line_element(x, y);
  if (y.isZero(0.0)) throw DomainError(metric.name() + ": Ricci curvature needs y != 0");
  return 0.5 * two_f2_ric(spray_derivatives(metric, x, y, config), y);
}

double ricci_scalar(const FinslerStructure& metric, const Vector& x, const Vector& y,
                    const EngineConfig& config) {
  const double f = metric.evaluate(x, y);
  return ricci_quadratic(metric, x, y, config) / (f * f);
}

Matrix riemann_curvature(const FinslerStructure& metric, const Vector& x, const Vector& y,
                         const EngineConfig& config) {
  metric.require_line_element(x, y);
  const auto d = spray_derivatives(metric, x, y, config);
  const auto n = y.size();
  Matrix r(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      double v = d.Gx(i, k);
      for (Eigen::Index j = 0; j < n; ++j) {
        v -= 0.5 * y[j] * d.Gxy[i](j, k);
        v += 0.5 * d.G[j] * d.Gyy[i](j, k);
        v -= 0.25 * d.Gy(i, j) * d.Gy(j, k);
      }
      r(i, k) = v;
    }
  }
  return r;
}

CurvatureData ricci_tensor(const FinslerStructure& metric, const Vector& x, const Vector& y,
                           const EngineConfig& config, bool with_riemann,
                           double contraction_tolerance) {
  metric.require_line_element(x, y);
  if (y.isZero(0.0)) throw DomainError(metric.name() + ": Ricci curvature needs y != 0");
  const int n = metric.dimension();
  const double f = metric.evaluate(x, y);
  CurvatureData data;
  data.ell = y / f;
  data.ric_tensor.resize(n, n);
  if (supports_spray_jets(metric) && config.mode == DiffMode::automatic) {
    const auto G = spray_jet(metric, x, y, 4);
    const Jet two = two_f2_ric_jet(G, direction_jets(G, x, y, 4));
    data.ric = 0.5 * two.value() / (f * f);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        data.ric_tensor(i, k) = 0.25 * two.derivative(multi_index(2 * n, {n + i, n + k}));
  } else {
    data.ric = ricci_quadratic(metric, x, y, config) / (f * f);
    TangentField f2_ric;
    f2_ric.value = [&metric, &config](const Vector& px, const Vector& py) {
      return ricci_quadratic(metric, px, py, config);
    };
    f2_ric.in_domain = [&metric](const Vector& px) { return metric.contains(px); };
    EngineConfig outer = config;
    outer.mode = DiffMode::finite_difference;
    outer.target_accuracy = std::max(config.target_accuracy, 1e-4);
    for (int i = 0; i < n; ++i)
      for (int k = i; k < n; ++k) {
        DerivativeRequest r{f2_ric, std::vector<int>(n, 0), multi_index(n, {i, k}), x, y};
        data.ric_tensor(i, k) = data.ric_tensor(k, i) = 0.5 * partial(r, outer);
      }
  }
  data.ric_tensor = 0.5 * (data.ric_tensor + data.ric_tensor.transpose()).eval();
  if (with_riemann) data.riemann = riemann_curvature(metric, x, y, config);
  data.contraction_residual = std::abs(data.ell.dot(data.ric_tensor * data.ell) - data.ric);
  if (data.contraction_residual > contraction_tolerance)
    throw AccuracyError(metric.name() + ": contraction Ric_ij l^i l^j = Ric violated by " +
                        format_number(data.contraction_residual) + " at " + format_vector(x));
  return data;
}

RicciBoundReport check_ricci_bound(const FinslerStructure& metric,
                                   const std::vector<LineElement>& samples, double c,
                                   double tolerance, const EngineConfig& config) {
  if (!(c > 0.0)) throw UsageError("check_ricci_bound: c must be positive");
  RicciBoundReport report;
  report.c = c;
  report.tolerance = tolerance;
  report.worst = -std::numeric_limits<double>::infinity();
  const auto tops = parallel_map(samples.size(), [&](std::size_t i) {
    const auto& s = samples[i];
    const auto data = ricci_tensor(metric, s.x, s.y, config);
    const Matrix g = fundamental_tensor(metric, s.x, s.y, config);
    const Matrix m = data.ric_tensor + c * c * g;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
  });
  for (std::size_t i = 0; i < samples.size(); ++i) {
    report.samples.push_back({samples[i], tops[i]});
    report.worst = std::max(report.worst, tops[i]);
  }
  report.pass = !samples.empty() && report.worst <= tolerance;
  return report;
}

ProjectiveFactor projective_factor(const FinslerStructure& metric, const FinslerStructure& other,
                                   const Vector& x, const Vector& y, double tolerance,
                                   const EngineConfig& config) {
  if (metric.dimension() != other.dimension())
    throw DimensionError("projective_factor: metrics of different dimension");
  const Vector g = spray_value(metric, x, y, config);
  const Vector gbar = spray_value(other, x, y, config);
  const Vector diff = gbar - g;
  ProjectiveFactor out;
  out.P = diff.dot(y) / y.squaredNorm();
  out.residual = (diff - out.P * y).norm() / std::max({1.0, g.norm(), gbar.norm()});
  if (out.residual > tolerance)
    throw NotProjectiveError(metric.name() + " and " + other.name() +
                             " are not projectively related at " + format_vector(x) +
                             " (residual " + format_number(out.residual) + ")");
  return out;
}

RicTransformation verify_ric_transformation(const FinslerStructure& metric,
                                            const FinslerStructure& other, const Vector& x,
                                            const Vector& y, const EngineConfig& config) {
  const int n = metric.dimension();
  const auto factor = projective_factor(metric, other, x, y, 1e-6, config);
  Vector px(n), py(n);
  const Vector g = spray_value(metric, x, y, config);
  if (supports_spray_jets(metric) && supports_spray_jets(other) &&
      config.mode == DiffMode::automatic) {
    const auto G = spray_jet(metric, x, y, 1);
    const auto Gbar = spray_jet(other, x, y, 1);
    // P = (d.y)/|y|^2 with d = Gbar - G, differentiated by the quotient rule.
    const double yy = y.squaredNorm();
    Vector d(n);
    Matrix dx(n, n), dy(n, n);  // (i, k) = d d^i / dx^k, d d^i / dy^k
    for (int i = 0; i < n; ++i) {
      d[i] = Gbar[i].value() - G[i].value();
      for (int k = 0; k < n; ++k) {
        dx(i, k) = Gbar[i].derivative(multi_index(2 * n, {k})) -
                   G[i].derivative(multi_index(2 * n, {k}));
        dy(i, k) = Gbar[i].derivative(multi_index(2 * n, {n + k})) -
                   G[i].derivative(multi_index(2 * n, {n + k}));
      }
    }
    px = dx.transpose() * y / yy;
    py = (dy.transpose() * y + d) / yy - 2.0 * d.dot(y) * y / (yy * yy);
  } else {
    TangentField p;
    p.value = [&](const Vector& ax, const Vector& ay) {
      return (spray_value(other, ax, ay, config) - spray_value(metric, ax, ay, config)).dot(ay) /
             ay.squaredNorm();
    };
    p.in_domain = [&](const Vector& ax) { return metric.contains(ax) && other.contains(ax); };
    EngineConfig fd = config;
    fd.mode = DiffMode::finite_difference;
    for (int i = 0; i < n; ++i) {
      px[i] = partial({p, multi_index(n, {i}), std::vector<int>(n, 0), x, y}, fd);
      py[i] = partial({p, std::vector<int>(n, 0), multi_index(n, {i}), x, y}, fd);
    }
  }
  RicTransformation out;
  out.P = factor.P;
  out.lhs = ricci_quadratic(other, x, y, config) - ricci_quadratic(metric, x, y, config);
  const double half = 0.5 * (n - 1);
  const double transport = px.dot(y) - py.dot(g);
  out.printed_rhs = half * (transport + 0.5 * factor.P * factor.P);
  out.consistent_rhs = -half * (transport - 0.5 * factor.P * factor.P);
  out.residual_printed = std::abs(out.lhs - out.printed_rhs);
  out.residual_consistent = std::abs(out.lhs - out.consistent_rhs);
  return out;
}

}  // namespace finsler
