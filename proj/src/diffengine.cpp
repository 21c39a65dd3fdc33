#include "finsler/diffengine.hpp"

#include "finsler/format.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace finsler {

namespace {

struct StencilPoint {
  int offset;
  double weight;
};

/// Second-order central stencils (error expansion even in h).
std::vector<StencilPoint> central_stencil(int order) {
  switch (order) {
    case 1: return {{-1, -0.5}, {1, 0.5}};
    case 2: return {{-1, 1.0}, {0, -2.0}, {1, 1.0}};
    case 3: return {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}};
    default: throw std::invalid_argument("central_stencil: order must be 1..3");
  }
}

struct ActiveVariable {
  int index;  // 0..2n-1, x first
  int order;
  double scale;
  std::vector<StencilPoint> stencil;
};

double finite_difference_once(const TangentField& field, const Vector& x, const Vector& y,
                              const std::vector<ActiveVariable>& vars, double h) {
  const auto n = x.size();
  std::vector<std::size_t> cursor(vars.size(), 0);
  double sum = 0.0;
  while (true) {
    Vector px = x;
    Vector py = y;
    double weight = 1.0;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const auto& v = vars[k];
      const auto& p = v.stencil[cursor[k]];
      weight *= p.weight;
      const double shift = p.offset * h * v.scale;
      if (v.index < n) px[v.index] += shift;
      else py[v.index - n] += shift;
    }
    if (field.in_domain && !field.in_domain(px))
      throw DomainError("finite-difference stencil leaves the domain at " + format_vector(px));
    sum += weight * field.value(px, py);

    std::size_t k = 0;
    while (k < vars.size() && ++cursor[k] == vars[k].stencil.size()) cursor[k++] = 0;
    if (k == vars.size()) break;
  }
  for (const auto& v : vars) sum /= std::pow(h * v.scale, v.order);
  return sum;
}

bool stencil_in_domain(const TangentField& field, const Vector& x,
                       const std::vector<ActiveVariable>& vars, double h) {
  if (!field.in_domain) return true;
  const auto n = x.size();
  std::vector<ActiveVariable> x_vars;
  for (const auto& v : vars)
    if (v.index < n) x_vars.push_back(v);
  // Corners of the x-part of the stencil box.
  const std::size_t corners = std::size_t{1} << x_vars.size();
  for (std::size_t mask = 0; mask < corners; ++mask) {
    Vector p = x;
    for (std::size_t k = 0; k < x_vars.size(); ++k) {
      const int reach = x_vars[k].order == 3 ? 2 : 1;
      p[x_vars[k].index] += ((mask >> k) & 1 ? 1 : -1) * reach * h * x_vars[k].scale;
    }
    if (!field.in_domain(p)) return false;
  }
  return true;
}

/// Richardson table with halving steps; the returned estimate is the
/// diagonal entry with the smallest local error (Ridders' selection).
double finite_difference(const TangentField& field, const Vector& x, const Vector& y,
                         const std::vector<ActiveVariable>& vars, int total_order,
                         const EngineConfig& config) {
  if (vars.empty()) return field.value(x, y);
  const int levels = std::max(1, config.richardson_levels);
  double h = config.base_step > 0.0
                 ? config.base_step
                 : std::pow(std::numeric_limits<double>::epsilon(),
                            1.0 / (total_order + 2 * levels));
  int shrink = 0;
  while (!stencil_in_domain(field, x, vars, h)) {
    if (++shrink > levels)
      throw DomainError("finite-difference stencil leaves the domain near " + format_vector(x));
    h *= 0.5;
  }

  std::vector<std::vector<double>> table(levels);
  double best = 0.0;
  double best_err = std::numeric_limits<double>::infinity();
  for (int l = 0; l < levels; ++l, h *= 0.5) {
    table[l].push_back(finite_difference_once(field, x, y, vars, h));
    double factor = 1.0;
    for (int j = 1; j <= l; ++j) {
      factor *= 4.0;
      table[l].push_back(table[l][j - 1] + (table[l][j - 1] - table[l - 1][j - 1]) / (factor - 1.0));
      const double err = std::max(std::abs(table[l][j] - table[l][j - 1]),
                                  std::abs(table[l][j] - table[l - 1][j - 1]));
      if (err < best_err) {
        best_err = err;
        best = table[l][j];
      }
    }
  }
  if (levels == 1) return table[0][0];
  if (!(best_err <= config.target_accuracy * std::max(1.0, std::abs(best))))
    throw AccuracyError("Richardson extrapolation error " + format_number(best_err) +
                        " above target (estimate " + format_number(best) + ")");
  return best;
}

}  // namespace

LineElementJets seed_line_element(const Vector& x, const Vector& y, int order) {
  const int n = static_cast<int>(x.size());
  auto space = JetSpace::get(2 * n, order);
  LineElementJets jets;
  jets.x.reserve(n);
  jets.y.reserve(n);
  for (int i = 0; i < n; ++i) jets.x.push_back(Jet::variable(space, i, x[i]));
  for (int i = 0; i < n; ++i) jets.y.push_back(Jet::variable(space, n + i, y[i]));
  return jets;
}

double partial(const DerivativeRequest& req, const EngineConfig& config) {
  const auto n = req.x.size();
  if (req.y.size() != n || static_cast<Eigen::Index>(req.x_orders.size()) != n ||
      static_cast<Eigen::Index>(req.y_orders.size()) != n)
    throw DimensionError("derivative request: inconsistent dimensions");
  const int x_order = std::accumulate(req.x_orders.begin(), req.x_orders.end(), 0);
  const int y_order = std::accumulate(req.y_orders.begin(), req.y_orders.end(), 0);
  if (x_order > 2 || y_order > 3)
    throw UsageError("derivative request: x order must be <= 2 and y order <= 3");
  for (int o : req.x_orders)
    if (o < 0) throw UsageError("derivative request: negative order");
  for (int o : req.y_orders)
    if (o < 0) throw UsageError("derivative request: negative order");
  if (req.field.in_domain && !req.field.in_domain(req.x))
    throw DomainError("derivative requested outside the domain at " + format_vector(req.x));
  const int total = x_order + y_order;

  if (config.mode == DiffMode::automatic && req.field.jet) {
    auto jets = seed_line_element(req.x, req.y, total);
    const Jet f = req.field.jet(jets.x, jets.y);
    std::vector<int> alpha(req.x_orders);
    alpha.insert(alpha.end(), req.y_orders.begin(), req.y_orders.end());
    return f.derivative(alpha);
  }

  std::vector<ActiveVariable> vars;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (req.x_orders[i] > 0)
      vars.push_back({static_cast<int>(i), req.x_orders[i], std::max(1.0, std::abs(req.x[i])),
                      central_stencil(req.x_orders[i])});
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (req.y_orders[i] > 0)
      vars.push_back({static_cast<int>(n + i), req.y_orders[i],
                      std::max(1.0, std::abs(req.y[i])), central_stencil(req.y_orders[i])});
  }
  return finite_difference(req.field, req.x, req.y, vars, total, config);
}

TangentField squared_norm_field(const FinslerStructure& metric) {
  TangentField f;
  f.value = [&metric](const Vector& x, const Vector& y) {
    const double v = metric.evaluate(x, y);
    return v * v;
  };
  if (metric.supports_jets()) {
    f.jet = [&metric](std::span<const Jet> x, std::span<const Jet> y) {
      const Jet v = metric.evaluate_jet(x, y);
      return v * v;
    };
  }
  f.in_domain = [&metric](const Vector& x) { return metric.contains(x); };
  return f;
}

Matrix fundamental_tensor(const FinslerStructure& metric, const Vector& x, const Vector& y,
                          const EngineConfig& config) {
  metric.require_line_element(x, y);
  if (y.isZero(0.0)) throw DomainError(metric.name() + ": fundamental tensor needs y != 0");
  const int n = metric.dimension();

  if (auto g = metric.analytic_fundamental_tensor(x, y)) {
    return 0.5 * (*g + g->transpose());
  }

  Matrix g(n, n);
  if (config.mode == DiffMode::automatic && metric.supports_jets()) {
    auto jets = seed_line_element(x, y, 2);
    const Jet f = metric.evaluate_jet(jets.x, jets.y);
    const Jet half_f2 = 0.5 * (f * f);
    std::vector<int> alpha(2 * n, 0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        alpha.assign(2 * n, 0);
        alpha[n + i] += 1;
        alpha[n + j] += 1;
        g(i, j) = half_f2.derivative(alpha);
      }
    }
    return g;
  }

  // Black-box path: differentiate a finite-difference gradient once more so
  // that the two mixed orders are independent estimates.
  const TangentField f2 = squared_norm_field(metric);
  EngineConfig inner = config;
  inner.mode = DiffMode::finite_difference;
  for (int j = 0; j < n; ++j) {
    TangentField gradient_j;
    gradient_j.in_domain = f2.in_domain;
    gradient_j.value = [&, j](const Vector& px, const Vector& py) {
      DerivativeRequest r{f2, std::vector<int>(n, 0), std::vector<int>(n, 0), px, py};
      r.y_orders[j] = 1;
      return 0.5 * partial(r, inner);
    };
    for (int i = 0; i < n; ++i) {
      DerivativeRequest r{gradient_j, std::vector<int>(n, 0), std::vector<int>(n, 0), x, y};
      r.y_orders[i] = 1;
      g(i, j) = partial(r, inner);
    }
  }
  const double asymmetry = (g - g.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if (asymmetry > 1e-6 * scale)
    throw AccuracyError(metric.name() + ": numeric Hessian asymmetric by " +
                        format_number(asymmetry) + " at " + format_vector(x));
  return 0.5 * (g + g.transpose());
}

}  // namespace finsler
