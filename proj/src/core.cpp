#include "finsler/core.hpp"

#include "finsler/diffengine.hpp"
#include "finsler/format.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace finsler {

FinslerStructure::FinslerStructure(int dimension) : dimension_(dimension) {
  if (dimension < 1) throw ConstructionError("dimension must be positive");
}

double FinslerStructure::domain_function(const Vector&) const {
  return std::numeric_limits<double>::infinity();
}

bool FinslerStructure::contains(const Vector& x) const {
  if (x.size() != dimension_ || !x.allFinite()) return false;
  return domain_function(x) > 0.0;
}

void FinslerStructure::require_point(const Vector& x) const {
  if (x.size() != dimension_)
    throw DimensionError(name() + ": point has dimension " + std::to_string(x.size()) +
                         ", metric has dimension " + std::to_string(dimension_));
  if (!x.allFinite()) throw DomainError(name() + ": non-finite point " + format_vector(x));
  const double phi = domain_function(x);
  if (!(phi > 0.0))
    throw DomainError(name() + ": point " + format_vector(x) + " outside the domain (phi = " +
                      format_number(phi) + ")");
}

void FinslerStructure::require_line_element(const Vector& x, const Vector& y) const {
  require_point(x);
  if (y.size() != dimension_)
    throw DimensionError(name() + ": tangent vector has dimension " + std::to_string(y.size()) +
                         ", metric has dimension " + std::to_string(dimension_));
  if (!y.allFinite()) throw DomainError(name() + ": non-finite tangent vector " + format_vector(y));
}

double FinslerStructure::evaluate(const Vector& x, const Vector& y) const {
  require_line_element(x, y);
  if (y.isZero(0.0)) return 0.0;
  return evaluate_unchecked(x, y);
}

Jet FinslerStructure::evaluate_jet(std::span<const Jet>, std::span<const Jet>) const {
  throw std::logic_error(name() + ": no jet evaluation available");
}

std::optional<Matrix> FinslerStructure::analytic_fundamental_tensor(const Vector&,
                                                                    const Vector&) const {
  return std::nullopt;
}

std::vector<Jet> FinslerStructure::analytic_spray_jet(std::span<const Jet>,
                                                      std::span<const Jet>) const {
  throw std::logic_error(name() + ": no analytic spray");
}

Vector FinslerStructure::analytic_spray(const Vector&, const Vector&) const {
  throw std::logic_error(name() + ": no analytic spray");
}

void FinslerStructure::require_jet_base(std::span<const Jet> x, std::span<const Jet> y) const {
  Vector xv(x.size());
  Vector yv(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) xv[i] = x[i].value();
  for (std::size_t i = 0; i < y.size(); ++i) yv[i] = y[i].value();
  require_line_element(xv, yv);
}

// ---------------------------------------------------------------------------

bool ValidationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

void ValidationReport::add(std::string name, double max_residual, double tolerance) {
  checks.push_back({std::move(name), max_residual, tolerance, max_residual <= tolerance});
}

ValidationReport validate_homogeneity(const FinslerStructure& metric,
                                      std::span<const HomogeneitySample> samples,
                                      double tolerance) {
  double worst = 0.0;
  for (const auto& s : samples) {
    if (!(s.lambda > 0.0)) throw UsageError("homogeneity sample needs lambda > 0");
    const double f = metric.evaluate(s.x, s.y);
    const double scaled = metric.evaluate(s.x, s.lambda * s.y);
    const double residual = f != 0.0 ? std::abs(scaled - s.lambda * f) / std::abs(f)
                                     : std::numeric_limits<double>::infinity();
    worst = std::max(worst, residual);
  }
  ValidationReport report;
  report.add("homogeneity", worst, tolerance);
  return report;
}

ValidationReport validate_strong_convexity(const FinslerStructure& metric,
                                           std::span<const LineElement> samples,
                                           double min_eigenvalue) {
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    const Matrix g = fundamental_tensor(metric, s.x, s.y);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(g, Eigen::EigenvaluesOnly);
    smallest = std::min(smallest, eig.eigenvalues().minCoeff());
  }
  // Residual -lambda_min against -threshold keeps "pass <=> residual <= tolerance".
  ValidationReport report;
  report.add("strong_convexity", -smallest, -min_eigenvalue);
  return report;
}

// ---------------------------------------------------------------------------

Curve Curve::segment(const Vector& from, const Vector& to) {
  Curve c;
  c.position = [from, to](double t) -> Vector { return from + t * (to - from); };
  c.velocity = [from, to](double) -> Vector { return to - from; };
  return c;
}

Curve Curve::polyline(std::vector<double> t, std::vector<Vector> points) {
  if (t.size() != points.size() || t.size() < 2)
    throw UsageError("polyline needs at least two samples with matching parameters");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw UsageError("polyline parameters must increase strictly");
  auto piece = [t](double s) {
    auto it = std::upper_bound(t.begin(), t.end(), s);
    std::size_t i = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
    return std::min(i, t.size() - 2);
  };
  Curve c;
  c.position = [t, points, piece](double s) -> Vector {
    const auto i = piece(s);
    const double w = (s - t[i]) / (t[i + 1] - t[i]);
    return (1.0 - w) * points[i] + w * points[i + 1];
  };
  c.velocity = [t, points, piece](double s) -> Vector {
    const auto i = piece(s);
    return (points[i + 1] - points[i]) / (t[i + 1] - t[i]);
  };
  c.breakpoints.assign(t.begin() + 1, t.end() - 1);
  return c;
}

double arc_length(const FinslerStructure& metric, const Curve& curve, double t0, double t1,
                  double tolerance) {
  if (t1 < t0) throw UsageError("arc_length needs t0 <= t1");
  std::vector<double> cuts{t0};
  for (double b : curve.breakpoints)
    if (b > t0 && b < t1) cuts.push_back(b);
  cuts.push_back(t1);

  auto integrand = [&](double t) { return metric.evaluate(curve.position(t), curve.velocity(t)); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double error = 0.0;
    const double piece = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, cuts[i], cuts[i + 1], 20, tolerance, &error);
    if (!(error <= std::max(1e3 * tolerance * std::abs(piece), 1e-9)))
      throw AccuracyError("arc_length quadrature did not converge: estimate " +
                          format_number(piece) + " with error " + format_number(error));
    total += piece;
  }
  return total;
}

std::vector<LineElement> sample_line_elements(const FinslerStructure& metric, std::size_t count,
                                              double radius, unsigned long long seed) {
  const int n = metric.dimension();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  auto unit = [&] {
    Vector v(n);
    do {
      for (int i = 0; i < n; ++i) v[i] = normal(rng);
    } while (v.norm() < 1e-8);
    return Vector(v / v.norm());
  };
  std::vector<LineElement> out;
  out.reserve(count);
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 1000 * count + 1000)
      throw DomainError(metric.name() + ": could not sample points inside the domain");
    Vector x = unit() * radius * std::pow(uniform(rng), 1.0 / n);
    if (!metric.contains(x)) continue;
    out.push_back({x, unit()});
  }
  return out;
}

}  // namespace finsler
