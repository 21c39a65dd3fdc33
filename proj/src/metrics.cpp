#include "finsler/metrics.hpp"

#include "finsler/format.hpp"

#include <cmath>
#include <limits>

namespace finsler {

namespace {

/// Hessian of (1/2)(sqrt(y^T a y) + b.y)^2 in y.
Matrix randers_type_tensor(const Matrix& a, const Vector& b, const Vector& y) {
  const Vector ay = a * y;
  const double alpha = std::sqrt(y.dot(ay));
  const double f = alpha + b.dot(y);
  const Vector l = ay / alpha;
  return (f / alpha) * (a - l * l.transpose()) + (l + b) * (l + b).transpose();
}

void require_square(const Matrix& m, int n, const char* what) {
  if (m.rows() != n || m.cols() != n)
    throw ConstructionError(std::string(what) + " must be " + std::to_string(n) + "x" +
                            std::to_string(n));
}

}  // namespace

EuclideanMetric::EuclideanMetric(int n) : ExpressionMetric(n) {}

std::optional<Matrix> EuclideanMetric::analytic_fundamental_tensor(const Vector& x,
                                                                   const Vector& y) const {
  require_line_element(x, y);
  return Matrix::Identity(dimension(), dimension());
}

KleinMetric::KleinMetric(int n) : ExpressionMetric(n) {
  if (n < 2) throw ConstructionError("klein: dimension must be at least 2");
}

std::optional<Matrix> KleinMetric::analytic_fundamental_tensor(const Vector& x,
                                                               const Vector& y) const {
  require_line_element(x, y);
  const double phi = 1.0 - x.squaredNorm();
  return Matrix(Matrix::Identity(dimension(), dimension()) / phi +
                x * x.transpose() / (phi * phi));
}

std::shared_ptr<KleinMetric> klein_metric(int n) { return std::make_shared<KleinMetric>(n); }

// ---------------------------------------------------------------------------

RiemannianMetric::RiemannianMetric(RiemannianSpec spec)
    : FinslerStructure(spec.dimension), spec_(std::move(spec)) {
  if (!spec_.tensor) throw ConstructionError("riemannian: tensor provider missing");
}

double RiemannianMetric::domain_function(const Vector& x) const {
  return spec_.domain ? spec_.domain(x) : std::numeric_limits<double>::infinity();
}

std::optional<Matrix> RiemannianMetric::analytic_fundamental_tensor(const Vector& x,
                                                                    const Vector& y) const {
  require_line_element(x, y);
  const Matrix g = spec_.tensor(x);
  return Matrix(0.5 * (g + g.transpose()));
}

Vector RiemannianMetric::analytic_spray(const Vector& x, const Vector& y) const {
  if (!spec_.christoffel) return FinslerStructure::analytic_spray(x, y);
  require_line_element(x, y);
  const auto gamma = spec_.christoffel(x);
  Vector out(dimension());
  for (int i = 0; i < dimension(); ++i) out[i] = y.dot(gamma[i] * y);
  return out;
}

double RiemannianMetric::evaluate_unchecked(const Vector& x, const Vector& y) const {
  const double q = y.dot(spec_.tensor(x) * y);
  if (!(q > 0.0))
    throw ConvexityError(name() + ": g(x) not positive-definite at " + format_vector(x));
  return std::sqrt(q);
}

// ---------------------------------------------------------------------------

RandersMetric::RandersMetric(RandersSpec spec) : RandersMetric(std::move(spec), true) {}

std::shared_ptr<RandersMetric> RandersMetric::unchecked(RandersSpec spec) {
  return std::shared_ptr<RandersMetric>(new RandersMetric(std::move(spec), false));
}

RandersMetric::RandersMetric(RandersSpec spec, bool checked)
    : ExpressionMetric(static_cast<int>(spec.a.rows())), spec_(std::move(spec)), checked_(checked) {
  const int n = dimension();
  require_square(spec_.a, n, "randers: a");
  if (spec_.b0.size() != n) throw ConstructionError("randers: b has the wrong length");
  if (spec_.b_linear.size() > 0) require_square(spec_.b_linear, n, "randers: b_linear");
  if (!spec_.a.isApprox(spec_.a.transpose(), 1e-14))
    throw ConstructionError("randers: a must be symmetric");
  Eigen::LLT<Matrix> llt(spec_.a);
  if (llt.info() != Eigen::Success) throw ConstructionError("randers: a must be positive-definite");
  a_inverse_ = llt.solve(Matrix::Identity(n, n));
  if (!checked_) return;

  const Vector origin = Vector::Zero(n);
  const double norm = one_form_norm(origin);
  if (!(norm < 1.0))
    throw ConstructionError("randers: |b|_a = " + format_number(norm) + " must be < 1");
  std::vector<LineElement> samples;
  for (double r : {0.0, 0.25, 0.5}) {
    for (int dir = 0; dir < 2 * n; ++dir) {
      Vector x = Vector::Zero(n);
      x[dir % n] = dir < n ? r : -r;
      if (!contains(x)) continue;
      for (int j = 0; j < n; ++j) {
        Vector y = Vector::Zero(n);
        y[j] = 1.0;
        samples.push_back({x, y});
        samples.push_back({x, -y});
      }
    }
  }
  if (!validate_strong_convexity(*this, samples).pass())
    throw ConstructionError("randers: fundamental tensor not positive-definite on the sample grid");
}

Vector RandersMetric::one_form(const Vector& x) const {
  Vector b = spec_.b0;
  if (spec_.b_linear.size() > 0) b += spec_.b_linear * x;
  return b;
}

double RandersMetric::one_form_norm(const Vector& x) const {
  const Vector b = one_form(x);
  return std::sqrt(b.dot(a_inverse_ * b));
}

double RandersMetric::domain_function(const Vector& x) const {
  if (!checked_) return std::numeric_limits<double>::infinity();
  const double norm = one_form_norm(x);
  return 1.0 - norm * norm;
}

std::optional<Matrix> RandersMetric::analytic_fundamental_tensor(const Vector& x,
                                                                 const Vector& y) const {
  require_line_element(x, y);
  return randers_type_tensor(spec_.a, one_form(x), y);
}

std::shared_ptr<RandersMetric> randers_metric(const RandersSpec& spec) {
  return std::make_shared<RandersMetric>(spec);
}

// ---------------------------------------------------------------------------

QuadraticDomainSpec QuadraticDomainSpec::unit_ball(int n, double k) {
  return {-Matrix::Identity(n, n), Vector::Zero(n), 1.0, k};
}

QuadraticFunkMetric::QuadraticFunkMetric(QuadraticDomainSpec spec)
    : ExpressionMetric(static_cast<int>(spec.alpha.rows())), spec_(std::move(spec)) {
  const int n = dimension();
  require_square(spec_.alpha, n, "funk: alpha");
  if (spec_.beta.size() != n) throw ConstructionError("funk: beta has the wrong length");
  if (!spec_.alpha.isApprox(spec_.alpha.transpose(), 1e-14))
    throw ConstructionError("funk: alpha must be symmetric");
  if (!(spec_.gamma > 0.0)) throw ConstructionError("funk: gamma must be positive");
  if (!(spec_.k > 0.0)) throw ConstructionError("funk: k must be positive");
  Eigen::LLT<Matrix> llt(-spec_.alpha);
  strictly_convex_ = llt.info() == Eigen::Success;
}

double QuadraticFunkMetric::domain_function(const Vector& x) const {
  if (x.size() != dimension()) return -1.0;
  return x.dot(spec_.alpha * x) + 2.0 * spec_.beta.dot(x) + spec_.gamma;
}

Matrix QuadraticFunkMetric::a_coefficients(const Vector& x) const {
  require_point(x);
  const double phi = domain_function(x);
  const Vector v = spec_.alpha * x + spec_.beta;
  return (v * v.transpose() - spec_.alpha * phi) / (phi * phi);
}

Vector QuadraticFunkMetric::b_coefficients(const Vector& x) const {
  require_point(x);
  return -(spec_.alpha * x + spec_.beta) / domain_function(x);
}

std::optional<Matrix> QuadraticFunkMetric::analytic_fundamental_tensor(const Vector& x,
                                                                       const Vector& y) const {
  require_line_element(x, y);
  const Matrix a = a_coefficients(x);
  if (y.dot(a * y) <= 0.0)
    throw ConvexityError("funk: a_ij y^i y^j <= 0 at " + format_vector(x));
  return Matrix(randers_type_tensor(a, b_coefficients(x), y) / (spec_.k * spec_.k));
}

QuadraticFunkMetric funk_from_quadratic(const QuadraticDomainSpec& spec) {
  return QuadraticFunkMetric(spec);
}

// ---------------------------------------------------------------------------

IntervalFunkMetric::IntervalFunkMetric(double k) : ExpressionMetric(1), k_(k) {
  if (!(k > 0.0)) throw ConstructionError("interval-funk: k must be positive");
}

std::optional<Matrix> IntervalFunkMetric::analytic_fundamental_tensor(const Vector& x,
                                                                      const Vector& y) const {
  require_line_element(x, y);
  const double side = y[0] > 0.0 ? 1.0 - x[0] : 1.0 + x[0];
  return Matrix::Constant(1, 1, 1.0 / (k_ * k_ * side * side));
}

double interval_funk_eval(double u, double y, double k) {
  if (!(std::abs(u) < 1.0))
    throw DomainError("interval-funk: u = " + format_number(u) + " outside (-1, 1)");
  if (!(k > 0.0)) throw ConstructionError("interval-funk: k must be positive");
  return (std::abs(y) + u * y) / (k * (1.0 - u * u));
}

// ---------------------------------------------------------------------------

CallableMetric::CallableMetric(int n, std::string name,
                               std::function<double(const Vector&, const Vector&)> f,
                               std::function<double(const Vector&)> domain)
    : FinslerStructure(n), name_(std::move(name)), f_(std::move(f)), domain_(std::move(domain)) {
  if (!f_) throw ConstructionError("callable metric: function missing");
}

double CallableMetric::domain_function(const Vector& x) const {
  return domain_ ? domain_(x) : std::numeric_limits<double>::infinity();
}

double CallableMetric::evaluate_unchecked(const Vector& x, const Vector& y) const {
  return f_(x, y);
}

}  // namespace finsler
