#pragma once

#include "finsler/core.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace finsler {

/// |y| on R^n.
class EuclideanMetric final : public ExpressionMetric<EuclideanMetric> {
 public:
  explicit EuclideanMetric(int n);
  std::string name() const override { return "euclidean"; }

  std::optional<Matrix> analytic_fundamental_tensor(const Vector& x,
                                                    const Vector& y) const override;

  template <class T>
  T norm_expression(std::span<const T>, std::span<const T> y) const {
    T s = y[0] * y[0];
    for (std::size_t i = 1; i < y.size(); ++i) s += y[i] * y[i];
    using std::sqrt;
    return sqrt(s);
  }
  template <class T>
  void spray_expression(std::span<const T>, std::span<const T>, std::span<T> out) const {
    for (auto& g : out) g = T(0.0);
  }
};

/// Hyperbolic metric of the Klein model on the open unit ball:
/// F^2 = |y|^2/(1-|x|^2) + <x,y>^2/(1-|x|^2)^2.
class KleinMetric final : public ExpressionMetric<KleinMetric> {
 public:
  explicit KleinMetric(int n);
  std::string name() const override { return "klein"; }
  double domain_function(const Vector& x) const override { return 1.0 - x.squaredNorm(); }

  std::optional<Matrix> analytic_fundamental_tensor(const Vector& x,
                                                    const Vector& y) const override;

  template <class T>
  T norm_expression(std::span<const T> x, std::span<const T> y) const {
    T xx = x[0] * x[0], yy = y[0] * y[0], xy = x[0] * y[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
      xx += x[i] * x[i];
      yy += y[i] * y[i];
      xy += x[i] * y[i];
    }
    const T phi = 1.0 - xx;
    using std::sqrt;
    return sqrt(yy / phi + xy * xy / (phi * phi));
  }
  template <class T>
  void spray_expression(std::span<const T> x, std::span<const T> y, std::span<T> out) const {
    T xx = x[0] * x[0], xy = x[0] * y[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
      xx += x[i] * x[i];
      xy += x[i] * y[i];
    }
    const T factor = 2.0 * xy / (1.0 - xx);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = factor * y[i];
  }
};

/// Riemannian metric from a tensor provider g(x); optional Christoffel
/// symbols Gamma[i](j, k) give an analytic spray.
struct RiemannianSpec {
  int dimension = 2;
  std::function<Matrix(const Vector&)> tensor;
  std::function<std::vector<Matrix>(const Vector&)> christoffel;
  std::function<double(const Vector&)> domain;
  std::string name = "riemannian";
};

class RiemannianMetric final : public FinslerStructure {
 public:
  explicit RiemannianMetric(RiemannianSpec spec);
  std::string name() const override { return spec_.name; }
  double domain_function(const Vector& x) const override;
  std::optional<Matrix> analytic_fundamental_tensor(const Vector& x,
                                                    const Vector& y) const override;
  bool has_analytic_spray() const override { return static_cast<bool>(spec_.christoffel); }
  Vector analytic_spray(const Vector& x, const Vector& y) const override;

 protected:
  double evaluate_unchecked(const Vector& x, const Vector& y) const override;

 private:
  RiemannianSpec spec_;
};

/// Randers metric F = sqrt(y^T A y) + b(x).y with constant positive-definite A
/// and affine one-form b(x) = b0 + B x. The domain is {x : |b(x)|_A < 1}.
struct RandersSpec {
  Matrix a;
  Vector b0;
  Matrix b_linear;  ///< B; empty means constant b
};

class RandersMetric final : public ExpressionMetric<RandersMetric> {
 public:
  /// Throws ConstructionError unless A is symmetric positive-definite and
  /// |b(0)|_A < 1; strong convexity is validated on a sample grid.
  explicit RandersMetric(RandersSpec spec);
  /// No norm bound and no domain restriction: for exhibiting convexity failure.
  static std::shared_ptr<RandersMetric> unchecked(RandersSpec spec);

  std::string name() const override { return "randers"; }
  double domain_function(const Vector& x) const override;
  std::optional<Matrix> analytic_fundamental_tensor(const Vector& x,
                                                    const Vector& y) const override;

  Vector one_form(const Vector& x) const;
  /// |b(x)|_A = sqrt(b^T A^{-1} b).
  double one_form_norm(const Vector& x) const;
  const RandersSpec& spec() const { return spec_; }

  template <class T>
  T norm_expression(std::span<const T> x, std::span<const T> y) const {
    const auto n = y.size();
    T q = T(0.0);
    T beta = T(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      T row = spec_.a(i, 0) * y[0];
      for (std::size_t j = 1; j < n; ++j) row += spec_.a(i, j) * y[j];
      q += row * y[i];
      T bi = T(spec_.b0[i]);
      if (spec_.b_linear.size() > 0)
        for (std::size_t j = 0; j < n; ++j) bi += spec_.b_linear(i, j) * x[j];
      beta += bi * y[i];
    }
    using std::sqrt;
    return sqrt(q) + beta;
  }

 private:
  RandersMetric(RandersSpec spec, bool checked);
  RandersSpec spec_;
  Matrix a_inverse_;
  bool checked_;
};

/// phi(x) = x^T alpha x + 2 beta.x + gamma with Funk constant k.
struct QuadraticDomainSpec {
  Matrix alpha;
  Vector beta;
  double gamma = 1.0;
  double k = 1.0;

  /// alpha = -I, beta = 0, gamma = 1.
  static QuadraticDomainSpec unit_ball(int n, double k = 1.0);
};

/// Funk metric of a quadratic domain,
/// L(x, y) = (sqrt(a_ij y^i y^j) + b_i y^i) / k with
/// a_ij = (v_i v_j - alpha_ij phi) / phi^2, b = -v / phi, v = alpha x + beta.
/// Its spray is G = k L y.
class QuadraticFunkMetric final : public ExpressionMetric<QuadraticFunkMetric> {
 public:
  explicit QuadraticFunkMetric(QuadraticDomainSpec spec);
  std::string name() const override { return "funk"; }
  double domain_function(const Vector& x) const override;
  double domain_scale() const override { return spec_.gamma; }
  std::optional<Matrix> analytic_fundamental_tensor(const Vector& x,
                                                    const Vector& y) const override;

  const QuadraticDomainSpec& spec() const { return spec_; }
  Matrix a_coefficients(const Vector& x) const;
  Vector b_coefficients(const Vector& x) const;
  /// True when -alpha is positive-definite (bounded, strictly convex domain).
  bool strictly_convex() const { return strictly_convex_; }

  template <class T>
  T norm_expression(std::span<const T> x, std::span<const T> y) const {
    const auto n = x.size();
    std::vector<T> v(n);
    T phi = T(spec_.gamma);
    for (std::size_t i = 0; i < n; ++i) {
      T vi = T(spec_.beta[i]);
      for (std::size_t j = 0; j < n; ++j) vi += spec_.alpha(i, j) * x[j];
      v[i] = vi;
      phi += (vi + spec_.beta[i]) * x[i];
    }
    T vy = v[0] * y[0];
    T ay = T(0.0);
    for (std::size_t i = 1; i < n; ++i) vy += v[i] * y[i];
    for (std::size_t i = 0; i < n; ++i) {
      T row = spec_.alpha(i, 0) * y[0];
      for (std::size_t j = 1; j < n; ++j) row += spec_.alpha(i, j) * y[j];
      ay += row * y[i];
    }
    const T quad = (vy * vy - ay * phi) / (phi * phi);
    if (value_of(quad) < 0.0)
      throw ConvexityError("funk: a_ij y^i y^j < 0 at this line element");
    using std::sqrt;
    return (sqrt(quad) - vy / phi) / spec_.k;
  }
  template <class T>
  void spray_expression(std::span<const T> x, std::span<const T> y, std::span<T> out) const {
    const T f = spec_.k * norm_expression<T>(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = f * y[i];
  }

 private:
  QuadraticDomainSpec spec_;
  bool strictly_convex_ = false;
};

QuadraticFunkMetric funk_from_quadratic(const QuadraticDomainSpec& spec);

/// Funk metric on I = (-1, 1): (|y| + u y) / (k (1 - u^2)).
/// A one-dimensional Finsler structure.
class IntervalFunkMetric final : public ExpressionMetric<IntervalFunkMetric> {
 public:
  explicit IntervalFunkMetric(double k = 1.0);
  std::string name() const override { return "interval-funk"; }
  double domain_function(const Vector& x) const override { return 1.0 - x[0] * x[0]; }
  std::optional<Matrix> analytic_fundamental_tensor(const Vector& x,
                                                    const Vector& y) const override;
  double k() const { return k_; }

  template <class T>
  T norm_expression(std::span<const T> x, std::span<const T> y) const {
    using std::abs;
    return (abs(y[0]) + x[0] * y[0]) / (k_ * (1.0 - x[0] * x[0]));
  }
  template <class T>
  void spray_expression(std::span<const T> x, std::span<const T> y, std::span<T> out) const {
    out[0] = k_ * norm_expression<T>(x, y) * y[0];
  }

 private:
  double k_;
};

/// Interval Funk metric evaluated directly; DomainError for |u| >= 1.
double interval_funk_eval(double u, double y, double k = 1.0);

/// Black-box metric from a callable; only finite differences apply to it.
class CallableMetric final : public FinslerStructure {
 public:
  CallableMetric(int n, std::string name, std::function<double(const Vector&, const Vector&)> f,
                 std::function<double(const Vector&)> domain = {});
  std::string name() const override { return name_; }
  double domain_function(const Vector& x) const override;

 protected:
  double evaluate_unchecked(const Vector& x, const Vector& y) const override;

 private:
  std::string name_;
  std::function<double(const Vector&, const Vector&)> f_;
  std::function<double(const Vector&)> domain_;
};

std::shared_ptr<KleinMetric> klein_metric(int n);
std::shared_ptr<RandersMetric> randers_metric(const RandersSpec& spec);

}  // namespace finsler
