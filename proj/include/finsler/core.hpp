#pragma once

#include "finsler/errors.hpp"
#include "finsler/jet.hpp"
#include "finsler/types.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace finsler {

/// A Finsler structure F(x, y) on a single global chart of fixed dimension.
///
/// Evaluation checks the dimension and the domain eagerly; a point with
/// domain_function(x) <= 0 raises DomainError instead of producing NaN.
/// Implementations may additionally expose F on jets (for exact automatic
/// differentiation), an analytic fundamental tensor and an analytic spray.
/// All instances are immutable after construction.
class FinslerStructure {
 public:
  explicit FinslerStructure(int dimension);
  virtual ~FinslerStructure() = default;

  int dimension() const { return dimension_; }
  virtual std::string name() const = 0;

  /// phi(x) > 0 inside the domain. Whole-chart metrics return +infinity.
  virtual double domain_function(const Vector& x) const;
  /// Scale of phi used for boundary margins (gamma for quadratic domains).
  virtual double domain_scale() const { return 1.0; }

  bool contains(const Vector& x) const;
  /// Throws DimensionError / DomainError with the offending point in the message.
  void require_point(const Vector& x) const;
  void require_line_element(const Vector& x, const Vector& y) const;

  /// F(x, y); F(x, 0) = 0.
  double evaluate(const Vector& x, const Vector& y) const;

  virtual bool supports_jets() const { return false; }
  /// F evaluated on jets; the base point must lie in the domain.
  virtual Jet evaluate_jet(std::span<const Jet> x, std::span<const Jet> y) const;

  virtual std::optional<Matrix> analytic_fundamental_tensor(const Vector& x,
                                                            const Vector& y) const;

  virtual bool has_analytic_spray() const { return false; }
  virtual std::vector<Jet> analytic_spray_jet(std::span<const Jet> x,
                                              std::span<const Jet> y) const;
  virtual Vector analytic_spray(const Vector& x, const Vector& y) const;

 protected:
  virtual double evaluate_unchecked(const Vector& x, const Vector& y) const = 0;
  void require_jet_base(std::span<const Jet> x, std::span<const Jet> y) const;

 private:
  int dimension_;
};

namespace detail {
template <class D>
concept HasSprayExpression = requires(const D& d, std::span<const double> x, std::span<double> out) {
  d.template spray_expression<double>(x, x, out);
};
}  // namespace detail

/// Base for metrics written as a templated closed-form expression
/// `template <class T> T norm_expression(span<const T> x, span<const T> y) const`.
/// The same expression serves plain evaluation and jet propagation. A derived
/// class that also defines `spray_expression<T>(x, y, out)` gets an analytic spray.
template <class Derived>
class ExpressionMetric : public FinslerStructure {
 public:
  using FinslerStructure::FinslerStructure;

  bool supports_jets() const override { return true; }

  Jet evaluate_jet(std::span<const Jet> x, std::span<const Jet> y) const override {
    require_jet_base(x, y);
    return self().template norm_expression<Jet>(x, y);
  }

  bool has_analytic_spray() const override { return detail::HasSprayExpression<Derived>; }

  std::vector<Jet> analytic_spray_jet(std::span<const Jet> x,
                                      std::span<const Jet> y) const override {
    if constexpr (detail::HasSprayExpression<Derived>) {
      require_jet_base(x, y);
      std::vector<Jet> out(x.size());
      self().template spray_expression<Jet>(x, y, out);
      return out;
    } else {
      return FinslerStructure::analytic_spray_jet(x, y);
    }
  }

  Vector analytic_spray(const Vector& x, const Vector& y) const override {
    if constexpr (detail::HasSprayExpression<Derived>) {
      require_line_element(x, y);
      Vector out(x.size());
      self().template spray_expression<double>(as_span(x), as_span(y),
                                               std::span<double>(out.data(), out.size()));
      return out;
    } else {
      return FinslerStructure::analytic_spray(x, y);
    }
  }

 protected:
  double evaluate_unchecked(const Vector& x, const Vector& y) const override {
    return self().template norm_expression<double>(as_span(x), as_span(y));
  }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

// ---------------------------------------------------------------------------
// Validators

struct ValidationCheck {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool pass() const;
  void add(std::string name, double max_residual, double tolerance);
};

struct HomogeneitySample {
  Vector x;
  Vector y;
  double lambda = 1.0;
};

/// max |F(x, l*y) - l*F(x, y)| / F(x, y) over the samples.
ValidationReport validate_homogeneity(const FinslerStructure& metric,
                                      std::span<const HomogeneitySample> samples,
                                      double tolerance = 1e-10);

/// Smallest eigenvalue of g_ij at every sample; passes when all exceed
/// `min_eigenvalue`. A numerically asymmetric Hessian raises AccuracyError.
ValidationReport validate_strong_convexity(const FinslerStructure& metric,
                                           std::span<const LineElement> samples,
                                           double min_eigenvalue = 1e-12);

// ---------------------------------------------------------------------------
// Curves and arc length

/// A parametrized curve t -> x(t) with velocity; piecewise smooth between
/// the listed breakpoints.
struct Curve {
  std::function<Vector(double)> position;
  std::function<Vector(double)> velocity;
  std::vector<double> breakpoints;

  /// Constant-speed straight segment, t in [0, 1].
  static Curve segment(const Vector& from, const Vector& to);
  /// Piecewise-linear interpolation of (t_m, x_m) samples, t strictly increasing.
  static Curve polyline(std::vector<double> t, std::vector<Vector> points);
};

/// Integral of F(gamma, gamma') over [t0, t1] by adaptive Gauss-Kronrod
/// quadrature on each smooth piece.
double arc_length(const FinslerStructure& metric, const Curve& curve, double t0, double t1,
                  double tolerance = 1e-12);

/// Random line elements inside the domain of `metric`: base points drawn
/// uniformly from the ball of radius `radius` (rejected if outside the domain),
/// directions uniform on the unit sphere.
std::vector<LineElement> sample_line_elements(const FinslerStructure& metric, std::size_t count,
                                              double radius, unsigned long long seed);

}  // namespace finsler
