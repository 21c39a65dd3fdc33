#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace finsler {

/// Monomial layout of truncated Taylor polynomials in `num_vars` variables up
/// to total degree `order`. Monomials are stored in graded order, so every
/// prefix of the coefficient array is a lower-order jet. Instances are
/// immutable and shared; use `JetSpace::get`.
class JetSpace {
 public:
  struct Product {
    std::uint32_t lhs;
    std::uint32_t rhs;
    std::uint32_t out;
  };
  struct DerivativeTerm {
    std::uint32_t src;
    std::uint32_t dst;
    double factor;
  };

  static std::shared_ptr<const JetSpace> get(int num_vars, int order);

  int num_vars() const { return num_vars_; }
  int order() const { return order_; }
  std::size_t size() const { return degree_.size(); }

  int degree(std::size_t idx) const { return degree_[idx]; }
  std::span<const std::uint8_t> exponents(std::size_t idx) const {
    return {exponents_.data() + idx * num_vars_, static_cast<std::size_t>(num_vars_)};
  }
  /// Number of monomials with degree <= d.
  std::size_t count_up_to(int d) const;
  std::size_t index_of(std::span<const int> exps) const;

  /// Products whose result has degree <= d, as a contiguous prefix.
  std::span<const Product> products(int d) const;
  /// Terms of d/dvar: coefficient[dst] += factor * coefficient[src].
  std::span<const DerivativeTerm> derivative_terms(int var) const {
    return derivative_[var];
  }

  JetSpace(int num_vars, int order);

 private:
  int num_vars_;
  int order_;
  std::vector<std::uint8_t> exponents_;
  std::vector<int> degree_;
  std::vector<std::size_t> count_up_to_;
  std::vector<Product> products_;
  std::vector<std::size_t> products_up_to_;
  std::vector<std::vector<DerivativeTerm>> derivative_;
};

/// Truncated multivariate Taylor polynomial ("jet") of a scalar field about a
/// base point. Coefficients are Taylor coefficients: c_alpha = d^alpha f / alpha!.
///
/// A default-constructed or scalar-constructed Jet has no space and behaves as
/// a constant; it is promoted on contact with a spaced jet. This lets the same
/// templated expression code run on `double` and `Jet`.
class Jet {
 public:
  Jet() : c_{0.0} {}
  Jet(double constant) : c_{constant} {}  // NOLINT: implicit by design of templated code
  Jet(std::shared_ptr<const JetSpace> space, double constant);

  static Jet variable(std::shared_ptr<const JetSpace> space, int var, double value);

  double value() const { return c_[0]; }
  bool is_constant() const { return space_ == nullptr; }
  /// Highest degree whose coefficients are still exact.
  int order() const { return space_ ? order_ : 0; }
  const std::shared_ptr<const JetSpace>& space() const { return space_; }
  std::span<const double> coefficients() const { return c_; }

  /// Mixed partial derivative d^alpha f at the base point (alpha! * c_alpha).
  double derivative(std::span<const int> multi_index) const;
  /// Partial derivative with respect to a jet variable; exact order drops by one.
  Jet diff(int var) const;
  /// Subtracts the constant term.
  Jet nilpotent_part() const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);
  Jet& operator+=(double v) { c_[0] += v; return *this; }
  Jet& operator-=(double v) { c_[0] -= v; return *this; }
  Jet& operator*=(double v);
  Jet& operator/=(double v) { return *this *= 1.0 / v; }

  /// Applies a univariate function given its Taylor coefficients about value():
  /// sum_k taylor[k] * (x - value())^k, truncated to order().
  Jet compose(std::span<const double> taylor) const;

  friend Jet operator-(Jet a) { a *= -1.0; return a; }
  friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
  friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator+(Jet a, double b) { a += b; return a; }
  friend Jet operator+(double a, Jet b) { b += a; return b; }
  friend Jet operator-(Jet a, double b) { a -= b; return a; }
  friend Jet operator-(double a, Jet b) { b *= -1.0; b += a; return b; }
  friend Jet operator*(Jet a, double b) { a *= b; return a; }
  friend Jet operator*(double a, Jet b) { b *= a; return b; }
  friend Jet operator/(Jet a, double b) { a /= b; return a; }
  friend Jet operator/(double a, const Jet& b);

 private:
  void promote_to(const std::shared_ptr<const JetSpace>& space, int order);

  std::shared_ptr<const JetSpace> space_;
  int order_ = 0;
  std::vector<double> c_;
};

Jet reciprocal(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, double exponent);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet tan(const Jet& a);
Jet tanh(const Jet& a);
Jet atanh(const Jet& a);
/// |a| for a.value() != 0 (sign of the base value is propagated).
Jet abs(const Jet& a);

inline double value_of(double v) { return v; }
inline double value_of(const Jet& v) { return v.value(); }

}  // namespace finsler
