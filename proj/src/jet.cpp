#include "finsler/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace finsler {

namespace {

std::uint64_t monomial_key(std::span<const std::uint8_t> exps, int base) {
  std::uint64_t key = 0;
  for (auto e : exps) key = key * static_cast<std::uint64_t>(base) + e;
  return key;
}

void enumerate_degree(int num_vars, int degree, std::vector<std::uint8_t>& current, int var,
                      std::vector<std::uint8_t>& out) {
  if (var == num_vars - 1) {
    current[var] = static_cast<std::uint8_t>(degree);
    out.insert(out.end(), current.begin(), current.end());
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current[var] = static_cast<std::uint8_t>(e);
    enumerate_degree(num_vars, degree - e, current, var + 1, out);
  }
}

}  // namespace

JetSpace::JetSpace(int num_vars, int order) : num_vars_(num_vars), order_(order) {
  if (num_vars < 1 || num_vars > 8 || order < 0 || order > 12)
    throw std::invalid_argument("JetSpace: unsupported size");

  std::vector<std::uint8_t> current(num_vars, 0);
  for (int d = 0; d <= order; ++d) {
    enumerate_degree(num_vars, d, current, 0, exponents_);
    count_up_to_.push_back(exponents_.size() / num_vars);
  }
  const std::size_t n = exponents_.size() / num_vars;
  degree_.resize(n);
  const int base = order + 1;
  std::unordered_map<std::uint64_t, std::uint32_t> lookup;
  lookup.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    int d = 0;
    for (auto e : exponents(i)) d += e;
    degree_[i] = d;
    lookup.emplace(monomial_key(exponents(i), base), static_cast<std::uint32_t>(i));
  }

  std::vector<std::uint8_t> sum(num_vars);
  std::vector<std::vector<Product>> by_degree(order + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const int d = degree_[i] + degree_[j];
      if (d > order) continue;
      auto ei = exponents(i);
      auto ej = exponents(j);
      for (int v = 0; v < num_vars; ++v) sum[v] = static_cast<std::uint8_t>(ei[v] + ej[v]);
      by_degree[d].push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                              lookup.at(monomial_key(sum, base))});
    }
  }
  for (auto& bucket : by_degree) {
    products_.insert(products_.end(), bucket.begin(), bucket.end());
    products_up_to_.push_back(products_.size());
  }

  derivative_.resize(num_vars);
  for (int v = 0; v < num_vars; ++v) {
    for (std::size_t s = 0; s < n; ++s) {
      auto es = exponents(s);
      if (es[v] == 0) continue;
      std::vector<std::uint8_t> lowered(es.begin(), es.end());
      lowered[v] -= 1;
      derivative_[v].push_back({static_cast<std::uint32_t>(s),
                                lookup.at(monomial_key(lowered, base)),
                                static_cast<double>(es[v])});
    }
  }
}

std::shared_ptr<const JetSpace> JetSpace::get(int num_vars, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetSpace>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{num_vars, order}];
  if (!slot) slot = std::make_shared<const JetSpace>(num_vars, order);
  return slot;
}

std::size_t JetSpace::count_up_to(int d) const {
  if (d < 0) return 0;
  return count_up_to_[std::min(d, order_)];
}

std::span<const JetSpace::Product> JetSpace::products(int d) const {
  if (d < 0) return {};
  return {products_.data(), products_up_to_[std::min(d, order_)]};
}

std::size_t JetSpace::index_of(std::span<const int> exps) const {
  if (static_cast<int>(exps.size()) != num_vars_)
    throw std::invalid_argument("JetSpace::index_of: wrong number of exponents");
  int d = 0;
  for (int e : exps) {
    if (e < 0) throw std::invalid_argument("JetSpace::index_of: negative exponent");
    d += e;
  }
  if (d > order_) throw std::invalid_argument("JetSpace::index_of: degree exceeds order");
  // Graded lexicographic search within the degree block.
  for (std::size_t i = count_up_to(d - 1); i < count_up_to(d); ++i) {
    auto ei = exponents(i);
    if (std::equal(ei.begin(), ei.end(), exps.begin(),
                   [](std::uint8_t a, int b) { return a == b; }))
      return i;
  }
  throw std::logic_error("JetSpace::index_of: monomial not found");
}

// ---------------------------------------------------------------------------

Jet::Jet(std::shared_ptr<const JetSpace> space, double constant)
    : space_(std::move(space)), order_(space_->order()), c_(space_->size(), 0.0) {
  c_[0] = constant;
}

Jet Jet::variable(std::shared_ptr<const JetSpace> space, int var, double value) {
  Jet j(space, value);
  if (space->order() >= 1) {
    std::vector<int> e(space->num_vars(), 0);
    e[var] = 1;
    j.c_[space->index_of(e)] = 1.0;
  }
  return j;
}

void Jet::promote_to(const std::shared_ptr<const JetSpace>& space, int order) {
  const double v = c_[0];
  space_ = space;
  order_ = order;
  c_.assign(space->size(), 0.0);
  c_[0] = v;
}

double Jet::derivative(std::span<const int> multi_index) const {
  int d = 0;
  double factorial = 1.0;
  for (int e : multi_index) {
    d += e;
    for (int k = 2; k <= e; ++k) factorial *= k;
  }
  if (!space_) return d == 0 ? c_[0] : 0.0;
  if (d > order_) throw std::logic_error("Jet::derivative: order exceeds exact truncation");
  return factorial * c_[space_->index_of(multi_index)];
}

Jet Jet::diff(int var) const {
  if (!space_) return Jet(0.0);
  if (order_ == 0) throw std::logic_error("Jet::diff: no exact derivative information left");
  Jet out(space_, 0.0);
  out.order_ = order_ - 1;
  const std::size_t limit = space_->count_up_to(order_);
  for (const auto& t : space_->derivative_terms(var)) {
    if (t.src < limit) out.c_[t.dst] = t.factor * c_[t.src];
  }
  return out;
}

Jet Jet::nilpotent_part() const {
  Jet out = *this;
  out.c_[0] = 0.0;
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  if (!o.space_) {
    c_[0] += o.c_[0];
    return *this;
  }
  if (!space_) promote_to(o.space_, o.order_);
  if (space_ != o.space_) throw std::logic_error("Jet: mixing jet spaces");
  order_ = std::min(order_, o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (!o.space_) {
    c_[0] -= o.c_[0];
    return *this;
  }
  if (!space_) promote_to(o.space_, o.order_);
  if (space_ != o.space_) throw std::logic_error("Jet: mixing jet spaces");
  order_ = std::min(order_, o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(double v) {
  for (auto& c : c_) c *= v;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (!a.space_) return b * a.c_[0];
  if (!b.space_) return a * b.c_[0];
  if (a.space_ != b.space_) throw std::logic_error("Jet: mixing jet spaces");
  Jet out(a.space_, 0.0);
  out.order_ = std::min(a.order_, b.order_);
  const double* ca = a.c_.data();
  const double* cb = b.c_.data();
  double* co = out.c_.data();
  for (const auto& p : a.space_->products(out.order_)) co[p.out] += ca[p.lhs] * cb[p.rhs];
  return out;
}

Jet& Jet::operator*=(const Jet& o) {
  *this = *this * o;
  return *this;
}

Jet& Jet::operator/=(const Jet& o) {
  *this = *this * reciprocal(o);
  return *this;
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
Jet operator/(double a, const Jet& b) { return reciprocal(b) * a; }

Jet Jet::compose(std::span<const double> taylor) const {
  if (!space_ || order_ == 0 || taylor.size() == 1) {
    Jet r = *this;
    std::fill(r.c_.begin(), r.c_.end(), 0.0);
    r.c_[0] = taylor[0];
    return r;
  }
  const Jet h = nilpotent_part();
  const int p = std::min<int>(order_, static_cast<int>(taylor.size()) - 1);
  Jet r(space_, taylor[p]);
  r.order_ = order_;
  for (int k = p - 1; k >= 0; --k) {
    r = r * h;
    r.c_[0] += taylor[k];
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

int jet_order(const Jet& a) { return a.is_constant() ? 0 : a.order(); }

double binomial(double r, int k) {
  double c = 1.0;
  for (int i = 0; i < k; ++i) c *= (r - i) / (i + 1);
  return c;
}

/// Taylor coefficients of tanh/tan from the derivative polynomial recurrence
/// D_{k+1}(T) = D_k'(T) * (1 + sign * T^2).
std::vector<double> tangent_like_coefficients(double t, int order, double sign) {
  std::vector<double> poly{0.0, 1.0};  // D_0(T) = T
  std::vector<double> coeffs;
  double factorial = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) factorial *= k;
    double v = 0.0;
    for (std::size_t i = poly.size(); i-- > 0;) v = v * t + poly[i];
    coeffs.push_back(v / factorial);
    std::vector<double> deriv(poly.size() > 1 ? poly.size() - 1 : 1, 0.0);
    for (std::size_t i = 1; i < poly.size(); ++i) deriv[i - 1] = poly[i] * static_cast<double>(i);
    std::vector<double> next(deriv.size() + 2, 0.0);
    for (std::size_t i = 0; i < deriv.size(); ++i) {
      next[i] += deriv[i];
      next[i + 2] += sign * deriv[i];
    }
    poly = std::move(next);
  }
  return coeffs;
}

}  // namespace

Jet reciprocal(const Jet& a) {
  const int p = jet_order(a);
  const double v = a.value();
  std::vector<double> t(p + 1);
  double pw = 1.0 / v;
  for (int k = 0; k <= p; ++k) {
    t[k] = (k % 2 == 0 ? 1.0 : -1.0) * pw;
    pw /= v;
  }
  return a.compose(t);
}

Jet pow(const Jet& a, double exponent) {
  const int p = jet_order(a);
  const double v = a.value();
  std::vector<double> t(p + 1);
  for (int k = 0; k <= p; ++k) t[k] = binomial(exponent, k) * std::pow(v, exponent - k);
  return a.compose(t);
}

Jet sqrt(const Jet& a) { return pow(a, 0.5); }

Jet exp(const Jet& a) {
  const int p = jet_order(a);
  std::vector<double> t(p + 1);
  const double e = std::exp(a.value());
  double factorial = 1.0;
  for (int k = 0; k <= p; ++k) {
    if (k > 0) factorial *= k;
    t[k] = e / factorial;
  }
  return a.compose(t);
}

Jet log(const Jet& a) {
  const int p = jet_order(a);
  const double v = a.value();
  std::vector<double> t(p + 1);
  t[0] = std::log(v);
  double pw = 1.0;
  for (int k = 1; k <= p; ++k) {
    pw *= v;
    t[k] = (k % 2 == 1 ? 1.0 : -1.0) / (k * pw);
  }
  return a.compose(t);
}

Jet sin(const Jet& a) {
  const int p = jet_order(a);
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const double cycle[4] = {s, c, -s, -c};
  std::vector<double> t(p + 1);
  double factorial = 1.0;
  for (int k = 0; k <= p; ++k) {
    if (k > 0) factorial *= k;
    t[k] = cycle[k % 4] / factorial;
  }
  return a.compose(t);
}

Jet cos(const Jet& a) {
  const int p = jet_order(a);
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const double cycle[4] = {c, -s, -c, s};
  std::vector<double> t(p + 1);
  double factorial = 1.0;
  for (int k = 0; k <= p; ++k) {
    if (k > 0) factorial *= k;
    t[k] = cycle[k % 4] / factorial;
  }
  return a.compose(t);
}

Jet tan(const Jet& a) {
  return a.compose(tangent_like_coefficients(std::tan(a.value()), jet_order(a), 1.0));
}

Jet tanh(const Jet& a) {
  return a.compose(tangent_like_coefficients(std::tanh(a.value()), jet_order(a), -1.0));
}

Jet atanh(const Jet& a) {
  const int p = jet_order(a);
  const double v = a.value();
  std::vector<double> t(p + 1);
  t[0] = std::atanh(v);
  for (int k = 1; k <= p; ++k) {
    t[k] = 0.5 * (1.0 / (k * std::pow(1.0 - v, k)) +
                  (k % 2 == 1 ? 1.0 : -1.0) / (k * std::pow(1.0 + v, k)));
  }
  return a.compose(t);
}

Jet abs(const Jet& a) { return a.value() < 0.0 ? -a : a; }

}  // namespace finsler
