#pragma once

#include "finsler/core.hpp"
#include "finsler/jet.hpp"
#include "finsler/types.hpp"

#include <functional>
#include <span>
#include <vector>

namespace finsler {

enum class DiffMode { automatic, finite_difference };

struct EngineConfig {
  DiffMode mode = DiffMode::automatic;
  /// Finite differences: coarsest step relative to max(1, |coordinate|).
  /// Zero selects eps^(1/(order + 2 * richardson_levels)); the step is halved
  /// further while the stencil leaves the domain.
  double base_step = 0.0;
  int richardson_levels = 5;
  /// Finite differences: admissible local error of the selected Richardson
  /// estimate, relative to max(1, |value|).
  double target_accuracy = 1e-6;
};

/// A scalar field on the slit tangent bundle. `jet` is optional; without it
/// only finite differences are available.
struct TangentField {
  std::function<double(const Vector& x, const Vector& y)> value;
  std::function<Jet(std::span<const Jet> x, std::span<const Jet> y)> jet;
  /// Domain test for base points; empty means unrestricted.
  std::function<bool(const Vector& x)> in_domain;
};

struct DerivativeRequest {
  TangentField field;
  std::vector<int> x_orders;  ///< multi-index in x, total order <= 2
  std::vector<int> y_orders;  ///< multi-index in y, total order <= 3
  Vector x;
  Vector y;
};

/// Mixed partial d^a/dx^a d^b/dy^b of the field at (x, y).
double partial(const DerivativeRequest& request, const EngineConfig& config = {});

/// F^2 of a metric as a tangent field (jet path attached when supported).
TangentField squared_norm_field(const FinslerStructure& metric);

/// g_ij = [F^2/2]_{y^i y^j}. Analytic tensor if the metric provides one,
/// otherwise jets, otherwise finite differences. Output is exactly symmetric.
Matrix fundamental_tensor(const FinslerStructure& metric, const Vector& x, const Vector& y,
                          const EngineConfig& config = {});

/// Jets of the identity coordinates (x, y) about a line element: variable i
/// is x^i, variable n + i is y^i.
struct LineElementJets {
  std::vector<Jet> x;
  std::vector<Jet> y;
};
LineElementJets seed_line_element(const Vector& x, const Vector& y, int order);

/// Solves A z = b on any scalar type by Gaussian elimination with partial
/// pivoting on base values. A is row-major n x n.
template <class T>
std::vector<T> solve_linear(std::vector<T> a, std::vector<T> b, int n) {
  using std::abs;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (abs(value_of(a[r * n + col])) > abs(value_of(a[pivot * n + col]))) pivot = r;
    if (value_of(a[pivot * n + col]) == 0.0)
      throw ConvexityError("singular fundamental tensor");
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      std::swap(b[col], b[pivot]);
    }
    const T inv = 1.0 / a[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const T factor = a[r * n + col] * inv;
      for (int c = col; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<T> z(n);
  for (int r = n - 1; r >= 0; --r) {
    T acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= a[r * n + c] * z[c];
    z[r] = acc / a[r * n + r];
  }
  return z;
}

}  // namespace finsler
