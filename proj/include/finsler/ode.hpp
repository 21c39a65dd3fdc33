#pragma once

#include "finsler/types.hpp"

#include <functional>
#include <vector>

namespace finsler {

/// dy/dt = f(t, y). May throw DomainError; the step is then rejected and retried smaller.
using OdeRhs = std::function<void(double t, const Vector& y, Vector& dydt)>;
/// Returns true once a state is no longer acceptable (e.g. too close to a
/// domain boundary). The crossing is located on the dense output.
using OdeStop = std::function<bool(double t, const Vector& y)>;

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  double initial_step = 0.0;  ///< 0 selects automatically
  double max_step = 0.0;      ///< 0 means |t_end - t0|
  int max_steps = 200000;
};

/// One accepted step with its 7th-order interpolant.
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  Matrix coefficients;  ///< 8 x m

  Vector state(double t) const;
  Vector rate(double t) const;
};

/// Piecewise dense output; valid for t between t_begin and t_end (either order).
class DenseSolution {
 public:
  DenseSolution() = default;
  DenseSolution(std::vector<DenseStep> steps, double t_begin, double t_end);

  double t_begin() const { return t_begin_; }
  double t_end() const { return t_end_; }
  bool empty() const { return steps_.empty(); }
  const std::vector<DenseStep>& steps() const { return steps_; }

  Vector state(double t) const;
  Vector rate(double t) const;

 private:
  const DenseStep& locate(double t) const;

  std::vector<DenseStep> steps_;
  double t_begin_ = 0.0;
  double t_end_ = 0.0;
};

struct OdeResult {
  DenseSolution solution;
  double t_final = 0.0;
  Vector y_final;
  /// Integration ended before t_end: stop predicate fired or the right-hand
  /// side kept leaving its domain.
  bool truncated = false;
  int accepted = 0;
  int rejected = 0;
  int evaluations = 0;
};

/// Dormand-Prince 8(5,3) with dense output of order 7. Integrates forward or
/// backward depending on the sign of t_end - t0. Throws StiffnessError when the
/// step size underflows under error control.
OdeResult integrate_dop853(const OdeRhs& f, double t0, const Vector& y0, double t_end,
                           const OdeOptions& options = {}, const OdeStop& stop = {});

}  // namespace finsler
