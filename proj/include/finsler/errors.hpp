#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define FINSLER_DEFINE_ERROR(Name, tag)                                   \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(tag, what) {}          \
  }

/// Point outside the metric's domain, or a stencil leaving it.
FINSLER_DEFINE_ERROR(DomainError, "domain");
/// Invalid parameters passed to a metric or object constructor.
FINSLER_DEFINE_ERROR(ConstructionError, "construction");
/// Mixed-dimension arguments.
FINSLER_DEFINE_ERROR(DimensionError, "dimension");
/// Numerical differentiation or quadrature failed to reach its target.
FINSLER_DEFINE_ERROR(AccuracyError, "accuracy");
/// Fundamental tensor singular or indefinite where it must not be.
FINSLER_DEFINE_ERROR(ConvexityError, "convexity");
/// Step size underflow in the ODE integrator.
FINSLER_DEFINE_ERROR(StiffnessError, "stiffness");
/// Boundary value solve did not converge.
FINSLER_DEFINE_ERROR(ConnectivityError, "connectivity");
/// Two sprays differ by something other than a multiple of y.
FINSLER_DEFINE_ERROR(NotProjectiveError, "not-projective");
/// Evaluation at a pole of a projective parameter or Moebius chart.
FINSLER_DEFINE_ERROR(ChartError, "chart");
/// Derivative too small to form a Schwarzian.
FINSLER_DEFINE_ERROR(CriticalPointError, "critical-point");
/// Moebius transform evaluated at its pole.
FINSLER_DEFINE_ERROR(PoleError, "pole");
/// No Moebius chart of the interval fits inside the parameter range.
FINSLER_DEFINE_ERROR(InadmissibleChartError, "inadmissible-chart");
/// A theorem checker was asked to run where its curvature hypothesis fails.
FINSLER_DEFINE_ERROR(HypothesisError, "hypothesis-not-satisfied");
/// Malformed configuration or command line.
FINSLER_DEFINE_ERROR(UsageError, "usage");

#undef FINSLER_DEFINE_ERROR

}  // namespace finsler
