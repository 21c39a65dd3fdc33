#include <doctest.h>

#include "finsler/diffengine.hpp"

#include <cmath>
#include <random>

#include "test_helpers.hpp"

using testing::vec;

using namespace finsler;

namespace {

template <class T>
T polynomial(std::span<const T> x, std::span<const T> y) {
  return x[0] * y[1] * y[1] * y[1] + 0.5 * x[1] * x[1] * y[0] * y[0] - x[0] * x[1] * y[0] * y[1] +
         y[0] * y[0] * y[0] * y[1] * y[1] * y[1];
}

TangentField polynomial_field() {
  TangentField f;
  f.value = [](const Vector& x, const Vector& y) { return polynomial<double>(as_span(x), as_span(y)); };
  f.jet = [](std::span<const Jet> x, std::span<const Jet> y) { return polynomial<Jet>(x, y); };
  return f;
}


}  // namespace

TEST_CASE("partial: polynomial field exact in automatic mode") {
  const Vector x = vec({0.3, -1.2});
  const Vector y = vec({0.8, 1.7});
  DerivativeRequest r{polynomial_field(), {1, 0}, {0, 3}, x, y};
  CHECK(partial(r) == doctest::Approx(6.0).epsilon(1e-12));

  r.x_orders = {1, 1};
  r.y_orders = {1, 1};
  CHECK(partial(r) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("partial: x1 * (y2)^3 gives 6") {
  TangentField f;
  f.value = [](const Vector& x, const Vector& y) { return x[0] * y[1] * y[1] * y[1]; };
  f.jet = [](std::span<const Jet> x, std::span<const Jet> y) { return x[0] * y[1] * y[1] * y[1]; };
  DerivativeRequest r{f, {1, 0}, {0, 3}, vec({0.2, 0.1}), vec({1.0, 2.0})};
  CHECK(partial(r) == doctest::Approx(6.0).epsilon(1e-14));
  EngineConfig fd;
  fd.mode = DiffMode::finite_difference;
  CHECK(std::abs(partial(r, fd) - 6.0) <= 6e-7 * 6.0);
}

TEST_CASE("partial: finite differences on random degree-6 polynomials") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  EngineConfig fd;
  fd.mode = DiffMode::finite_difference;
  const std::vector<std::pair<std::vector<int>, std::vector<int>>> orders = {
      {{1, 0}, {0, 0}}, {{0, 0}, {1, 1}}, {{1, 0}, {0, 2}}, {{0, 1}, {2, 1}}, {{1, 1}, {0, 3}},
      {{2, 0}, {1, 0}}};
  double worst_auto = 0.0;
  double worst_fd = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = vec({u(rng), u(rng)});
    const Vector y = vec({u(rng) + 2.0, u(rng)});
    for (const auto& [xo, yo] : orders) {
      DerivativeRequest r{polynomial_field(), xo, yo, x, y};
      const double exact = partial(r);
      // Independent hand check for one entry.
      if (xo == std::vector<int>{0, 0} && yo == std::vector<int>{1, 1}) {
        const double hand = -x[0] * x[1] + 9.0 * y[0] * y[0] * y[1] * y[1];
        worst_auto = std::max(worst_auto, std::abs(exact - hand) / std::max(1.0, std::abs(hand)));
      }
      const double approx = partial(r, fd);
      worst_fd = std::max(worst_fd, std::abs(approx - exact) / std::max(1.0, std::abs(exact)));
    }
  }
  CHECK(worst_auto <= 1e-10);
  CHECK(worst_fd <= 1e-7);
}

TEST_CASE("partial: rejects bad requests") {
  TangentField f = polynomial_field();
  f.in_domain = [](const Vector& x) { return x.norm() < 1.0; };
  DerivativeRequest r{f, {3, 0}, {0, 0}, vec({0.0, 0.0}), vec({1.0, 0.0})};
  CHECK_THROWS_AS(partial(r), UsageError);
  r.x_orders = {1, 0};
  r.x = vec({2.0, 0.0});
  CHECK_THROWS_AS(partial(r), DomainError);
  EngineConfig fd;
  fd.mode = DiffMode::finite_difference;
  r.x = vec({0.9995, 0.0});
  CHECK_THROWS_AS(partial(r, fd), DomainError);
  r.x_orders = {1};
  CHECK_THROWS_AS(partial(r), DimensionError);
}

TEST_CASE("partial: Richardson disagreement raises accuracy error") {
  TangentField f;
  f.value = [](const Vector& x, const Vector&) { return std::sin(1e4 * x[0]); };
  EngineConfig fd;
  fd.mode = DiffMode::finite_difference;
  DerivativeRequest r{f, {1}, {0}, vec({0.1}), vec({1.0})};
  CHECK_THROWS_AS(partial(r, fd), AccuracyError);
}
