#include <doctest.h>

#include "finsler/jet.hpp"

#include <cmath>
#include <random>

using namespace finsler;

TEST_CASE("jet polynomial derivatives are exact") {
  auto space = JetSpace::get(2, 5);
  const Jet x = Jet::variable(space, 0, 1.5);
  const Jet y = Jet::variable(space, 1, -0.7);
  const Jet f = x * y * y * y + 2.0 * x * x - y;
  const int d_x[] = {1, 0};
  const int d_xyyy[] = {1, 3};
  const int d_yy[] = {0, 2};
  CHECK(f.value() == doctest::Approx(1.5 * std::pow(-0.7, 3) + 4.5 + 0.7).epsilon(1e-15));
  CHECK(f.derivative(d_x) == doctest::Approx(std::pow(-0.7, 3) + 6.0).epsilon(1e-15));
  CHECK(f.derivative(d_xyyy) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(f.derivative(d_yy) == doctest::Approx(6.0 * 1.5 * -0.7).epsilon(1e-15));
}

TEST_CASE("jet elementary functions match closed-form derivatives") {
  auto space = JetSpace::get(1, 4);
  const double t = 0.3;
  const Jet x = Jet::variable(space, 0, t);
  auto d = [](const Jet& j, int k) {
    const int a[] = {k};
    return j.derivative(a);
  };
  const double th = std::tanh(t);
  const double sech2 = 1.0 - th * th;
  const Jet f = tanh(x);
  CHECK(d(f, 1) == doctest::Approx(sech2).epsilon(1e-14));
  CHECK(d(f, 2) == doctest::Approx(-2.0 * th * sech2).epsilon(1e-14));
  CHECK(d(f, 3) == doctest::Approx(sech2 * (6.0 * th * th - 2.0)).epsilon(1e-13));

  const double tn = std::tan(t);
  const Jet g = tan(x);
  CHECK(d(g, 3) == doctest::Approx((1 + tn * tn) * (6 * tn * tn + 2)).epsilon(1e-13));

  CHECK(d(sqrt(x), 3) == doctest::Approx(3.0 / 8.0 * std::pow(t, -2.5)).epsilon(1e-13));
  CHECK(d(log(x), 4) == doctest::Approx(-6.0 / std::pow(t, 4)).epsilon(1e-13));
  CHECK(d(exp(x), 4) == doctest::Approx(std::exp(t)).epsilon(1e-14));
  CHECK(d(sin(x), 3) == doctest::Approx(-std::cos(t)).epsilon(1e-14));
  CHECK(d(cos(x), 2) == doctest::Approx(-std::cos(t)).epsilon(1e-14));
  CHECK(d(atanh(x), 3) == doctest::Approx((2 + 6 * t * t) / std::pow(1 - t * t, 3)).epsilon(1e-13));
  CHECK(d(pow(x, 1.5), 2) == doctest::Approx(0.75 / std::sqrt(t)).epsilon(1e-13));
  CHECK(d(1.0 / x, 3) == doctest::Approx(-6.0 / std::pow(t, 4)).epsilon(1e-13));
  CHECK(d(abs(-x), 1) == doctest::Approx(1.0));
}

TEST_CASE("jet identities on random inputs") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  auto space = JetSpace::get(3, 4);
  for (int trial = 0; trial < 50; ++trial) {
    const Jet a = Jet::variable(space, 0, u(rng));
    const Jet b = Jet::variable(space, 1, u(rng));
    const Jet c = Jet::variable(space, 2, u(rng));
    const Jet lhs = exp(log(a * b) + c) / (a * b);
    const Jet rhs = exp(c);
    const Jet s = sqrt(a * a + b * b);
    const Jet t = s * s - a * a - b * b;
    for (std::size_t i = 0; i < space->size(); ++i) {
      CHECK(std::abs(lhs.coefficients()[i] - rhs.coefficients()[i]) < 1e-11);
      CHECK(std::abs(t.coefficients()[i]) < 1e-11);
    }
  }
}

TEST_CASE("jet diff lowers order and matches derivative") {
  auto space = JetSpace::get(2, 4);
  const Jet x = Jet::variable(space, 0, 0.4);
  const Jet y = Jet::variable(space, 1, 1.1);
  const Jet f = sin(x) * exp(y);
  const Jet fx = f.diff(0);
  CHECK(fx.order() == 3);
  const int a[] = {1, 2};
  const int b[] = {2, 2};
  CHECK(fx.derivative(a) == doctest::Approx(f.derivative(b)).epsilon(1e-14));
}

TEST_CASE("constant jets promote on contact") {
  auto space = JetSpace::get(1, 2);
  const Jet x = Jet::variable(space, 0, 2.0);
  const Jet c = 3.0;
  const Jet f = c * x * x + c;
  const int a[] = {2};
  CHECK(f.derivative(a) == doctest::Approx(6.0));
  CHECK(f.value() == doctest::Approx(15.0));
}
