#include <doctest.h>

#include "finsler/errors.hpp"
#include "finsler/metrics.hpp"
#include "finsler/projective.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "test_helpers.hpp"

using namespace finsler;
using testing::vec;

namespace {

MobiusTransform random_mobius(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (;;) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    if (std::abs(a * d - b * c) > 0.1) return {a, b, c, d};
  }
}

}  // namespace

TEST_CASE("Moebius group utilities") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> t(-0.4, 0.4);
  CHECK(MobiusTransform::identity()(0.37) == 0.37);
  const auto m = MobiusTransform(1, 1, 0, 1).compose(MobiusTransform(1, -1, 0, 1));
  for (double v : {-3.0, 0.0, 2.5}) CHECK(m(v) == doctest::Approx(v).epsilon(1e-15));
  CHECK_THROWS_AS(MobiusTransform(1, 2, 2, 4), ConstructionError);
  CHECK_THROWS_AS(MobiusTransform(1, 0, 1, 1)(-1.0), PoleError);
  CHECK(MobiusTransform(2, 0, 0, 2).determinant() == doctest::Approx(1.0));
  CHECK(MobiusTransform(0, 1, 1, 0).determinant() == doctest::Approx(-1.0));
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_mobius(rng);
    const auto b = random_mobius(rng);
    const double p[4] = {t(rng), t(rng) + 1.0, t(rng) + 2.0, t(rng) + 3.0};
    if (std::abs(a.pole() - 1.5) < 2.5) continue;
    const double before = cross_ratio(p[0], p[1], p[2], p[3]);
    const double after = cross_ratio(a(p[0]), a(p[1]), a(p[2]), a(p[3]));
    CHECK(after == doctest::Approx(before).epsilon(1e-12));
    const double v = t(rng);
    CHECK(a.compose(a.inverse())(v) == doctest::Approx(v).epsilon(1e-12));
    if (std::abs(b(v) - a.pole()) > 1e-3 && std::abs(v - b.pole()) > 1e-3)
      CHECK(a.compose(b)(v) == doctest::Approx(a(b(v))).epsilon(1e-10));
  }
  const auto shift = MobiusTransform::interval_translation(0.8);
  CHECK(shift(0.0) == doctest::Approx(std::tanh(0.8)).epsilon(1e-15));
  CHECK(shift(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(shift(-1.0) == doctest::Approx(-1.0).epsilon(1e-15));
  const auto affine = MobiusTransform::affine(-3.0, 5.0);
  CHECK(affine(-1.0) == -3.0);
  CHECK(affine(1.0) == 5.0);
}

TEST_CASE("Schwarzian of Moebius maps vanishes") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> t(-3.0, 3.0);
  int checked = 0;
  while (checked < 1000) {
    const auto m = random_mobius(rng);
    const double at = t(rng);
    if (std::abs(at - m.pole()) < 0.05) continue;
    CHECK(std::abs(schwarzian([&](const Jet& u) { return m(u); }, at)) <= 1e-8);
    ++checked;
  }
}

TEST_CASE("closed-form Schwarzians") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> t(-1.4, 1.4);
  const JetFunction tanh_f = [](const Jet& u) { return tanh(u); };
  const JetFunction tan_f = [](const Jet& u) { return tan(u); };
  for (int i = 0; i < 50; ++i) {
    const double at = t(rng);
    CHECK(schwarzian(tanh_f, at) == doctest::Approx(-2.0).epsilon(1e-8));
    CHECK(schwarzian(tan_f, at) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(schwarzian_numeric([](double u) { return std::tanh(u); }, 0.5 * at) ==
          doctest::Approx(-2.0).epsilon(1e-5));
  }
  std::vector<double> ts, fs;
  for (int i = 0; i <= 200; ++i) {
    ts.push_back(-1.0 + 0.01 * i);
    fs.push_back(std::tan(ts.back()));
  }
  CHECK(schwarzian_sampled(ts, fs, 0.3) == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(schwarzian_sampled(ts, fs, -0.97) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK_THROWS_AS(schwarzian([](const Jet& u) { return u * u * u; }, 0.0), CriticalPointError);
  CHECK_THROWS_AS(schwarzian_numeric([](double u) { return std::cos(u); }, 0.0),
                  CriticalPointError);
}

TEST_CASE("Schwarzian composition rule") {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> t(-0.6, 0.6);
  const JetFunction tanh_f = [](const Jet& u) { return tanh(u); };
  const JetFunction tan_f = [](const Jet& u) { return tan(u); };
  const JetFunction exp_f = [](const Jet& u) { return exp(u) + 0.5 * u; };
  const JetFunction identity = [](const Jet& u) { return u; };
  const MobiusTransform m(1.0, 2.0, 0.3, 1.5);
  const JetFunction mob = [&](const Jet& u) { return m(u); };
  for (int i = 0; i < 100; ++i) {
    const double at = t(rng);
    CHECK(check_composition(tanh_f, tan_f, at) <= 1e-7);
    CHECK(check_composition(exp_f, tanh_f, at) <= 1e-7);
    CHECK(check_composition(mob, exp_f, at) <= 1e-12);
    CHECK(check_composition(tan_f, identity, at) <= 1e-12);
  }
}

TEST_CASE("projective parameter of constant q") {
  const ProjectiveParameter flat([](double) { return 0.0; }, -5.0, 7.0, 1.0);
  for (double s : {-5.0, -1.0, 1.0, 3.3, 7.0}) CHECK(flat.pi(s) == doctest::Approx(s - 1.0).epsilon(1e-13));
  CHECK(flat.poles().empty());

  const ProjectiveParameter hyperbolic([](double) { return -2.0; }, -3.0, 4.0, 0.0);
  for (double s = -3.0; s <= 4.0; s += 0.25)
    CHECK(std::abs(hyperbolic.pi(s) - std::tanh(s)) <= 1e-12);
  CHECK(hyperbolic.wronskian_drift() <= 1e-8);
  CHECK(hyperbolic.schwarzian_residual() <= 1e-5);
  CHECK(hyperbolic.inverse(0.5) == doctest::Approx(std::atanh(0.5)).epsilon(1e-12));
  const auto range = hyperbolic.chart_range();
  CHECK(range.first == doctest::Approx(std::tanh(-3.0)));
  CHECK(range.second == doctest::Approx(std::tanh(4.0)));
  CHECK_THROWS_AS(hyperbolic.inverse(0.99999), ChartError);

  const ProjectiveParameter spherical([](double) { return 2.0; }, -2.0, 2.0, 0.0);
  REQUIRE(spherical.poles().size() == 2);
  CHECK(spherical.poles()[0] == doctest::Approx(-std::numbers::pi / 2).epsilon(1e-12));
  CHECK(spherical.poles()[1] == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
  for (double s = -1.5; s <= 1.5; s += 0.1)
    CHECK(std::abs(spherical.pi(s) - std::tan(s)) <= 1e-6 * std::max(1.0, std::abs(std::tan(s))));
  CHECK(std::isinf(spherical.chart_range().first));
  CHECK(std::isinf(spherical.chart_range().second));
  CHECK(spherical.inverse(100.0) == doctest::Approx(std::atan(100.0)).epsilon(1e-10));
  CHECK(spherical.schwarzian_residual() <= 1e-5);
  CHECK(spherical.wronskian_drift() <= 1e-8);
  CHECK_THROWS_AS(spherical.pi(spherical.poles()[1]), ChartError);
  CHECK_THROWS_AS(ProjectiveParameter([](double) { return 0.0; }, 0.0, 1.0, 2.0), UsageError);

  const auto rows = hyperbolic.table(0.5);
  CHECK(rows.front().s == -3.0);
  CHECK(rows.back().s == 4.0);
  CHECK(rows[6].pi == doctest::Approx(0.0));
}

TEST_CASE("projective parameters of model geodesics") {
  const KleinMetric klein(2);
  const EuclideanMetric euclid(2);
  const QuadraticFunkMetric funk(QuadraticDomainSpec::unit_ball(2, 1.0));
  const Vector origin = vec({0.0, 0.0});
  const Vector dir = vec({0.6, 0.8});

  const auto ks = extend_geodesic(klein, origin, dir);
  const auto kp = projective_parameter(klein, ks);
  double worst = 0.0;
  for (double s = ks.s_begin() + 0.5; s < ks.s_end() - 0.5; s += 0.1)
    worst = std::max(worst, std::abs(kp.pi(s) - std::tanh(s)));
  CHECK(worst <= 1e-6);
  CHECK(kp.wronskian_drift() <= 1e-8);
  CHECK(kp.schwarzian_residual(21) <= 1e-5);

  const auto es = extend_geodesic(euclid, vec({0.2, 0.1}), dir);
  const auto ep = projective_parameter(euclid, es, 0.0);
  CHECK(es.s_begin() == -50.0);
  for (double s : {-50.0, -10.0, 0.0, 3.0, 50.0}) CHECK(ep.pi(s) == doctest::Approx(s).epsilon(1e-12));

  const auto fs = extend_geodesic(funk, origin, dir);
  const auto fp = projective_parameter(funk, fs);
  worst = 0.0;
  for (double s = fs.s_begin() + 0.5; s < fs.s_end() - 0.5; s += 0.1)
    worst = std::max(worst, std::abs(fp.pi(s) - 2.0 * std::tanh(0.5 * s)));
  CHECK(worst <= 1e-6);
  CHECK(fp.schwarzian_residual(21) <= 1e-5);
  CHECK_THROWS_AS(projective_parameter(IntervalFunkMetric(1.0), extend_geodesic(
                      IntervalFunkMetric(1.0), vec({0.0}), vec({1.0}), 2.0)),
                  DimensionError);
}

TEST_CASE("projective parameter gauge covariance") {
  const KleinMetric klein(3);
  const auto seg = extend_geodesic(klein, vec({0.1, -0.2, 0.3}), vec({1.0, 0.5, -0.2}));
  const auto p0 = projective_parameter(klein, seg, 0.0);
  const auto p1 = projective_parameter(klein, seg, 1.3);
  const double s[4] = {-1.0, 0.2, 0.9, 2.1};
  const double a = cross_ratio(p0.pi(s[0]), p0.pi(s[1]), p0.pi(s[2]), p0.pi(s[3]));
  const double b = cross_ratio(p1.pi(s[0]), p1.pi(s[1]), p1.pi(s[2]), p1.pi(s[3]));
  CHECK(std::abs(a - b) <= 1e-8);
}

TEST_CASE("projective invariance across metrics") {
  const KleinMetric klein(2);
  const EuclideanMetric euclid(2);
  const QuadraticFunkMetric funk(QuadraticDomainSpec::unit_ball(2, 1.0));
  const Vector x0 = vec({-0.3, 0.1});
  const Vector dir = vec({1.0, 0.4});
  std::array<Vector, 4> probes;
  const double lambda[4] = {-0.4, 0.1, 0.5, 0.9};
  for (int i = 0; i < 4; ++i) probes[i] = x0 + lambda[i] * dir;
  const auto same = invariance_cross_check(klein, klein, x0, dir, probes);
  CHECK(same.residual == 0.0);
  CHECK(invariance_cross_check(klein, funk, x0, dir, probes).residual <= 1e-5);
  CHECK(invariance_cross_check(klein, euclid, x0, dir, probes).residual <= 1e-5);
  CHECK(invariance_cross_check(funk, euclid, x0, dir, probes).residual <= 1e-5);
  std::array<Vector, 4> off = probes;
  off[2] = off[2] + vec({0.0, 0.01});
  CHECK_THROWS_AS(invariance_cross_check(klein, funk, x0, dir, off), UsageError);
}
