#include <doctest.h>

#include "finsler/diffengine.hpp"
#include "finsler/metrics.hpp"

#include <cmath>
#include <random>

#include "test_helpers.hpp"

using namespace finsler;
using testing::random_direction;
using testing::random_in_ball;
using testing::vec;

namespace {

// Funk metric of the unit ball written independently of the quadratic recipe.
double ball_funk(const Vector& x, const Vector& y) {
  const double phi = 1.0 - x.squaredNorm();
  const double xy = x.dot(y);
  return (std::sqrt(phi * y.squaredNorm() + xy * xy) + xy) / phi;
}

QuadraticDomainSpec random_ellipsoid(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = u(rng);
  Matrix pd = m * m.transpose() + 0.5 * Matrix::Identity(n, n);
  Vector beta(n);
  for (int i = 0; i < n; ++i) beta[i] = 0.3 * u(rng);
  return {-pd, beta, 1.0 + std::abs(u(rng)), 1.0};
}

}  // namespace

TEST_CASE("quadratic Funk on the unit ball matches the ball closed form") {
  const auto funk = funk_from_quadratic(QuadraticDomainSpec::unit_ball(2));
  CHECK(funk.evaluate(vec({0.5, 0.0}), vec({1.0, 0.0})) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(funk.evaluate(vec({0.5, 0.0}), vec({1.0, 0.0})) - 2.0) <= 1e-12);
  CHECK(funk.evaluate(vec({0.0, 0.0}), vec({3.0, 4.0})) == doctest::Approx(5.0).epsilon(1e-14));
  const Matrix a = funk.a_coefficients(vec({0.5, 0.0}));
  CHECK(a(0, 0) == doctest::Approx(16.0 / 9.0).epsilon(1e-14));
  CHECK(funk.b_coefficients(vec({0.5, 0.0}))[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  std::mt19937_64 rng(1);
  for (int n : {2, 3}) {
    const auto ball = funk_from_quadratic(QuadraticDomainSpec::unit_ball(n));
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
      const Vector x = random_in_ball(rng, n, 0.99);
      const Vector y = random_direction(rng, n) * 3.0;
      const double ref = ball_funk(x, y);
      worst = std::max(worst, std::abs(ball.evaluate(x, y) - ref) / ref);
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("quadratic Funk one-form is minus half the gradient of log phi") {
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 2;
    const auto spec = random_ellipsoid(rng, n);
    const QuadraticFunkMetric funk(spec);
    for (int s = 0; s < 20; ++s) {
      Vector x = random_in_ball(rng, n, 0.5);
      if (!funk.contains(x)) continue;
      // d/dx log(phi) by an independent central difference of log(phi).
      Vector grad(n);
      const double h = 1e-5;
      for (int j = 0; j < n; ++j) {
        Vector p = x, m = x;
        p[j] += h;
        m[j] -= h;
        grad[j] = (std::log(funk.domain_function(p)) - std::log(funk.domain_function(m))) / (2 * h);
      }
      // Exact gradient: 2(alpha x + beta)/phi; the difference quotient above is its check.
      const Vector exact = 2.0 * (spec.alpha * x + spec.beta) / funk.domain_function(x);
      CHECK((grad - exact).cwiseAbs().maxCoeff() <= 1e-7);
      worst = std::max(worst, (funk.b_coefficients(x) + 0.5 * exact).cwiseAbs().maxCoeff());
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("quadratic Funk construction errors") {
  auto spec = QuadraticDomainSpec::unit_ball(2);
  spec.gamma = -1.0;
  CHECK_THROWS_AS(funk_from_quadratic(spec), ConstructionError);
  const auto ball = funk_from_quadratic(QuadraticDomainSpec::unit_ball(2));
  CHECK_THROWS_AS(ball.evaluate(vec({1.0, 0.0}), vec({1.0, 0.0})), DomainError);
  CHECK_THROWS_AS(ball.evaluate(vec({0.1, 0.0, 0.0}), vec({1.0, 0.0, 0.0})), DimensionError);
  CHECK(ball.strictly_convex());
}

TEST_CASE("interval Funk evaluation") {
  CHECK(interval_funk_eval(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(interval_funk_eval(0.5, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(interval_funk_eval(0.5, -1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(interval_funk_eval(0.5, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(interval_funk_eval(1.0, 1.0), DomainError);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.99, 0.99);
  for (int i = 0; i < 200; ++i) {
    const double p = u(rng), y = 4.0 * u(rng);
    const double expected = y > 0 ? y / (1 - p) : -y / (1 + p);
    CHECK(interval_funk_eval(p, y) == doctest::Approx(expected).epsilon(1e-13));
  }
  const IntervalFunkMetric metric(1.0);
  CHECK(metric.evaluate(vec({0.5}), vec({-1.0})) == doctest::Approx(2.0 / 3.0));
  CHECK(fundamental_tensor(metric, vec({0.0}), vec({1.0}))(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("Randers examples") {
  const RandersMetric r({Matrix::Identity(2, 2), vec({0.5, 0.0}), Matrix()});
  CHECK(r.evaluate(vec({0.0, 0.0}), vec({1.0, 0.0})) == doctest::Approx(1.5));
  CHECK(r.evaluate(vec({0.0, 0.0}), vec({-1.0, 0.0})) == doctest::Approx(0.5));
  const RandersMetric plain({Matrix::Identity(2, 2), vec({0.0, 0.0}), Matrix()});
  CHECK(plain.evaluate(vec({0.3, 0.1}), vec({3.0, 4.0})) == doctest::Approx(5.0));
  CHECK_THROWS_AS(RandersMetric({Matrix::Identity(2, 2), vec({1.5, 0.0}), Matrix()}),
                  ConstructionError);

  // |b| = 1.5: scan for a line element where g_ij loses positive-definiteness.
  const auto bad = RandersMetric::unchecked({Matrix::Identity(2, 2), vec({1.5, 0.0}), Matrix()});
  std::vector<LineElement> samples;
  for (int i = 0; i < 36; ++i) {
    const double t = 2 * M_PI * i / 36.0;
    samples.push_back({vec({0.0, 0.0}), vec({std::cos(t), std::sin(t)})});
  }
  CHECK_FALSE(validate_strong_convexity(*bad, samples).pass());

  const RandersMetric rotating({Matrix::Identity(2, 2), vec({0.0, 0.0}),
                                (Matrix(2, 2) << 0.0, -0.5, 0.5, 0.0).finished()});
  CHECK(rotating.contains(vec({1.5, 0.0})));
  CHECK_FALSE(rotating.contains(vec({2.5, 0.0})));
}

TEST_CASE("fundamental tensor: analytic, jet and finite-difference routes agree") {
  CHECK(fundamental_tensor(EuclideanMetric(3), vec({1, 2, 3}), vec({0.1, 0.2, 0.3}))
            .isApprox(Matrix::Identity(3, 3)));
  const KleinMetric klein(2);
  CHECK(fundamental_tensor(klein, vec({0, 0}), vec({0.3, -1})).isApprox(Matrix::Identity(2, 2)));

  std::mt19937_64 rng(4);
  const auto funk = funk_from_quadratic(random_ellipsoid(rng, 3));
  const RandersMetric randers({Matrix::Identity(3, 3) * 2.0, vec({0.2, -0.3, 0.1}),
                               Matrix::Identity(3, 3) * 0.1});
  const std::vector<const FinslerStructure*> metrics = {&klein, &funk, &randers};
  for (const auto* m : metrics) {
    const int n = m->dimension();
    const CallableMetric black_box(n, "black-box", [m](const Vector& x, const Vector& y) {
      return m->evaluate(x, y);
    }, [m](const Vector& x) { return m->domain_function(x); });
    EngineConfig fd;
    fd.mode = DiffMode::finite_difference;
    for (int s = 0; s < 10; ++s) {
      Vector x = random_in_ball(rng, n, 0.3);
      if (!m->contains(x)) continue;
      const Vector y = random_direction(rng, n);
      const Matrix analytic = fundamental_tensor(*m, x, y);
      auto jets = seed_line_element(x, y, 2);
      const Jet f = m->evaluate_jet(jets.x, jets.y);
      const Jet half = 0.5 * f * f;
      Matrix from_jets(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          std::vector<int> alpha(2 * n, 0);
          alpha[n + i] += 1;
          alpha[n + j] += 1;
          from_jets(i, j) = half.derivative(alpha);
        }
      CHECK((analytic - from_jets).cwiseAbs().maxCoeff() <= 1e-12 * analytic.norm());
      const Matrix numeric = fundamental_tensor(black_box, x, y, fd);
      CHECK((analytic - numeric).cwiseAbs().maxCoeff() <= 1e-6 * analytic.norm());
      CHECK(numeric == numeric.transpose());
      // Zero-homogeneity in y.
      CHECK((fundamental_tensor(*m, x, 3.7 * y) - analytic).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
}

TEST_CASE("golden: x-derivative of the squared Funk ball norm") {
  // Symbolic differentiation of the ball closed form gives exactly 16.
  const auto funk = funk_from_quadratic(QuadraticDomainSpec::unit_ball(2));
  DerivativeRequest r{squared_norm_field(funk), {1, 0}, {0, 0}, vec({0.5, 0.0}), vec({1.0, 0.0})};
  CHECK(partial(r) == doctest::Approx(16.0).epsilon(1e-12));
  EngineConfig fd;
  fd.mode = DiffMode::finite_difference;
  CHECK(partial(r, fd) == doctest::Approx(16.0).epsilon(1e-8));
}

TEST_CASE("every shipped metric is homogeneous and strongly convex") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lam(0.1, 10.0);
  const EuclideanMetric euclid(2);
  const KleinMetric klein(3);
  const auto funk = funk_from_quadratic(QuadraticDomainSpec::unit_ball(2));
  const RandersMetric randers({Matrix::Identity(2, 2), vec({0.5, 0.0}), Matrix()});
  const IntervalFunkMetric interval(2.0);
  const std::vector<const FinslerStructure*> metrics = {&euclid, &klein, &funk, &randers, &interval};
  for (const auto* m : metrics) {
    const auto elements = sample_line_elements(*m, 1000, 0.95, 17);
    std::vector<HomogeneitySample> samples;
    for (const auto& e : elements) samples.push_back({e.x, e.y, lam(rng)});
    const auto h = validate_homogeneity(*m, samples);
    CHECK(h.pass());
    CHECK(h.checks[0].max_residual <= 1e-12);
    CHECK(validate_strong_convexity(*m, elements).pass());
  }
  const CallableMetric squared(2, "squared", [](const Vector&, const Vector& y) {
    return y.squaredNorm();
  });
  const std::vector<HomogeneitySample> s = {{vec({0, 0}), vec({1, 1}), 2.0}};
  CHECK_FALSE(validate_homogeneity(squared, s).pass());
}

TEST_CASE("arc length examples") {
  const EuclideanMetric euclid(2);
  CHECK(arc_length(euclid, Curve::segment(vec({0, 0}), vec({1, 0})), 0, 1) ==
        doctest::Approx(1.0).epsilon(1e-14));
  const IntervalFunkMetric interval(1.0);
  const double forward = arc_length(interval, Curve::segment(vec({0}), vec({0.5})), 0, 1);
  const double backward = arc_length(interval, Curve::segment(vec({0.5}), vec({0})), 0, 1);
  CHECK(std::abs(forward - std::log(2.0)) <= 1e-12);
  CHECK(std::abs(backward - std::log(1.5)) <= 1e-12);

  // Additivity over a split parameter range, on a curved path.
  const auto funk = funk_from_quadratic(QuadraticDomainSpec::unit_ball(2));
  Curve arc;
  arc.position = [](double t) { return vec({0.6 * std::cos(t), 0.6 * std::sin(t)}); };
  arc.velocity = [](double t) { return vec({-0.6 * std::sin(t), 0.6 * std::cos(t)}); };
  const double whole = arc_length(funk, arc, 0.0, 2.0);
  CHECK(whole == doctest::Approx(arc_length(funk, arc, 0.0, 0.7) + arc_length(funk, arc, 0.7, 2.0))
                     .epsilon(1e-12));
  // On a circle about the centre <x, y> = 0 so F = |y| / sqrt(1 - r^2).
  CHECK(whole == doctest::Approx(2.0 * 0.6 / std::sqrt(1 - 0.36)).epsilon(1e-12));

  const auto poly = Curve::polyline({0.0, 1.0, 3.0}, {vec({0, 0}), vec({1, 0}), vec({1, 2})});
  CHECK(arc_length(euclid, poly, 0.0, 3.0) == doctest::Approx(3.0).epsilon(1e-13));
}
