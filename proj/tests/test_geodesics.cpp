#include <doctest.h>

#include "finsler/geodesics.hpp"
#include "finsler/metrics.hpp"

#include <cmath>
#include <random>

#include "test_helpers.hpp"

using namespace finsler;
using testing::random_direction;
using testing::random_in_ball;
using testing::vec;

namespace {

// Funk ball from its closed form, without an analytic spray: forces the
// Christoffel route on jets.
class FunkBallExpression final : public ExpressionMetric<FunkBallExpression> {
 public:
  FunkBallExpression() : ExpressionMetric(2) {}
  std::string name() const override { return "funk-ball-expression"; }
  double domain_function(const Vector& x) const override { return 1.0 - x.squaredNorm(); }
  template <class T>
  T norm_expression(std::span<const T> x, std::span<const T> y) const {
    const T phi = 1.0 - x[0] * x[0] - x[1] * x[1];
    const T xy = x[0] * y[0] + x[1] * y[1];
    using std::sqrt;
    return (sqrt(phi * (y[0] * y[0] + y[1] * y[1]) + xy * xy) + xy) / phi;
  }
};

double distance_to_line(const Vector& p, const Vector& a, const Vector& b) {
  const Vector d = (b - a).normalized();
  const Vector r = p - a;
  return (r - r.dot(d) * d).norm();
}

}  // namespace

TEST_CASE("spray examples") {
  CHECK(spray(EuclideanMetric(2), vec({0.3, 0.2}), vec({1, 2})).G.norm() == 0.0);
  const KleinMetric klein(2);
  CHECK(spray(klein, vec({0, 0}), vec({0.4, -1.3})).G.norm() <= 1e-15);

  const auto funk = funk_from_quadratic(QuadraticDomainSpec::unit_ball(2));
  const Vector x = vec({0.5, 0.0});
  const Vector y = vec({1.0, 0.0});
  const Vector analytic = spray(funk, x, y).G;
  CHECK(analytic[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(analytic[1]) <= 1e-15);

  // Independent routes: Christoffel symbols on jets, and finite differences
  // of a black-box norm.
  const FunkBallExpression expression;
  const Vector via_jets = spray(expression, x, y).G;
  CHECK((via_jets - analytic).norm() <= 1e-12);
  const CallableMetric black_box(2, "black-box", [&](const Vector& px, const Vector& py) {
    return funk.evaluate(px, py);
  }, [](const Vector& px) { return 1.0 - px.squaredNorm(); });
  EngineConfig fd;
  fd.mode = DiffMode::finite_difference;
  CHECK((spray_value(black_box, x, y, fd) - analytic).norm() <= 1e-6);
}

TEST_CASE("spray: analytic forms agree with the Christoffel route everywhere") {
  std::mt19937_64 rng(21);
  const FunkBallExpression expression;
  const auto funk = funk_from_quadratic(QuadraticDomainSpec::unit_ball(2));
  const KleinMetric klein(2);
  const RiemannianMetric klein_tensor({2, [&](const Vector& x) {
    return *klein.analytic_fundamental_tensor(x, vec({1, 0}));
  }, {}, [](const Vector& x) { return 1.0 - x.squaredNorm(); }, "klein-tensor"});
  for (int s = 0; s < 50; ++s) {
    const Vector x = random_in_ball(rng, 2, 0.9);
    const Vector y = random_direction(rng, 2);
    const auto a = spray(funk, x, y);
    const auto b = spray(expression, x, y);
    CHECK((a.G - b.G).norm() <= 1e-10 * std::max(1.0, a.G.norm()));
    CHECK((a.jacobian - b.jacobian).norm() <= 1e-10 * std::max(1.0, a.jacobian.norm()));
    const Vector k = spray_value(klein, x, y);
    CHECK((spray_value(klein_tensor, x, y) - k).norm() <= 1e-6 * std::max(1.0, k.norm()));
  }
}

TEST_CASE("spray is positively 2-homogeneous and its Jacobian matches") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> lam(0.1, 10.0);
  const KleinMetric klein(3);
  const auto funk = funk_from_quadratic(QuadraticDomainSpec::unit_ball(2));
  const RandersMetric randers({Matrix::Identity(2, 2), vec({0.1, 0.0}),
                               (Matrix(2, 2) << 0.0, -0.3, 0.3, 0.0).finished()});
  const IntervalFunkMetric interval(1.5);
  const std::vector<const FinslerStructure*> metrics = {&klein, &funk, &randers, &interval};
  for (const auto* m : metrics) {
    const auto elements = sample_line_elements(*m, 1000, 0.9, 23);
    double worst = 0.0;
    for (const auto& e : elements) {
      const double l = lam(rng);
      const Vector g = spray_value(*m, e.x, e.y);
      const Vector gl = spray_value(*m, e.x, l * e.y);
      worst = std::max(worst, (gl - l * l * g).norm() / std::max(1.0, l * l * g.norm()));
    }
    CHECK(worst <= 1e-7);
    // Euler relation N^i_j y^j = 2 G^i.
    for (std::size_t s = 0; s < 20; ++s) {
      const auto d = spray(*m, elements[s].x, elements[s].y);
      CHECK((d.jacobian * elements[s].y - 2.0 * d.G).norm() <= 1e-9 * std::max(1.0, d.G.norm()));
    }
  }
}

TEST_CASE("integrate_geodesic examples") {
  const EuclideanMetric euclid(2);
  const auto e = integrate_geodesic(euclid, vec({0, 0}), vec({1, 0}), 1.0);
  CHECK((e.position(1.0) - vec({1, 0})).norm() <= 1e-12);

  const KleinMetric klein(2);
  const auto k = integrate_geodesic(klein, vec({0, 0}), vec({1, 0}), std::atanh(0.5));
  CHECK((k.position(k.s_end()) - vec({0.5, 0})).norm() <= 1e-6);
  CHECK(std::abs(k.position(k.s_end())[0] - 0.5) <= 1e-10);

  // Backward direction from the same point.
  const auto back = integrate_geodesic(klein, vec({0, 0}), vec({1, 0}), -std::atanh(0.5));
  CHECK(std::abs(back.position(back.s_begin())[0] + 0.5) <= 1e-10);
}

TEST_CASE("geodesics of projectively flat metrics are chords; unit speed is conserved") {
  std::mt19937_64 rng(24);
  const KleinMetric klein(2);
  const auto funk = funk_from_quadratic(QuadraticDomainSpec::unit_ball(2));
  const EuclideanMetric euclid(2);
  const RandersMetric randers({Matrix::Identity(2, 2), vec({0.3, 0.1}), Matrix()});
  const std::vector<const FinslerStructure*> flat = {&klein, &funk, &euclid, &randers};
  for (const auto* m : flat) {
    for (int trial = 0; trial < 5; ++trial) {
      const Vector x0 = random_in_ball(rng, 2, 0.6);
      const Vector y0 = random_direction(rng, 2);
      const auto seg = integrate_geodesic(*m, x0, y0, 10.0);
      double collinear = 0.0;
      for (const auto& s : seg.samples())
        collinear = std::max(collinear, distance_to_line(s.x, x0, x0 + y0));
      CHECK(collinear <= 1e-6);
      CHECK(unit_speed_drift(*m, seg) <= 1e-7);
    }
  }
  const RandersMetric rotating({Matrix::Identity(2, 2), vec({0.0, 0.0}),
                                (Matrix(2, 2) << 0.0, -0.3, 0.3, 0.0).finished()});
  const auto curved = integrate_geodesic(rotating, vec({0, 0}), vec({1, 0}), 2.0);
  CHECK(unit_speed_drift(rotating, curved) <= 1e-7);
  CHECK(std::abs(curved.position(2.0)[1]) > 1e-3);
}

TEST_CASE("maximal extension stops at the boundary margin") {
  const KleinMetric klein(2);
  const auto seg = extend_geodesic(klein, vec({0, 0}), vec({1, 0}));
  CHECK(seg.truncated_begin());
  CHECK(seg.truncated_end());
  CHECK(klein.domain_function(seg.position(seg.s_end())) == doctest::Approx(1e-6).epsilon(1e-3));
  CHECK(seg.s_end() == doctest::Approx(std::atanh(std::sqrt(1 - 1e-6))).epsilon(1e-8));
  const EuclideanMetric euclid(2);
  const auto line = extend_geodesic(euclid, vec({0, 0}), vec({0, 2}));
  CHECK_FALSE(line.truncated());
  CHECK(line.s_begin() == -50.0);
  CHECK(line.s_end() == 50.0);
}

TEST_CASE("connect and finsler_distance") {
  const EuclideanMetric euclid(2);
  CHECK(finsler_distance(euclid, vec({0, 0}), vec({1, 1})) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  const KleinMetric klein(2);
  CHECK(std::abs(finsler_distance(klein, vec({0, 0}), vec({0.5, 0})) - std::atanh(0.5)) <= 1e-6);
  CHECK(std::abs(finsler_distance(klein, vec({0.5, 0}), vec({0, 0})) - std::atanh(0.5)) <= 1e-6);
  const auto funk = funk_from_quadratic(QuadraticDomainSpec::unit_ball(2));
  CHECK(std::abs(finsler_distance(funk, vec({0, 0}), vec({0.5, 0})) - std::log(2.0)) <= 1e-6);
  CHECK(std::abs(finsler_distance(funk, vec({0.5, 0}), vec({0, 0})) - std::log(1.5)) <= 1e-6);
  CHECK(finsler_distance(funk, vec({0.2, 0.1}), vec({0.2, 0.1})) == 0.0);

  const auto bvp = connect(funk, vec({-0.3, 0.2}), vec({0.4, -0.5}));
  CHECK(bvp.miss <= 1e-9);
  CHECK(unit_speed_drift(funk, bvp.segment) <= 1e-7);

  const RandersMetric rotating({Matrix::Identity(2, 2), vec({0.0, 0.0}),
                                (Matrix(2, 2) << 0.0, -0.3, 0.3, 0.0).finished()});
  const auto curved = connect(rotating, vec({-0.5, 0.0}), vec({0.5, 0.3}));
  CHECK(curved.miss <= 1e-9);
}

TEST_CASE("oriented triangle inequality and projective flatness probe") {
  std::mt19937_64 rng(25);
  const KleinMetric klein(2);
  const auto funk = funk_from_quadratic(QuadraticDomainSpec::unit_ball(2));
  const std::vector<const FinslerStructure*> metrics = {&klein, &funk};
  for (const auto* m : metrics) {
    for (int t = 0; t < 10; ++t) {
      const Vector a = random_in_ball(rng, 2, 0.7);
      const Vector b = random_in_ball(rng, 2, 0.7);
      const Vector c = random_in_ball(rng, 2, 0.7);
      CHECK(finsler_distance(*m, a, c) <=
            finsler_distance(*m, a, b) + finsler_distance(*m, b, c) + 1e-6);
    }
  }
  const EuclideanMetric euclid(2);
  const std::vector<const FinslerStructure*> flat = {&klein, &funk, &euclid};
  for (int t = 0; t < 5; ++t) {
    const Vector a = random_in_ball(rng, 2, 0.7);
    const Vector b = random_in_ball(rng, 2, 0.7);
    for (const auto* m : flat) {
      const auto bvp = connect(*m, a, b);
      double hausdorff = 0.0;
      for (int i = 0; i <= 50; ++i) {
        const double s = bvp.segment.length() * i / 50.0;
        hausdorff = std::max(hausdorff, distance_to_line(bvp.segment.position(s), a, b));
      }
      CHECK(hausdorff <= 1e-5);
    }
  }
}
