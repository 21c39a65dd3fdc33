#pragma once

#include "finsler/types.hpp"

#include <initializer_list>
#include <random>

namespace testing {

inline finsler::Vector vec(std::initializer_list<double> v) {
  finsler::Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) out[i++] = e;
  return out;
}

/// Uniform point in the open ball of the given radius.
inline finsler::Vector random_in_ball(std::mt19937_64& rng, int n, double radius) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  finsler::Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  return v / v.norm() * radius * std::pow(uniform(rng), 1.0 / n);
}

inline finsler::Vector random_direction(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal;
  finsler::Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  return v / v.norm();
}

}  // namespace testing
