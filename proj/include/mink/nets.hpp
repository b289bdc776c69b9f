#pragma once

#include <cstddef>

#include "mink/common.hpp"

namespace mink {

// Deterministic direction nets used by property tests and quadrature.

inline std::vector<Vec> circle_net(std::size_t m = 360) {
  std::vector<Vec> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    double a = 2.0 * kPi * double(i) / double(m);
    out.push_back({std::cos(a), std::sin(a)});
  }
  return out;
}

// Fibonacci spiral point set on S^2; near-uniform, deterministic.
inline std::vector<Vec> fibonacci_sphere(std::size_t m = 1024) {
  std::vector<Vec> out;
  out.reserve(m);
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (std::size_t i = 0; i < m; ++i) {
    double z = 1.0 - (2.0 * double(i) + 1.0) / double(m);
    double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    double az = 2.0 * kPi * double(i) / golden;
    out.push_back({s * std::cos(az), s * std::sin(az), z});
  }
  return out;
}

inline std::vector<Vec> direction_net(int dim) {
  return dim == 2 ? circle_net() : fibonacci_sphere();
}

}  // namespace mink
