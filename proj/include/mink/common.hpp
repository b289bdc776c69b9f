#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mink {

// Points and directions in R^2 / R^3 (and occasionally R^k for product
// constructions). Dimension is carried by the container size.
using Vec = std::vector<double>;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a requested computation would exceed a resource cap
// (kernel size, predicted packing count, ...).
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline Vec add(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec scaled(const Vec& a, double s) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

inline Vec negated(const Vec& a) { return scaled(a, -1.0); }

inline Vec unit(const Vec& a) {
  double n = norm(a);
  if (n == 0) throw ConfigError("cannot normalize a zero vector");
  return scaled(a, 1.0 / n);
}

inline double dist(const Vec& a, const Vec& b) { return norm(sub(a, b)); }

inline double dist_point_segment(const Vec& p, const Vec& a, const Vec& b) {
  Vec ab = sub(b, a);
  double l2 = norm2(ab);
  if (l2 == 0) return dist(p, a);
  double t = dot(sub(p, a), ab) / l2;
  t = std::max(0.0, std::min(1.0, t));
  return dist(p, add(a, scaled(ab, t)));
}

// Compensated (Kahan) accumulator. Summation order is fixed by the caller
// (index order) so results are reproducible bit-for-bit.
struct KahanSum {
  double sum = 0, c = 0;
  void add(double x) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

constexpr double kPi = 3.14159265358979323846;

}  // namespace mink
