#include "mink/surface.hpp"

#include <algorithm>

#include "mink/nets.hpp"

namespace mink {

namespace {

void finalize_diagnostics(DiscreteSurfaceMeasure& m) {
  Vec s = m.weighted_normal_sum();
  m.closedness_defect = norm(s);
  m.closed = m.closedness_defect <= 1e-8 * std::max(m.total_mass(), 1e-300);
}

bool segments_properly_intersect(const Vec& a, const Vec& b, const Vec& c,
                                 const Vec& d) {
  auto cross = [](const Vec& o, const Vec& p, const Vec& q) {
    return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0]);
  };
  double d1 = cross(c, d, a), d2 = cross(c, d, b);
  double d3 = cross(a, b, c), d4 = cross(a, b, d);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
         ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

double DiscreteSurfaceMeasure::total_mass() const {
  KahanSum s;
  for (double w : weights) s.add(w);
  return s.value();
}

Vec DiscreteSurfaceMeasure::weighted_normal_sum() const {
  Vec s(dim, 0.0);
  for (std::size_t i = 0; i < normals.size(); ++i)
    for (int d = 0; d < dim; ++d) s[d] += weights[i] * normals[i][d];
  return s;
}

DiscreteSurfaceMeasure polygon_surface_measure(
    const std::vector<Vec>& vertices) {
  if (vertices.size() < 3)
    throw ConfigError("polygon_surface_measure: need at least 3 vertices");
  std::vector<Vec> vs = vertices;
  for (const Vec& v : vs)
    if (v.size() != 2)
      throw ConfigError("polygon_surface_measure: vertices must be 2D");

  // Shoelace: positive means CCW.
  double area2 = 0;
  const std::size_t m = vs.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec& p = vs[i];
    const Vec& q = vs[(i + 1) % m];
    area2 += p[0] * q[1] - q[0] * p[1];
  }
  if (std::abs(area2) < 1e-14)
    throw ConfigError("polygon_surface_measure: degenerate (zero area) input");
  bool reversed = false;
  if (area2 < 0) {
    std::reverse(vs.begin(), vs.end());
    reversed = true;
  }

  for (std::size_t i = 0; i < m; ++i)
    if (dist(vs[i], vs[(i + 1) % m]) < 1e-14)
      throw ConfigError("polygon_surface_measure: zero-length edge");

  // O(m^2) non-adjacent edge pair check; polygons here are small.
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      if (j == i + 1 || (i == 0 && j == m - 1)) continue;
      if (segments_properly_intersect(vs[i], vs[(i + 1) % m], vs[j],
                                      vs[(j + 1) % m]))
        throw ConfigError("polygon_surface_measure: self-intersecting input");
    }

  DiscreteSurfaceMeasure out;
  out.dim = 2;
  out.kind = MeasureKind::ExactPolytopal;
  out.reversed_input = reversed;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec& p = vs[i];
    const Vec& q = vs[(i + 1) % m];
    Vec e = sub(q, p);
    double len = norm(e);
    // Outward normal of a CCW polygon: edge rotated by -90 degrees.
    out.normals.push_back({e[1] / len, -e[0] / len});
    out.weights.push_back(len);
  }
  finalize_diagnostics(out);
  return out;
}

DiscreteSurfaceMeasure mesh_surface_measure(
    const std::vector<std::array<Vec, 3>>& triangles) {
  DiscreteSurfaceMeasure out;
  out.dim = 3;
  out.kind = MeasureKind::ExactPolytopal;
  for (const auto& t : triangles) {
    Vec u = sub(t[1], t[0]);
    Vec v = sub(t[2], t[0]);
    Vec c = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
             u[0] * v[1] - u[1] * v[0]};
    double area = 0.5 * norm(c);
    if (area < 1e-15) {
      ++out.degenerate_dropped;
      continue;
    }
    out.normals.push_back(scaled(c, 0.5 / area));
    out.weights.push_back(area);
  }
  if (out.weights.empty())
    throw ConfigError("mesh_surface_measure: no non-degenerate triangles");
  finalize_diagnostics(out);
  return out;
}

DiscreteSurfaceMeasure sphere_surface_measure(double rho, int level) {
  if (rho <= 0) throw ConfigError("sphere_surface_measure: rho must be > 0");
  if (level < 1) throw ConfigError("sphere_surface_measure: level must be >= 1");
  std::size_t n = 1000;
  for (int i = 1; i < level; ++i) n *= 4;
  DiscreteSurfaceMeasure out;
  out.dim = 3;
  out.kind = MeasureKind::Quadrature;
  out.normals = fibonacci_sphere(n);
  // Equal weights rescaled so the total is exactly 4*pi*rho^2.
  out.weights.assign(n, 4.0 * kPi * rho * rho / double(n));
  finalize_diagnostics(out);
  return out;
}

DiscreteSurfaceMeasure disjoint_union_measure(
    const std::vector<DiscreteSurfaceMeasure>& parts) {
  DiscreteSurfaceMeasure out;
  if (parts.empty()) {
    out.dim = 0;
    return out;
  }
  out.dim = parts[0].dim;
  out.kind = parts[0].kind;
  for (const auto& p : parts) {
    if (p.dim != out.dim)
      throw ConfigError("disjoint_union_measure: dimension mismatch");
    if (p.kind != out.kind) out.kind = MeasureKind::Quadrature;
    out.normals.insert(out.normals.end(), p.normals.begin(), p.normals.end());
    out.weights.insert(out.weights.end(), p.weights.begin(), p.weights.end());
    out.degenerate_dropped += p.degenerate_dropped;
  }
  finalize_diagnostics(out);
  return out;
}

double anisotropic_perimeter(const DiscreteSurfaceMeasure& s,
                             const StructuringElement& q) {
  if (s.dim != q.dim())
    throw ConfigError("anisotropic_perimeter: dimension mismatch");
  KahanSum acc;
  for (std::size_t i = 0; i < s.normals.size(); ++i)
    acc.add(s.weights[i] * q.support_star(s.normals[i]));
  return acc.value();
}

DiscreteSurfaceMeasure reflect_measure(const DiscreteSurfaceMeasure& s) {
  DiscreteSurfaceMeasure out = s;
  for (Vec& v : out.normals) v = negated(v);
  Vec sum = out.weighted_normal_sum();
  out.closedness_defect = norm(sum);
  return out;
}

}  // namespace mink
