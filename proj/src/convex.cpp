#include "mink/convex.hpp"

#include <algorithm>

namespace mink {

namespace {

void check_dim(const Vec& v, int dim, const char* what) {
  if (int(v.size()) != dim)
    throw ConfigError(std::string(what) + ": dimension mismatch");
}

// Stabilized (modified) Gram-Schmidt; rejects near-dependent inputs.
std::vector<Vec> orthonormalize(std::vector<Vec> basis, int dim) {
  for (std::size_t i = 0; i < basis.size(); ++i) {
    check_dim(basis[i], dim, "basis vector");
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t j = 0; j < i; ++j) {
        double c = dot(basis[i], basis[j]);
        for (int d = 0; d < dim; ++d) basis[i][d] -= c * basis[j][d];
      }
    double n = norm(basis[i]);
    if (n < 1e-12)
      throw ConfigError("ball basis vectors are not independent");
    basis[i] = scaled(basis[i], 1.0 / n);
  }
  if (basis.size() > std::size_t(dim))
    throw ConfigError("ball basis has more vectors than ambient dimension");
  return basis;
}

}  // namespace

StructuringElement StructuringElement::singleton(Vec p) {
  StructuringElement q;
  q.kind_ = BodyKind::Singleton;
  q.dim_ = int(p.size());
  q.a_ = std::move(p);
  return q;
}

StructuringElement StructuringElement::segment(Vec a, Vec b) {
  if (a.size() != b.size()) throw ConfigError("segment: dimension mismatch");
  StructuringElement q;
  q.kind_ = BodyKind::Segment;
  q.dim_ = int(a.size());
  q.a_ = std::move(a);
  q.b_ = std::move(b);
  return q;
}

StructuringElement StructuringElement::polytope(std::vector<Vec> vertices) {
  if (vertices.empty()) throw ConfigError("polytope: empty vertex list");
  StructuringElement q;
  q.kind_ = BodyKind::PolytopeHull;
  q.dim_ = int(vertices[0].size());
  for (const Vec& v : vertices) check_dim(v, q.dim_, "polytope vertex");
  q.vertices_ = std::move(vertices);
  return q;
}

StructuringElement StructuringElement::ball(Vec center, double radius,
                                            std::vector<Vec> basis) {
  if (radius < 0) throw ConfigError("ball: negative radius");
  StructuringElement q;
  q.kind_ = BodyKind::BallInSubspace;
  q.dim_ = int(center.size());
  q.basis_ = orthonormalize(std::move(basis), q.dim_);
  q.a_ = std::move(center);
  q.radius_ = radius;
  return q;
}

StructuringElement StructuringElement::ball(Vec center, double radius) {
  int n = int(center.size());
  std::vector<Vec> basis(n, Vec(n, 0.0));
  for (int i = 0; i < n; ++i) basis[i][i] = 1.0;
  return ball(std::move(center), radius, std::move(basis));
}

Vec StructuringElement::project_onto_span(const Vec& v) const {
  Vec p(dim_, 0.0);
  for (const Vec& b : basis_) {
    double c = dot(v, b);
    for (int d = 0; d < dim_; ++d) p[d] += c * b[d];
  }
  return p;
}

double StructuringElement::support(const Vec& v) const {
  check_dim(v, dim_, "support direction");
  switch (kind_) {
    case BodyKind::Singleton:
      return dot(a_, v);
    case BodyKind::Segment:
      return std::max(dot(a_, v), dot(b_, v));
    case BodyKind::PolytopeHull: {
      double best = dot(vertices_[0], v);
      for (std::size_t i = 1; i < vertices_.size(); ++i)
        best = std::max(best, dot(vertices_[i], v));
      return best;
    }
    case BodyKind::BallInSubspace:
      return dot(a_, v) + radius_ * norm(project_onto_span(v));
  }
  return 0;
}

double StructuringElement::support_star(const Vec& v) const {
  return std::max(0.0, support(v));
}

double StructuringElement::axis_extent(int axis) const {
  Vec e(dim_, 0.0);
  e[axis] = 1.0;
  double hi = support(e);
  e[axis] = -1.0;
  double lo = support(e);
  return std::max(std::abs(hi), std::abs(lo));
}

double StructuringElement::diameter() const {
  switch (kind_) {
    case BodyKind::Singleton:
      return 0;
    case BodyKind::Segment:
      return dist(a_, b_);
    case BodyKind::PolytopeHull: {
      double best = 0;
      for (std::size_t i = 0; i < vertices_.size(); ++i)
        for (std::size_t j = i + 1; j < vertices_.size(); ++j)
          best = std::max(best, dist(vertices_[i], vertices_[j]));
      return best;
    }
    case BodyKind::BallInSubspace:
      return 2.0 * radius_;
  }
  return 0;
}

SymmetricBody symmetral(const StructuringElement& q) {
  const int n = q.dim();
  switch (q.kind()) {
    case BodyKind::Singleton:
      return {StructuringElement::singleton(Vec(n, 0.0))};
    case BodyKind::Segment: {
      Vec half = scaled(sub(q.point_b(), q.point_a()), 0.5);
      return {StructuringElement::segment(negated(half), half)};
    }
    case BodyKind::PolytopeHull: {
      const auto& vs = q.vertices();
      std::vector<Vec> diffs;
      diffs.reserve(vs.size() * vs.size());
      for (const Vec& vi : vs)
        for (const Vec& vj : vs) diffs.push_back(scaled(sub(vi, vj), 0.5));
      return {StructuringElement::polytope(std::move(diffs))};
    }
    case BodyKind::BallInSubspace:
      return {StructuringElement::ball(Vec(n, 0.0), q.radius(), q.basis())};
  }
  throw ConfigError("symmetral: unknown body kind");
}

StructuringElement scale(const StructuringElement& q, double r) {
  if (r < 0) throw ConfigError("scale: negative factor rejected");
  const int n = q.dim();
  if (r == 0)
    // 0*Q = {0} by convention; keeps r -> r*Q continuous at 0.
    return StructuringElement::singleton(Vec(n, 0.0));
  switch (q.kind()) {
    case BodyKind::Singleton:
      return StructuringElement::singleton(scaled(q.point_a(), r));
    case BodyKind::Segment:
      return StructuringElement::segment(scaled(q.point_a(), r),
                                         scaled(q.point_b(), r));
    case BodyKind::PolytopeHull: {
      std::vector<Vec> vs;
      vs.reserve(q.vertices().size());
      for (const Vec& v : q.vertices()) vs.push_back(scaled(v, r));
      return StructuringElement::polytope(std::move(vs));
    }
    case BodyKind::BallInSubspace:
      return StructuringElement::ball(scaled(q.center(), r), r * q.radius(),
                                      q.basis());
  }
  throw ConfigError("scale: unknown body kind");
}

StructuringElement translate(const StructuringElement& q, const Vec& t) {
  if (int(t.size()) != q.dim())
    throw ConfigError("translate: dimension mismatch");
  switch (q.kind()) {
    case BodyKind::Singleton:
      return StructuringElement::singleton(add(q.point_a(), t));
    case BodyKind::Segment:
      return StructuringElement::segment(add(q.point_a(), t),
                                         add(q.point_b(), t));
    case BodyKind::PolytopeHull: {
      std::vector<Vec> vs;
      vs.reserve(q.vertices().size());
      for (const Vec& v : q.vertices()) vs.push_back(add(v, t));
      return StructuringElement::polytope(std::move(vs));
    }
    case BodyKind::BallInSubspace:
      return StructuringElement::ball(add(q.center(), t), q.radius(),
                                      q.basis());
  }
  throw ConfigError("translate: unknown body kind");
}

StructuringElement minkowski_sum_hull(const StructuringElement& p1,
                                      const StructuringElement& p2) {
  if (p1.kind() != BodyKind::PolytopeHull || p2.kind() != BodyKind::PolytopeHull)
    throw ConfigError("minkowski_sum_hull: both arguments must be polytopes");
  if (p1.dim() != p2.dim())
    throw ConfigError("minkowski_sum_hull: dimension mismatch");
  std::vector<Vec> sums;
  sums.reserve(p1.vertices().size() * p2.vertices().size());
  for (const Vec& a : p1.vertices())
    for (const Vec& b : p2.vertices()) sums.push_back(add(a, b));
  return StructuringElement::polytope(std::move(sums));
}

}  // namespace mink
