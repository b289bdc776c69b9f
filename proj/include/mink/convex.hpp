#pragma once

#include <optional>
#include <vector>

#include "mink/common.hpp"

namespace mink {

// Structuring elements: the compact convex bodies used as dilation kernels.
// Four variants cover everything the library needs, including
// lower-dimensional bodies (segments, balls inside a subspace).
//
// All values are immutable after construction and all operations are pure.

enum class BodyKind { Singleton, Segment, PolytopeHull, BallInSubspace };

class StructuringElement {
 public:
  static StructuringElement singleton(Vec p);
  static StructuringElement segment(Vec a, Vec b);
  // Convex hull of a finite point set. Redundant points are kept as-is;
  // support evaluation is a max over points and does not care.
  static StructuringElement polytope(std::vector<Vec> vertices);
  // Ball of radius `radius` around `center` inside center + span(basis).
  // basis holds k vectors, 0 <= k <= n; they are re-orthonormalized by
  // stabilized Gram-Schmidt and must be independent to tolerance 1e-12.
  // k == n gives the full-dimensional ball, k == 0 a singleton.
  static StructuringElement ball(Vec center, double radius,
                                 std::vector<Vec> basis);
  // Full-dimensional ball shorthand.
  static StructuringElement ball(Vec center, double radius);

  BodyKind kind() const { return kind_; }
  int dim() const { return dim_; }

  const Vec& point_a() const { return a_; }
  const Vec& point_b() const { return b_; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  const Vec& center() const { return a_; }
  double radius() const { return radius_; }
  const std::vector<Vec>& basis() const { return basis_; }

  // Projection onto span(basis); only meaningful for BallInSubspace.
  Vec project_onto_span(const Vec& v) const;

  // max over Q of <x,v>. Positively homogeneous in v.
  double support(const Vec& v) const;
  // h(Q u {0}, v) = max(0, support(v)).
  double support_star(const Vec& v) const;

  // Largest |coordinate| reach along axis i: max(|support(e_i)|, |support(-e_i)|).
  double axis_extent(int axis) const;
  double diameter() const;

 private:
  StructuringElement() = default;
  BodyKind kind_ = BodyKind::Singleton;
  int dim_ = 0;
  Vec a_, b_;                  // singleton point / segment ends / ball center
  std::vector<Vec> vertices_;  // polytope
  double radius_ = 0;
  std::vector<Vec> basis_;  // orthonormal, ball subspace
};

// Origin-symmetric body: support(v) == support(-v).
struct SymmetricBody {
  StructuringElement body;
  double support(const Vec& v) const { return body.support(v); }
};

// Symmetral (Q + (-Q))/2. Satisfies
//   support(sym, v) = (support(Q, v) + support(Q, -v)) / 2.
SymmetricBody symmetral(const StructuringElement& q);

// r*Q for r >= 0. r == 0 collapses to the singleton {0}.
StructuringElement scale(const StructuringElement& q, double r);
StructuringElement translate(const StructuringElement& q, const Vec& t);

// Vertex-level Minkowski sum of two polytopes (all pairwise sums, no
// pruning). Support functions add exactly.
StructuringElement minkowski_sum_hull(const StructuringElement& p1,
                                      const StructuringElement& p2);

}  // namespace mink
