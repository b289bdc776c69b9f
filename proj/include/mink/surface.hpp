#pragma once

#include <array>
#include <vector>

#include "mink/convex.hpp"

namespace mink {

// Discrete representation of the generalized surface area measure of a set:
// a list of weighted unit normals. Polytopal inputs give exact atoms (one
// per facet); spheres are represented by a deterministic quadrature net.
// Total mass equals the perimeter of the represented set.

enum class MeasureKind { ExactPolytopal, Quadrature };

struct DiscreteSurfaceMeasure {
  int dim = 0;
  MeasureKind kind = MeasureKind::ExactPolytopal;
  std::vector<Vec> normals;      // unit vectors
  std::vector<double> weights;   // positive, (n-1)-volume units

  // Diagnostics set by the constructors below.
  bool closed = true;            // ||sum w_i v_i|| <= 1e-8 * sum w_i
  double closedness_defect = 0;  // ||sum w_i v_i||
  int degenerate_dropped = 0;    // zero-area facets dropped (meshes)
  bool reversed_input = false;   // clockwise polygon auto-reversed

  double total_mass() const;
  Vec weighted_normal_sum() const;
};

// Simple CCW polygon -> one atom per edge (outward normal, edge length).
// Clockwise input is reversed with reversed_input set; self-intersecting or
// degenerate input is rejected.
DiscreteSurfaceMeasure polygon_surface_measure(const std::vector<Vec>& vertices);

// Oriented triangle soup in R^3 -> one atom per triangle. Watertightness is
// diagnosed through the closedness invariant, not required.
DiscreteSurfaceMeasure mesh_surface_measure(
    const std::vector<std::array<Vec, 3>>& triangles);

// Quadrature measure of the sphere rho*S^2: Fibonacci net of
// 1000 * 4^(level-1) atoms, weights rescaled to exactly 4*pi*rho^2.
DiscreteSurfaceMeasure sphere_surface_measure(double rho, int level);

// Concatenation; valid when the parts represent pairwise disjoint sets.
DiscreteSurfaceMeasure disjoint_union_measure(
    const std::vector<DiscreteSurfaceMeasure>& parts);

// P_Q(A) = sum_i w_i * h(Q u {0}, v_i). Compensated summation, index order.
double anisotropic_perimeter(const DiscreteSurfaceMeasure& s,
                             const StructuringElement& q);

// Negates every normal: the surface measure of the complement,
// so P_Q(A^C) = P_{-Q}(A).
DiscreteSurfaceMeasure reflect_measure(const DiscreteSurfaceMeasure& s);

}  // namespace mink
