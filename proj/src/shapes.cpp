#include <algorithm>
#include <cmath>
#include <sstream>

#include "mink/voxel.hpp"

namespace mink {

namespace {

struct DimVisitor {
  int operator()(const BallShape& s) const { return int(s.c.size()); }
  int operator()(const BoxShape& s) const { return int(s.lo.size()); }
  int operator()(const PolygonShape&) const { return 2; }
  int operator()(const BallUnionShape& s) const { return s.dim; }
  int operator()(const SheetCircle&) const { return 2; }
  int operator()(const SheetSphere&) const { return 3; }
  int operator()(const SheetPolygonBoundary&) const { return 2; }
  int operator()(const SheetSegment&) const { return 2; }
  int operator()(const SlabProduct&) const { return 3; }
  int operator()(const EmptyShape& s) const { return s.dim; }
};

std::pair<Vec, Vec> ball_bounds(const Vec& c, double rho) {
  Vec lo = c, hi = c;
  for (std::size_t i = 0; i < c.size(); ++i) {
    lo[i] -= rho;
    hi[i] += rho;
  }
  return {lo, hi};
}

std::pair<Vec, Vec> verts_bounds(const std::vector<Vec>& verts) {
  Vec lo = verts.at(0), hi = verts.at(0);
  for (const auto& v : verts)
    for (std::size_t i = 0; i < v.size(); ++i) {
      lo[i] = std::min(lo[i], v[i]);
      hi[i] = std::max(hi[i], v[i]);
    }
  return {lo, hi};
}

std::pair<Vec, Vec> union_bounds(const BallUnionShape& s) {
  if (s.balls.empty()) return {Vec(s.dim, 0.0), Vec(s.dim, 0.0)};
  auto [lo, hi] = ball_bounds(s.balls[0].c, s.balls[0].rho);
  for (const auto& b : s.balls) {
    auto [l, h] = ball_bounds(b.c, b.rho);
    for (int i = 0; i < s.dim; ++i) {
      lo[i] = std::min(lo[i], l[i]);
      hi[i] = std::max(hi[i], h[i]);
    }
  }
  return {lo, hi};
}

struct BoundsVisitor {
  std::pair<Vec, Vec> operator()(const BallShape& s) const {
    return ball_bounds(s.c, s.rho);
  }
  std::pair<Vec, Vec> operator()(const BoxShape& s) const {
    return {s.lo, s.hi};
  }
  std::pair<Vec, Vec> operator()(const PolygonShape& s) const {
    return verts_bounds(s.verts);
  }
  std::pair<Vec, Vec> operator()(const BallUnionShape& s) const {
    return union_bounds(s);
  }
  std::pair<Vec, Vec> operator()(const SheetCircle& s) const {
    return ball_bounds(s.c, s.rho);
  }
  std::pair<Vec, Vec> operator()(const SheetSphere& s) const {
    return ball_bounds(s.c, s.rho);
  }
  std::pair<Vec, Vec> operator()(const SheetPolygonBoundary& s) const {
    return verts_bounds(s.verts);
  }
  std::pair<Vec, Vec> operator()(const SheetSegment& s) const {
    return verts_bounds({s.a, s.b});
  }
  std::pair<Vec, Vec> operator()(const SlabProduct& s) const {
    auto [l2, h2] = union_bounds(s.base);
    Vec lo(3), hi(3);
    const int u = (s.axis + 1) % 3, v = (s.axis + 2) % 3;
    lo[s.axis] = s.lo;
    hi[s.axis] = s.hi;
    lo[u] = l2[0];
    hi[u] = h2[0];
    lo[v] = l2[1];
    hi[v] = h2[1];
    for (int i = 0; i < 3; ++i) {
      lo[i] += s.shift[i];
      hi[i] += s.shift[i];
    }
    return {lo, hi};
  }
  std::pair<Vec, Vec> operator()(const EmptyShape& s) const {
    return {Vec(s.dim, 0.0), Vec(s.dim, 0.0)};
  }
};

void check_bbox(const Shape& s, const Vec& lo, const Vec& hi) {
  const int d = shape_dim(s);
  if (int(lo.size()) != d || int(hi.size()) != d)
    throw ConfigError("bbox dimension mismatch");
  auto [slo, shi] = shape_bounds(s);
  for (int i = 0; i < d; ++i) {
    if (lo[i] > slo[i] + 1e-12 || hi[i] < shi[i] - 1e-12) {
      std::ostringstream os;
      os << "bbox does not contain the shape; axis " << i << " requires ["
         << slo[i] << ", " << shi[i] << "] but got [" << lo[i] << ", " << hi[i]
         << "]";
      throw ConfigError(os.str());
    }
  }
}

// Index range of cell centers within [a, b] on one axis (clamped to grid).
std::pair<int, int> center_range(const VoxelGrid& g, int axis, double a,
                                 double b) {
  int i0 = int(std::ceil((a - g.origin[axis]) / g.h - 0.5));
  int i1 = int(std::floor((b - g.origin[axis]) / g.h - 0.5));
  i0 = std::max(i0, 0);
  i1 = std::min(i1, g.dims[axis] - 1);
  return {i0, i1};
}

void fill_ball(VoxelGrid& g, const Vec& c, double rho) {
  const double r2 = rho * rho;
  auto [x0, x1] = center_range(g, 0, c[0] - rho, c[0] + rho);
  auto [y0, y1] = center_range(g, 1, c[1] - rho, c[1] + rho);
  int z0 = 0, z1 = 0;
  if (g.dim == 3) std::tie(z0, z1) = center_range(g, 2, c[2] - rho, c[2] + rho);
  for (int z = z0; z <= z1; ++z) {
    const double dz = g.dim == 3 ? g.cell_center(2, z) - c[2] : 0.0;
    for (int y = y0; y <= y1; ++y) {
      const double dy = g.cell_center(1, y) - c[1];
      const double rem = r2 - dz * dz - dy * dy;
      if (rem < 0) continue;
      const double half = std::sqrt(rem);
      auto [a, b] = center_range(g, 0, c[0] - half, c[0] + half);
      if (a <= b)
        for (int x = a; x <= b; ++x) g.set(x, y, z);
    }
  }
}

// Cells whose center is within h/2 of the sphere/circle |p - c| = rho.
void fill_shell(VoxelGrid& g, const Vec& c, double rho) {
  const double pad = g.h / 2;
  auto [x0, x1] = center_range(g, 0, c[0] - rho - pad, c[0] + rho + pad);
  auto [y0, y1] = center_range(g, 1, c[1] - rho - pad, c[1] + rho + pad);
  int z0 = 0, z1 = 0;
  if (g.dim == 3)
    std::tie(z0, z1) = center_range(g, 2, c[2] - rho - pad, c[2] + rho + pad);
  for (int z = z0; z <= z1; ++z) {
    const double dz = g.dim == 3 ? g.cell_center(2, z) - c[2] : 0.0;
    for (int y = y0; y <= y1; ++y) {
      const double dy = g.cell_center(1, y) - c[1];
      for (int x = x0; x <= x1; ++x) {
        const double dx = g.cell_center(0, x) - c[0];
        const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (std::abs(d - rho) <= pad) g.set(x, y, z);
      }
    }
  }
}

void fill_segment_sheet(VoxelGrid& g, const Vec& a, const Vec& b) {
  const double pad = g.h / 2;
  auto [blo, bhi] = verts_bounds({a, b});
  auto [x0, x1] = center_range(g, 0, blo[0] - pad, bhi[0] + pad);
  auto [y0, y1] = center_range(g, 1, blo[1] - pad, bhi[1] + pad);
  Vec p(2);
  for (int y = y0; y <= y1; ++y) {
    p[1] = g.cell_center(1, y);
    for (int x = x0; x <= x1; ++x) {
      p[0] = g.cell_center(0, x);
      if (dist_point_segment(p, a, b) <= pad) g.set(x, y, 0);
    }
  }
}

// Scanline fill of a simple polygon (even-odd rule at row centers).
void fill_polygon(VoxelGrid& g, const std::vector<Vec>& verts) {
  const std::size_t m = verts.size();
  std::vector<double> xs;
  for (int y = 0; y < g.dims[1]; ++y) {
    const double cy = g.cell_center(1, y);
    xs.clear();
    for (std::size_t i = 0; i < m; ++i) {
      const Vec& a = verts[i];
      const Vec& b = verts[(i + 1) % m];
      if ((a[1] <= cy) == (b[1] <= cy)) continue;  // half-open edge rule
      xs.push_back(a[0] + (cy - a[1]) / (b[1] - a[1]) * (b[0] - a[0]));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      auto [x0, x1] = center_range(g, 0, xs[i], xs[i + 1]);
      for (int x = x0; x <= x1; ++x) g.set(x, y, 0);
    }
  }
}

void fill_polygon_boundary(VoxelGrid& g, const std::vector<Vec>& verts) {
  for (std::size_t i = 0; i < verts.size(); ++i)
    fill_segment_sheet(g, verts[i], verts[(i + 1) % verts.size()]);
}

struct RasterVisitor {
  VoxelGrid& g;
  void operator()(const BallShape& s) const { fill_ball(g, s.c, s.rho); }
  void operator()(const BoxShape& s) const {
    auto [x0, x1] = center_range(g, 0, s.lo[0], s.hi[0]);
    auto [y0, y1] = center_range(g, 1, s.lo[1], s.hi[1]);
    int z0 = 0, z1 = 0;
    if (g.dim == 3) std::tie(z0, z1) = center_range(g, 2, s.lo[2], s.hi[2]);
    for (int z = z0; z <= z1; ++z)
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) g.set(x, y, z);
  }
  void operator()(const PolygonShape& s) const { fill_polygon(g, s.verts); }
  void operator()(const BallUnionShape& s) const {
    for (const auto& b : s.balls) fill_ball(g, b.c, b.rho);
  }
  void operator()(const SheetCircle& s) const { fill_shell(g, s.c, s.rho); }
  void operator()(const SheetSphere& s) const { fill_shell(g, s.c, s.rho); }
  void operator()(const SheetPolygonBoundary& s) const {
    fill_polygon_boundary(g, s.verts);
  }
  void operator()(const SheetSegment& s) const {
    fill_segment_sheet(g, s.a, s.b);
  }
  void operator()(const SlabProduct& s) const {
    const int u = (s.axis + 1) % 3, v = (s.axis + 2) % 3;
    auto [a0, a1] =
        center_range(g, s.axis, s.lo + s.shift[s.axis], s.hi + s.shift[s.axis]);
    for (const auto& b : s.base.balls) {
      const double cu = b.c[0] + s.shift[u];
      const double cv = b.c[1] + s.shift[v];
      auto [u0, u1] = center_range(g, u, cu - b.rho, cu + b.rho);
      for (int iu = u0; iu <= u1; ++iu) {
        const double du = g.cell_center(u, iu) - cu;
        const double rem = b.rho * b.rho - du * du;
        if (rem < 0) continue;
        const double half = std::sqrt(rem);
        auto [v0, v1] = center_range(g, v, cv - half, cv + half);
        for (int iv = v0; iv <= v1; ++iv)
          for (int ia = a0; ia <= a1; ++ia) {
            int idx[3];
            idx[s.axis] = ia;
            idx[u] = iu;
            idx[v] = iv;
            g.set(idx[0], idx[1], idx[2]);
          }
      }
    }
  }
  void operator()(const EmptyShape&) const {}
};

}  // namespace

int shape_dim(const Shape& s) { return std::visit(DimVisitor{}, s); }

std::pair<Vec, Vec> shape_bounds(const Shape& s) {
  return std::visit(BoundsVisitor{}, s);
}

VoxelGrid rasterize(const Shape& s, const Vec& lo, const Vec& hi, double h) {
  check_bbox(s, lo, hi);
  VoxelGrid g = VoxelGrid::make(shape_dim(s), lo, hi, h);
  std::visit(RasterVisitor{g}, s);
  return g;
}

}  // namespace mink
