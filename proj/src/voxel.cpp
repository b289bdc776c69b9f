#include "mink/voxel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <thread>

namespace mink {

namespace {

// --- word-row primitives ---------------------------------------------------

// dst |= dst << s (bit shift within a W-word row).
void self_or_shift(std::uint64_t* buf, std::size_t w, int s) {
  const int ws = s >> 6, bs = s & 63;
  if (bs == 0) {
    for (std::size_t i = w; i-- > 0;) {
      if (std::ptrdiff_t(i) - ws >= 0) buf[i] |= buf[i - ws];
    }
    return;
  }
  for (std::size_t i = w; i-- > 0;) {
    std::uint64_t v = 0;
    const std::ptrdiff_t j = std::ptrdiff_t(i) - ws;
    if (j >= 0) v = buf[j] << bs;
    if (j - 1 >= 0) v |= buf[j - 1] >> (64 - bs);
    buf[i] |= v;
  }
}

// dst |= src << s, where dst has wd words and src has ws_words.
void or_shift_into(std::uint64_t* dst, std::size_t wd, const std::uint64_t* src,
                   std::size_t ws_words, int s) {
  const int ws = s >> 6, bs = s & 63;
  for (std::size_t j = 0; j < ws_words; ++j) {
    const std::size_t i = j + ws;
    if (i >= wd) break;
    if (bs == 0) {
      dst[i] |= src[j];
    } else {
      dst[i] |= src[j] << bs;
      if (i + 1 < wd) dst[i + 1] |= src[j] >> (64 - bs);
    }
  }
}

// popcount of { x : a(x) & b(x + shift) }, shift may be negative.
std::size_t popcount_and_shift(const std::uint64_t* a, std::size_t wa,
                               const std::uint64_t* b, std::size_t wb,
                               int shift) {
  if (shift < 0)
    return popcount_and_shift(b, wb, a, wa, -shift);
  const int ws = shift >> 6, bs = shift & 63;
  std::size_t total = 0;
  for (std::size_t i = 0; i < wa; ++i) {
    const std::size_t j = i + ws;
    std::uint64_t v = 0;
    if (j < wb) v = b[j] >> bs;
    if (bs != 0 && j + 1 < wb) v |= b[j + 1] << (64 - bs);
    total += std::size_t(std::popcount(a[i] & v));
  }
  return total;
}

void set_bit_range(std::uint64_t* row, int x0, int x1) {
  const int w0 = x0 >> 6, w1 = x1 >> 6;
  const std::uint64_t m0 = ~std::uint64_t(0) << (x0 & 63);
  const std::uint64_t m1 = ~std::uint64_t(0) >> (63 - (x1 & 63));
  if (w0 == w1) {
    row[w0] |= m0 & m1;
    return;
  }
  row[w0] |= m0;
  for (int w = w0 + 1; w < w1; ++w) row[w] = ~std::uint64_t(0);
  row[w1] |= m1;
}

int g_dilation_threads = 0;

int effective_threads() {
  if (g_dilation_threads > 0) return g_dilation_threads;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : int(hc);
}

// Distance from a point to r*Q, by body kind. 3D polytopes would need a
// full convex-hull distance query and are rejected upstream.
double dist_to_scaled(const StructuringElement& q, double r, const Vec& p) {
  switch (q.kind()) {
    case BodyKind::Singleton:
      return dist(p, scaled(q.point_a(), r));
    case BodyKind::Segment:
      return dist_point_segment(p, scaled(q.point_a(), r),
                                scaled(q.point_b(), r));
    case BodyKind::BallInSubspace: {
      const Vec c = scaled(q.center(), r);
      const Vec d = sub(p, c);
      const Vec in_plane = q.project_onto_span(d);
      const double perp2 = norm2(sub(d, in_plane));
      const double radial = std::max(0.0, norm(in_plane) - r * q.radius());
      return std::sqrt(radial * radial + perp2);
    }
    case BodyKind::PolytopeHull: {
      // 2D only: distance to the convex hull of the scaled vertices.
      std::vector<Vec> v;
      v.reserve(q.vertices().size());
      for (const auto& x : q.vertices()) v.push_back(scaled(x, r));
      // Monotone chain hull.
      std::sort(v.begin(), v.end(), [](const Vec& a, const Vec& b) {
        return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
      });
      v.erase(std::unique(v.begin(), v.end()), v.end());
      auto cross = [](const Vec& o, const Vec& a, const Vec& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
      };
      std::vector<Vec> hull;
      if (v.size() <= 2) {
        hull = v;
      } else {
        hull.resize(2 * v.size());
        std::size_t k = 0;
        for (const auto& pt : v) {
          while (k >= 2 && cross(hull[k - 2], hull[k - 1], pt) <= 0) --k;
          hull[k++] = pt;
        }
        const std::size_t lower = k + 1;
        for (std::size_t i = v.size() - 1; i-- > 0;) {
          while (k >= lower && cross(hull[k - 2], hull[k - 1], v[i]) <= 0) --k;
          hull[k++] = v[i];
        }
        hull.resize(k - 1);
      }
      if (hull.size() == 1) return dist(p, hull[0]);
      if (hull.size() == 2) return dist_point_segment(p, hull[0], hull[1]);
      // Inside test + boundary distance.
      bool inside = true;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < hull.size(); ++i) {
        const Vec& a = hull[i];
        const Vec& b = hull[(i + 1) % hull.size()];
        if (cross(a, b, p) < 0) inside = false;
        best = std::min(best, dist_point_segment(p, a, b));
      }
      return inside ? 0.0 : best;
    }
  }
  return 0.0;
}

}  // namespace

VoxelGrid VoxelGrid::make(int dim, const Vec& lo, const Vec& hi, double h) {
  if (dim != 2 && dim != 3) throw ConfigError("grid dimension must be 2 or 3");
  if (h <= 0) throw ConfigError("grid spacing must be positive");
  VoxelGrid g;
  g.dim = dim;
  g.origin = lo;
  g.h = h;
  for (int i = 0; i < dim; ++i) {
    const long long n = std::llround((hi[i] - lo[i]) / h);
    if (n < 1) throw ConfigError("empty grid box on axis " + std::to_string(i));
    g.dims[i] = int(n);
  }
  g.wpr = (std::size_t(g.dims[0]) + 63) / 64;
  g.words.assign(g.wpr * g.rows(), 0);
  return g;
}

std::size_t VoxelGrid::popcount() const {
  std::size_t total = 0;
  for (const auto w : words) total += std::size_t(std::popcount(w));
  return total;
}

double VoxelGrid::volume() const {
  return double(popcount()) * std::pow(h, dim);
}

void set_dilation_threads(int n) { g_dilation_threads = n; }

OffsetSet build_offsets(const StructuringElement& q, double r, double h,
                        double cap) {
  if (r < 0) throw ConfigError("dilation radius must be nonnegative");
  if (q.dim() == 3 && q.kind() == BodyKind::PolytopeHull)
    throw ConfigError(
        "3D polytope structuring elements are not supported as dilation "
        "kernels; use segments, balls, or planar disks");
  const double span = r * q.diameter() / h;
  if (span > cap) {
    std::ostringstream os;
    os << "dilation kernel spans " << span << " voxels (cap " << cap
       << "); increase h, decrease r, or raise the kernel cap";
    throw ResourceError(os.str());
  }

  OffsetSet k;
  k.dim = q.dim();
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int i = 0; i < q.dim(); ++i) {
    Vec e(q.dim(), 0.0), me(q.dim(), 0.0);
    e[i] = 1;
    me[i] = -1;
    lo[i] = int(std::floor((-r * q.support(me) - h / 2) / h)) - 1;
    hi[i] = int(std::ceil((r * q.support(e) + h / 2) / h)) + 1;
  }
  k.min = {std::numeric_limits<int>::max(), 0, 0};
  bool any = false;
  std::array<int, 3> omin{0, 0, 0}, omax{0, 0, 0};
  Vec p(q.dim());
  for (int z = lo[2]; z <= hi[2]; ++z) {
    if (q.dim() == 3) p[2] = z * h;
    for (int y = lo[1]; y <= hi[1]; ++y) {
      p[1] = y * h;
      int run_x0 = 0;
      bool in_run = false;
      for (int x = lo[0]; x <= hi[0] + 1; ++x) {
        bool hit = false;
        if (x <= hi[0]) {
          p[0] = x * h;
          hit = dist_to_scaled(q, r, p) <= h / 2 + 1e-12 * (r + h);
        }
        if (hit) {
          k.offsets.push_back({x, y, z});
          if (!in_run) {
            run_x0 = x;
            in_run = true;
          }
          if (!any) {
            omin = omax = {x, y, z};
            any = true;
          } else {
            omin[0] = std::min(omin[0], x);
            omin[1] = std::min(omin[1], y);
            omin[2] = std::min(omin[2], z);
            omax[0] = std::max(omax[0], x);
            omax[1] = std::max(omax[1], y);
            omax[2] = std::max(omax[2], z);
          }
          if (x == 0 && y == 0 && z == 0) k.contains_zero = true;
        } else if (in_run) {
          k.runs.push_back({y, z, run_x0, x - 1});
          in_run = false;
        }
      }
    }
  }
  if (!any)
    throw ConfigError("empty dilation kernel (should contain at least one "
                      "voxel by the covering rule)");
  k.min = omin;
  k.max = omax;
  return k;
}

VoxelGrid dilate(const VoxelGrid& a, const OffsetSet& k) {
  if (a.dim != k.dim) throw ConfigError("grid/kernel dimension mismatch");
  VoxelGrid out;
  out.dim = a.dim;
  out.h = a.h;
  out.origin = a.origin;
  for (int i = 0; i < a.dim; ++i) {
    out.dims[i] = a.dims[i] + (k.max[i] - k.min[i]);
    out.origin[i] += k.min[i] * a.h;
  }
  out.wpr = (std::size_t(out.dims[0]) + 63) / 64;
  out.words.assign(out.wpr * out.rows(), 0);

  const std::size_t na = a.popcount();
  double sparse_cost = 0, dense_cost = 0;
  for (const auto& run : k.runs)
    sparse_cost += double(na) * (double(run.x1 - run.x0 + 1) / 64.0 + 3.0);
  for (const auto& run : k.runs) {
    const double lg = std::ceil(std::log2(double(run.x1 - run.x0 + 1) + 1));
    dense_cost += double(out.rows()) * double(out.wpr) * (lg + 2.0);
  }

  if (sparse_cost < dense_cost) {
    // Stamp runs around each occupied source voxel.
    for (int z = 0; z < a.dims[2]; ++z)
      for (int y = 0; y < a.dims[1]; ++y) {
        const std::uint64_t* src = a.row(y, z);
        for (std::size_t w = 0; w < a.wpr; ++w) {
          std::uint64_t bits = src[w];
          while (bits) {
            const int x = int(w * 64) + std::countr_zero(bits);
            bits &= bits - 1;
            for (const auto& run : k.runs) {
              const int oy = y + run.dy - k.min[1];
              const int oz = z + run.dz - k.min[2];
              set_bit_range(out.row(oy, oz), x + run.x0 - k.min[0],
                            x + run.x1 - k.min[0]);
            }
          }
        }
      }
  } else {
    // Per-destination-row: OR together shifted spreads of source rows.
    // Rows are independent, so the work parallelizes without races.
    const std::uint64_t tail_mask =
        (out.dims[0] & 63) == 0
            ? ~std::uint64_t(0)
            : (~std::uint64_t(0) >> (64 - (out.dims[0] & 63)));
    auto worker = [&](std::size_t row_begin, std::size_t row_end) {
      std::vector<std::uint64_t> buf(out.wpr);
      for (std::size_t ri = row_begin; ri < row_end; ++ri) {
        const int oz = int(ri / out.dims[1]);
        const int oy = int(ri % out.dims[1]);
        std::uint64_t* dst = out.row(oy, oz);
        for (const auto& run : k.runs) {
          const int sy = oy + k.min[1] - run.dy;
          const int sz = oz + k.min[2] - run.dz;
          if (sy < 0 || sy >= a.dims[1] || sz < 0 || sz >= a.dims[2]) continue;
          const std::uint64_t* src = a.row(sy, sz);
          bool empty = true;
          for (std::size_t w = 0; w < a.wpr; ++w)
            if (src[w]) {
              empty = false;
              break;
            }
          if (empty) continue;
          std::fill(buf.begin(), buf.end(), 0);
          or_shift_into(buf.data(), out.wpr, src, a.wpr, run.x0 - k.min[0]);
          const int m = run.x1 - run.x0 + 1;
          int covered = 1;
          while (covered < m) {
            const int s = std::min(covered, m - covered);
            self_or_shift(buf.data(), out.wpr, s);
            covered += s;
          }
          for (std::size_t w = 0; w < out.wpr; ++w) dst[w] |= buf[w];
        }
        dst[out.wpr - 1] &= tail_mask;
      }
    };
    const std::size_t nrows = out.rows();
    const int nt = std::min<int>(effective_threads(), int(nrows));
    if (nt <= 1) {
      worker(0, nrows);
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (nrows + nt - 1) / nt;
      for (int t = 0; t < nt; ++t) {
        const std::size_t b = t * chunk;
        const std::size_t e = std::min(nrows, b + chunk);
        if (b < e) pool.emplace_back(worker, b, e);
      }
      for (auto& th : pool) th.join();
    }
  }
  return out;
}

double excess_volume(const VoxelGrid& a, const StructuringElement& q, double r,
                     double cap) {
  if (a.dim != q.dim()) throw ConfigError("grid/body dimension mismatch");
  const OffsetSet k = build_offsets(q, r, a.h, cap);
  const VoxelGrid b = dilate(a, k);
  // Count |B| - |B cap A|; A sits inside B at voxel offset -k.min. Rows of A
  // that land outside B (possible when the kernel does not straddle 0 on an
  // axis) contribute nothing to the intersection.
  std::size_t inter = 0;
  for (int z = 0; z < a.dims[2]; ++z) {
    const int bz = z - k.min[2];
    if (bz < 0 || bz >= b.dims[2]) continue;
    for (int y = 0; y < a.dims[1]; ++y) {
      const int by = y - k.min[1];
      if (by < 0 || by >= b.dims[1]) continue;
      inter += popcount_and_shift(a.row(y, z), a.wpr, b.row(by, bz), b.wpr,
                                  -k.min[0]);
    }
  }
  return double(b.popcount() - inter) * std::pow(a.h, a.dim);
}

double covariogram(const VoxelGrid& a, const std::array<int, 3>& offset) {
  std::size_t total = 0;
  const int oy = offset[1], oz = a.dim == 3 ? offset[2] : 0;
  for (int z = 0; z < a.dims[2]; ++z) {
    const int sz = z - oz;
    if (sz < 0 || sz >= a.dims[2]) continue;
    for (int y = 0; y < a.dims[1]; ++y) {
      const int sy = y - oy;
      if (sy < 0 || sy >= a.dims[1]) continue;
      total += popcount_and_shift(a.row(y, z), a.wpr, a.row(sy, sz), a.wpr,
                                  -offset[0]);
    }
  }
  return double(total) * std::pow(a.h, a.dim);
}

double covariogram_derivative(const VoxelGrid& a, const Vec& u, int steps) {
  if (int(u.size()) != a.dim) throw ConfigError("direction dimension mismatch");
  if (steps < 1) throw ConfigError("covariogram derivative needs steps >= 1");
  const Vec uu = unit(u);
  // Least-squares slope through (0, g(0)) and the sampled lattice points.
  const double g0 = covariogram(a, {0, 0, 0});
  double sxx = 0, sxy = 0;
  for (int kk = 1; kk <= steps; ++kk) {
    std::array<int, 3> off{0, 0, 0};
    Vec world(a.dim, 0.0);
    for (int i = 0; i < a.dim; ++i) {
      off[i] = int(std::llround(kk * uu[i]));
      world[i] = off[i] * a.h;
    }
    const double t = norm(world);
    if (t == 0) continue;
    sxx += t * t;
    sxy += t * (covariogram(a, off) - g0);
  }
  if (sxx == 0) throw ConfigError("degenerate covariogram sample set");
  return sxy / sxx;
}

VoxelGrid density_regularize(const VoxelGrid& a, int w, double tau) {
  if (w < 1) throw ConfigError("regularization radius must be >= 1");
  std::vector<std::array<int, 3>> ball;
  const int zr = a.dim == 3 ? w : 0;
  for (int dz = -zr; dz <= zr; ++dz)
    for (int dy = -w; dy <= w; ++dy)
      for (int dx = -w; dx <= w; ++dx)
        if (dx * dx + dy * dy + dz * dz <= w * w)
          ball.push_back({dx, dy, dz});
  const double nball = double(ball.size());

  VoxelGrid out = a;
  std::fill(out.words.begin(), out.words.end(), 0);
  for (int z = 0; z < a.dims[2]; ++z)
    for (int y = 0; y < a.dims[1]; ++y) {
      const std::uint64_t* src = a.row(y, z);
      for (std::size_t wd = 0; wd < a.wpr; ++wd) {
        std::uint64_t bits = src[wd];
        while (bits) {
          const int x = int(wd * 64) + std::countr_zero(bits);
          bits &= bits - 1;
          std::size_t occ = 0;
          for (const auto& o : ball) {
            const int xx = x + o[0], yy = y + o[1], zz = z + o[2];
            if (a.in_range(xx, yy, zz) && a.get(xx, yy, zz)) ++occ;
          }
          if (double(occ) / nball > tau) out.set(x, y, z);
        }
      }
    }
  return out;
}

double product_excess(const VoxelGrid& c, double d_volume,
                      const StructuringElement& q, double r, double cap) {
  if (d_volume < 0) throw ConfigError("factor volume must be nonnegative");
  return excess_volume(c, q, r, cap) * d_volume;
}

}  // namespace mink
