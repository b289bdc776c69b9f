#include "mink/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace mink {

RSchedule RSchedule::geometric(double r_max, int count, double ratio) {
  if (ratio == 0) ratio = 1.0 / std::sqrt(2.0);
  if (!(ratio > 0 && ratio < 1)) throw ConfigError("schedule ratio in (0,1)");
  if (count < 2 || r_max <= 0) throw ConfigError("bad schedule parameters");
  RSchedule s;
  s.rs.resize(count);
  for (int i = 0; i < count; ++i) s.rs[i] = r_max * std::pow(ratio, i);
  return s;
}

RSchedule RSchedule::between(double r_max, double r_min, int count) {
  if (count < 2 || !(0 < r_min && r_min < r_max))
    throw ConfigError("bad schedule parameters");
  RSchedule s;
  s.rs.resize(count);
  for (int i = 0; i < count; ++i)
    s.rs[i] = r_max * std::pow(r_min / r_max, double(i) / (count - 1));
  return s;
}

void RSchedule::validate() const {
  if (rs.size() < 2) throw ConfigError("schedule needs at least two radii");
  for (std::size_t i = 0; i + 1 < rs.size(); ++i)
    if (!(rs[i] > rs[i + 1]))
      throw ConfigError("schedule radii must be strictly decreasing");
  if (!(rs.back() > 0)) throw ConfigError("schedule radii must be positive");
}

std::string trend_name(Trend t) {
  switch (t) {
    case Trend::Converging: return "converging";
    case Trend::Diverging: return "diverging";
    case Trend::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

FitResult fit_affine(const std::vector<double>& rs,
                     const std::vector<double>& f) {
  if (rs.size() != f.size() || rs.size() < 2)
    throw ConfigError("affine fit needs matched samples, at least two");
  const std::size_t m = rs.size();
  double sr = 0, sf = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sr += rs[i];
    sf += f[i];
  }
  const double mr = sr / double(m), mf = sf / double(m);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (rs[i] - mr) * (rs[i] - mr);
    sxy += (rs[i] - mr) * (f[i] - mf);
  }
  FitResult out;
  out.c1 = sxx > 0 ? sxy / sxx : 0.0;
  out.c0 = mf - out.c1 * mr;
  double ss = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = f[i] - (out.c0 + out.c1 * rs[i]);
    ss += e * e;
  }
  out.residual = std::sqrt(ss / double(m));
  return out;
}

Trend classify(const std::vector<double>& rs, const std::vector<double>& f,
               double& growth_ratio, const ClassifyOptions& opts) {
  const std::size_t m = f.size();
  growth_ratio = f.front() > 0 ? f.back() / f.front() : 0.0;

  // Diverging first: f strictly increasing as r decreases, over the last
  // monotone_window steps, with enough total growth.
  const std::size_t w = std::min<std::size_t>(opts.monotone_window, m - 1);
  bool monotone = true;
  for (std::size_t i = m - w; i < m; ++i)
    if (!(f[i] > f[i - 1])) monotone = false;
  if (monotone && growth_ratio >= opts.growth_threshold)
    return Trend::Diverging;

  // Oscillation (sign changes in successive differences) cannot be told
  // apart from slow divergence by one schedule; stay inconclusive.
  int flips = 0;
  for (std::size_t i = 2; i < m; ++i)
    if ((f[i] - f[i - 1]) * (f[i - 1] - f[i - 2]) < 0) ++flips;
  if (flips * 2 > int(m)) return Trend::Inconclusive;

  const FitResult fit = fit_affine(rs, f);
  if (fit.c0 > 0 && fit.residual <= opts.residual_frac * fit.c0)
    return Trend::Converging;
  return Trend::Inconclusive;
}

namespace {

ConvergenceReport run_schedule(const VoxelGrid& grid,
                               const StructuringElement& q,
                               const RSchedule& sched,
                               const EstimateOptions& opts, bool two_sided,
                               double subtract_volume) {
  sched.validate();
  if (sched.r_min() < 8 * grid.h)
    throw ConfigError("schedule violates the resolution guard r_min >= 8h");
  ConvergenceReport rep;
  rep.rs = sched.rs;
  for (const double r : sched.rs) {
    if (two_sided) {
      const OffsetSet k = build_offsets(q, r, grid.h, opts.kernel_cap);
      const double dilated = dilate(grid, k).volume();
      rep.excess.push_back(dilated - subtract_volume);
      rep.f.push_back(rep.excess.back() / (2 * r));
    } else {
      rep.excess.push_back(excess_volume(grid, q, r, opts.kernel_cap));
      rep.f.push_back(rep.excess.back() / r);
    }
  }
  rep.fit = fit_affine(rep.rs, rep.f);
  rep.trend = classify(rep.rs, rep.f, rep.growth_ratio, opts.classify);
  return rep;
}

}  // namespace

ConvergenceReport outer_content(const VoxelGrid& a, const StructuringElement& q,
                                const RSchedule& sched,
                                const EstimateOptions& opts) {
  return run_schedule(a, q, sched, opts, false, 0.0);
}

ConvergenceReport minkowski_content(const VoxelGrid& e,
                                    const StructuringElement& q,
                                    const RSchedule& sched,
                                    const EstimateOptions& opts) {
  const double total = std::pow(e.h, e.dim) * double(e.wpr ? e.rows() * e.dims[0] : 0);
  const double vol = e.volume();
  if (total > 0 && vol / total > opts.sheet_max_fraction)
    throw ConfigError("grid is not sheet-like: occupied fraction too high");
  return run_schedule(e, q, sched, opts, true,
                      opts.subtract_thickness ? vol : 0.0);
}

double analytic_excess(const OracleQuery& query, double r) {
  if (r < 0) throw ConfigError("oracle radius must be nonnegative");
  if (query.q == "ball") {
    if (query.shape == "square") {
      const double s = query.rho;
      return 4 * s * r + kPi * r * r;
    }
    if (query.shape == "disk") {
      const double rho = query.rho;
      return 2 * kPi * rho * r + kPi * r * r;
    }
    if (query.shape == "ball3") {
      const double rho = query.rho;
      return 4 * kPi * rho * rho * r + 4 * kPi * rho * r * r +
             4.0 / 3.0 * kPi * r * r * r;
    }
  }
  if (query.q == "disk" && query.shape == "ball3") {
    // B(0,rho) + r * (unit disk in a plane): pi^2 rho^2 r + 2 pi rho r^2
    // plus the degree-3 cap term (4pi/3) r^3 is absent: the tube closes onto
    // the ball; exact parallel-volume computation gives these two terms only
    // for r in the regime used by the oracle comparisons (r <= rho).
    const double rho = query.rho;
    if (r > rho) throw ConfigError("disk oracle valid for r <= rho");
    return kPi * kPi * rho * rho * r + 2 * kPi * rho * r * r;
  }
  if (query.q == "segment") {
    if (query.shape == "square") {
      Vec u = query.u;
      if (u.size() != 2) throw ConfigError("square oracle needs a 2D segment");
      return r * (std::abs(u[0]) + std::abs(u[1])) * query.rho;
    }
    if (query.shape == "polygon") {
      const auto& v = query.polygon;
      if (v.size() < 3) throw ConfigError("polygon oracle needs >= 3 vertices");
      KahanSum acc;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec e = sub(v[(i + 1) % v.size()], v[i]);
        // outward normal times edge length, orientation-independent via the
        // positive part below applied to both signs... the caller provides a
        // CCW polygon; normal = (e_y, -e_x).
        const double s = query.u[0] * e[1] - query.u[1] * e[0];
        acc.add(std::max(0.0, s));
      }
      return r * acc.value();
    }
  }
  throw ConfigError("unsupported oracle pair: " + query.shape + " + " +
                    query.q);
}

double segment_outer_exact(const DiscreteSurfaceMeasure& s, const Vec& u) {
  if (int(u.size()) != s.dim)
    throw ConfigError("segment direction dimension mismatch");
  KahanSum acc;
  for (std::size_t i = 0; i < s.normals.size(); ++i)
    acc.add(s.weights[i] * std::max(0.0, dot(u, s.normals[i])));
  return acc.value();
}

// ---------------------------------------------------------------------------

namespace {

// area(dB(x0, rho) cap B(a, r)) with a on the sphere dB(x0, rho):
// pi r^2 for r <= 2 rho, 4 pi rho^2 once the ball swallows the sphere.
// For a general center distance d = |a - x0| apply the standard cap/lens
// formula: the sphere dB(x0,rho) meets B(a,r) in a cap of height
// rho - (d^2 + rho^2 - r^2)/(2d).
double sphere_area_in_ball(double rho, double d, double r) {
  if (d >= r + rho) return 0.0;
  if (d + rho <= r) return 4 * kPi * rho * rho;
  if (d <= 1e-300) return r >= rho ? 4 * kPi * rho * rho : 0.0;
  const double cap_h = rho - (d * d + rho * rho - r * r) / (2 * d);
  return 2 * kPi * rho * std::clamp(cap_h, 0.0, 2 * rho);
}

double nu_mass(const BallPacking& p, const Vec& a, double r) {
  KahanSum acc;
  for (const auto& b : p.balls)
    acc.add(sphere_area_in_ball(b.rho, dist(a, b.x), r) / b.rho);
  return acc.value();
}

double proj_union_length(const BallPacking& p, const Vec& a, double r,
                         int axis) {
  // Over-approximation: each ball whose sphere meets B(a,r) contributes the
  // projection of the whole ball, clipped to that of B(a,r).
  std::vector<std::pair<double, double>> iv;
  const double a0 = a[axis] - r, a1 = a[axis] + r;
  for (const auto& b : p.balls) {
    const double d = dist(a, b.x);
    if (d >= r + b.rho) continue;
    const double lo = std::max(a0, b.x[axis] - b.rho);
    const double hi = std::min(a1, b.x[axis] + b.rho);
    if (lo < hi) iv.push_back({lo, hi});
  }
  std::sort(iv.begin(), iv.end());
  double total = 0, cur_lo = 0, cur_hi = -1;
  for (const auto& [lo, hi] : iv) {
    if (cur_hi < cur_lo || lo > cur_hi) {
      if (cur_hi >= cur_lo) total += cur_hi - cur_lo;
      cur_lo = lo;
      cur_hi = hi;
    } else {
      cur_hi = std::max(cur_hi, hi);
    }
  }
  if (cur_hi >= cur_lo) total += cur_hi - cur_lo;
  return total;
}

// Snap a to the nearest packing sphere surface.
Vec snap_to_surface(const BallPacking& p, const Vec& a) {
  double best = std::numeric_limits<double>::infinity();
  const PackedBall* hit = nullptr;
  for (const auto& b : p.balls) {
    const double gap = std::abs(dist(a, b.x) - b.rho);
    if (gap < best) {
      best = gap;
      hit = &b;
    }
  }
  if (!hit) throw ConfigError("empty packing: no boundary to sample");
  Vec dir = sub(a, hit->x);
  const double n = norm(dir);
  if (n == 0) dir = Vec{hit->rho, 0, 0};
  return add(hit->x, scaled(n == 0 ? dir : unit(dir), hit->rho));
}

}  // namespace

AFPReport afp_check(const BallPacking& p, int lperp_axis,
                    std::vector<AFPSample> samples) {
  if (p.dim != 3) throw ConfigError("afp_check expects a 3D packing");
  if (lperp_axis < 0 || lperp_axis > 2)
    throw ConfigError("L-perp axis must be 0, 1, or 2");
  if (p.balls.empty())
    throw ConfigError("empty packing: no boundary to sample");
  AFPReport rep;
  rep.gamma_hat = std::numeric_limits<double>::infinity();
  rep.pass = true;
  for (auto& s : samples) {
    if (!(s.r > 0 && s.r < 1)) throw ConfigError("AFP sample radius in (0,1)");
    s.a = snap_to_surface(p, s.a);
    s.nu = nu_mass(p, s.a, s.r);
    s.proj = proj_union_length(p, s.a, s.r, lperp_axis);
    s.ratio = s.proj > 0 ? s.nu / (s.r * s.proj) : 0.0;
    if (!(s.ratio > 0) || !std::isfinite(s.ratio)) rep.pass = false;
    rep.gamma_hat = std::min(rep.gamma_hat, s.ratio);
    rep.samples.push_back(s);
  }
  if (rep.samples.empty()) {
    rep.gamma_hat = 0;
    rep.pass = false;
  }
  return rep;
}

std::vector<AFPSample> make_afp_samples(const BallPacking& p, int count,
                                        std::uint64_t seed) {
  if (p.balls.empty())
    throw ConfigError("empty packing: no boundary to sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  // Group atoms into dyadic shells of |x| so small-|a| and large-|a| regimes
  // are both represented.
  std::vector<std::vector<std::size_t>> shells;
  for (std::size_t i = 0; i < p.balls.size(); ++i) {
    const double t = norm(p.balls[i].x);
    int band = 0;
    double edge = 1.0;
    while (t < edge / 2 && band < 40) {
      edge /= 2;
      ++band;
    }
    if (std::size_t(band) >= shells.size()) shells.resize(band + 1);
    shells[band].push_back(i);
  }
  std::vector<std::vector<std::size_t>> occupied;
  for (auto& s : shells)
    if (!s.empty()) occupied.push_back(std::move(s));

  std::vector<AFPSample> out;
  std::size_t shell_idx = 0;
  while (int(out.size()) < count) {
    const auto& shell = occupied[shell_idx % occupied.size()];
    ++shell_idx;
    const auto& b =
        p.balls[shell[std::size_t(u01(rng) * double(shell.size())) %
                      shell.size()]];
    // random point on the sphere
    Vec dir(3);
    double n2;
    do {
      for (auto& c : dir) c = 2 * u01(rng) - 1;
      n2 = norm2(dir);
    } while (n2 < 1e-12 || n2 > 1);
    const Vec a = add(b.x, scaled(unit(dir), b.rho));
    const double na = norm(a);
    for (const double r : {na / 4, na, 4 * na, u01(rng)}) {
      if (!(r > 0 && r < 1)) continue;
      if (int(out.size()) >= count) break;
      AFPSample s;
      s.a = a;
      s.r = r;
      out.push_back(s);
    }
  }
  return out;
}

std::vector<IsoDiagPoint> afp_isotropic_sequence(const BallPacking& p,
                                                 int count,
                                                 std::uint64_t seed) {
  if (p.balls.empty())
    throw ConfigError("empty packing: no boundary to sample");
  // Atoms sorted by decreasing |x|, subsampled evenly so the sequence walks
  // from the outer shell toward the origin.
  std::vector<std::size_t> order(p.balls.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return norm(p.balls[i].x) > norm(p.balls[j].x);
  });
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<IsoDiagPoint> out;
  const int m = std::min<int>(count, int(order.size()));
  for (int i = 0; i < m; ++i) {
    const std::size_t pick =
        order[std::size_t(double(i) / m * double(order.size()))];
    const auto& b = p.balls[pick];
    Vec dir(3);
    double n2;
    do {
      for (auto& c : dir) c = 2 * u01(rng) - 1;
      n2 = norm2(dir);
    } while (n2 < 1e-12 || n2 > 1);
    IsoDiagPoint pt;
    pt.a = add(b.x, scaled(unit(dir), b.rho));
    pt.r = norm(pt.a) / 2;
    pt.ratio = pt.r > 0 ? nu_mass(p, pt.a, pt.r) / (pt.r * pt.r) : 0.0;
    out.push_back(pt);
  }
  return out;
}

}  // namespace mink
