#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mink/packing.hpp"
#include "mink/surface.hpp"
#include "mink/voxel.hpp"

namespace mink {

// Strictly decreasing dilation radii r_0 > r_1 > ... > r_{m-1}.
struct RSchedule {
  std::vector<double> rs;

  // Geometric schedule from r_max down by `ratio` per step (default 2^-1/2).
  static RSchedule geometric(double r_max, int count, double ratio = 0);
  // Geometric schedule spanning [r_min, r_max] with `count` samples.
  static RSchedule between(double r_max, double r_min, int count);
  void validate() const;
  double r_min() const { return rs.back(); }
  double r_max() const { return rs.front(); }
};

enum class Trend { Converging, Diverging, Inconclusive };
std::string trend_name(Trend t);

struct FitResult {
  double c0 = 0;  // intercept: the content estimate
  double c1 = 0;  // slope in r
  double residual = 0;  // RMS residual of the affine fit
};

struct ConvergenceReport {
  std::vector<double> rs;
  std::vector<double> excess;  // raw volumes
  std::vector<double> f;       // normalized samples
  FitResult fit;
  Trend trend = Trend::Inconclusive;
  double growth_ratio = 0;  // f(r_min)/f(r_max), reported for diverging data
};

struct ClassifyOptions {
  double residual_frac = 0.05;  // converging: residual <= frac * c0
  int monotone_window = 6;      // diverging: f increases as r falls, last w
  double growth_threshold = 2.0;
};

FitResult fit_affine(const std::vector<double>& rs,
                     const std::vector<double>& f);
// Diverging takes precedence over converging when both patterns match.
Trend classify(const std::vector<double>& rs, const std::vector<double>& f,
               double& growth_ratio, const ClassifyOptions& opts = {});

struct EstimateOptions {
  double kernel_cap = 512;
  ClassifyOptions classify;
  // minkowski_content: subtract volume(E)/(2r) (thickness correction) and
  // refuse grids whose occupied fraction exceeds sheet_max_fraction.
  bool subtract_thickness = true;
  double sheet_max_fraction = 0.05;
};

// Outer content curve f(r) = excess(A, rQ)/r. Requires r_min >= 8h.
ConvergenceReport outer_content(const VoxelGrid& a, const StructuringElement& q,
                                const RSchedule& sched,
                                const EstimateOptions& opts = {});

// Two-sided content of a thin sheet E: f(r) = (vol(E + rQ) - vol(E))/(2r),
// the volume subtraction being the configurable thickness correction.
ConvergenceReport minkowski_content(const VoxelGrid& e,
                                    const StructuringElement& q,
                                    const RSchedule& sched,
                                    const EstimateOptions& opts = {});

// Exact excess volumes lambda((A + rQ) \ A) for closed-form pairs, used as
// oracles: square/disk/ball3 against a unit ball, ball3(rho) against a
// planar unit disk, and polygons against a segment [0, u].
struct OracleQuery {
  std::string shape;  // "square" | "disk" | "ball3" | "polygon"
  double rho = 1;     // radius for ball3, side for square
  std::string q;      // "ball" | "disk" | "segment"
  Vec u;              // segment direction (with length)
  std::vector<Vec> polygon;
};
double analytic_excess(const OracleQuery& query, double r);

// Sum of w_i <u, v_i>^+ — the limit content for Q = [0, u].
double segment_outer_exact(const DiscreteSurfaceMeasure& s, const Vec& u);

// ---------------------------------------------------------------------------
// Absolute-filling-property checks on ball packings (3D, k = dim L = 2).

struct AFPSample {
  Vec a;            // base point, snapped onto a packing sphere
  double r = 0;     // scale
  double nu = 0;    // weighted surface mass of B(a, r)
  double proj = 0;  // lambda_1 of the projection of the hit material onto L-perp
  double ratio = 0; // nu / (r^{k-1} * proj)
};

struct AFPReport {
  std::vector<AFPSample> samples;
  double gamma_hat = 0;  // min ratio over samples
  bool pass = false;     // all ratios finite and positive
};

// nu = sum (1/rho_i) * area(dB(x_i, rho_i) cap B(a, r)) by the exact
// two-sphere cap formula; proj via a 1D interval union on the axis L-perp.
// L must be a coordinate plane basis {e_i, e_j} (the remaining axis is
// L-perp). Sample points are snapped to the nearest sphere of the packing.
AFPReport afp_check(const BallPacking& p, int lperp_axis,
                    std::vector<AFPSample> samples);

// Stratified sample generator: dyadic shells of |a|, base points on sphere
// boundaries, r in {|a|/4, |a|, 4|a|} clipped to (0,1), plus seeded uniform r.
std::vector<AFPSample> make_afp_samples(const BallPacking& p, int count,
                                        std::uint64_t seed);

// Isotropic diagnostic: ratios nu(B(a, r))/r^2 at r = |a|/2 along a sequence
// of base points with decreasing |a|.
struct IsoDiagPoint {
  Vec a;
  double r = 0;
  double ratio = 0;
};
std::vector<IsoDiagPoint> afp_isotropic_sequence(const BallPacking& p,
                                                 int count,
                                                 std::uint64_t seed);

}  // namespace mink
