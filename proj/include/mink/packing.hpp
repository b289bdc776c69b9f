#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mink/voxel.hpp"

namespace mink {

// Radius law t -> delta(t) controlling the packing gauge. Power laws use
// delta(t) = t^k / (32 k) for t <= 1 (affinely continued above 1), which is
// increasing, o(t^n) for k > n, and 1/32-Lipschitz. Exponential laws use
// delta0 * exp(-1/t), flat to infinite order at 0.
struct DeltaLaw {
  enum class Kind { Power, Exponential } kind = Kind::Power;
  double k = 4;       // power exponent
  double delta0 = 0;  // exponential scale

  double operator()(double t) const;
  // Throws ConfigError unless increasing, o(t^n)-decaying, 1/32-Lipschitz.
  void validate(int n) const;
  std::string describe() const;
};

struct PackedBall {
  Vec x;         // center
  double delta;  // gauge radius delta(|x|)
  double rho;    // material radius: delta^dim
};

struct PackingAudit {
  int probes = 0;
  int uncovered = 0;  // probe balls missing the packing entirely
  bool maximal() const { return uncovered == 0; }
};

// Greedy maximal disjoint delta-ball packing of the shell t_min <= |x| <= 1,
// with material balls B(x_i, rho_i), rho = delta^dim.
struct BallPacking {
  int dim = 3;
  DeltaLaw law;
  double t_min = 0;
  std::uint64_t seed = 0;
  std::vector<PackedBall> balls;
  PackingAudit audit;

  bool contains(const Vec& p) const;  // membership in the material union
  // Disjointness of the delta-balls and conformance x -> (delta, rho) to the
  // law; throws ConfigError on violation.
  void validate() const;
};

struct PackingOptions {
  int max_consecutive_rejections = 100000;
  int audit_probes = 10000;
  double count_cap = 1e7;  // refuse runs predicted to exceed this many balls
};

// Estimated ball count for the greedy packing (saturation-fraction
// heuristic); used for the refusal check and for parameter tuning.
double predicted_count(int dim, const DeltaLaw& law, double t_min);

// Largest t_min (to 1e-3) whose predicted count stays below `cap`.
double tune_t_min(int dim, const DeltaLaw& law, double cap);

BallPacking gen_packing(int dim, const DeltaLaw& law, double t_min,
                        std::uint64_t seed, const PackingOptions& opts = {});

struct PackingSummary {
  std::size_t count = 0;
  double volume = 0;      // total material volume
  double p_iso = 0;       // isotropic perimeter: sum of sphere areas
  double p_disk = 0;      // 3D only: pi^2 * sum rho_i^2 (planar-disk gauge)
  std::vector<double> ts; // grid on [t_min, 1]
  std::vector<double> b;  // b(t) = sum of rho_i over |x_i| < t
};
PackingSummary packing_summary(const BallPacking& p, int t_grid = 64);

// Growth of the local divergence bound t^dim/delta(t) between the outer and
// inner ends of the shell; large values mean the isotropic content blows up
// visibly across scales.
double divergence_bound_ratio(int dim, const DeltaLaw& law, double t_min);

BallUnionShape to_shape(const BallPacking& p);

// Scene: three cylinders D x [0,1] along the coordinate axes, pairwise far
// apart, where D is a planar ball-union packing. Used for mixed-dimension
// experiments.
struct SceneCopy {
  int axis = 2;
  Vec shift{0, 0, 0};
};
struct CylinderScene {
  BallPacking base;  // dim == 2
  std::vector<SceneCopy> copies;
};
CylinderScene gen_cylinder_scene(const BallPacking& planar);
std::vector<SlabProduct> scene_shapes(const CylinderScene& s);

}  // namespace mink
