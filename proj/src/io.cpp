#include "mink/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mink {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw ResourceError("cannot open " + tmp + " for writing");
    os << content;
    if (!os) throw ResourceError("short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

namespace {

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (const double x : v) a.push_back(x);
  return a;
}

Vec vec_from_json(const json& j) {
  Vec v;
  for (const auto& x : j) v.push_back(x.get<double>());
  return v;
}

json vecs_to_json(const std::vector<Vec>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(vec_to_json(v));
  return a;
}

std::vector<Vec> vecs_from_json(const json& j) {
  std::vector<Vec> vs;
  for (const auto& v : j) vs.push_back(vec_from_json(v));
  return vs;
}

}  // namespace

json body_to_json(const StructuringElement& q) {
  json j;
  switch (q.kind()) {
    case BodyKind::Singleton:
      j["type"] = "singleton";
      j["point"] = vec_to_json(q.point_a());
      break;
    case BodyKind::Segment:
      j["type"] = "segment";
      j["a"] = vec_to_json(q.point_a());
      j["b"] = vec_to_json(q.point_b());
      break;
    case BodyKind::PolytopeHull:
      j["type"] = "polytope";
      j["vertices"] = vecs_to_json(q.vertices());
      break;
    case BodyKind::BallInSubspace:
      j["type"] = "ball";
      j["center"] = vec_to_json(q.center());
      j["radius"] = q.radius();
      j["basis"] = vecs_to_json(q.basis());
      break;
  }
  return j;
}

StructuringElement body_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "singleton")
    return StructuringElement::singleton(vec_from_json(j.at("point")));
  if (type == "segment")
    return StructuringElement::segment(vec_from_json(j.at("a")),
                                       vec_from_json(j.at("b")));
  if (type == "polytope")
    return StructuringElement::polytope(vecs_from_json(j.at("vertices")));
  if (type == "ball") {
    const Vec c = vec_from_json(j.at("center"));
    const double rho = j.at("radius").get<double>();
    if (j.contains("basis"))
      return StructuringElement::ball(c, rho, vecs_from_json(j.at("basis")));
    return StructuringElement::ball(c, rho);
  }
  throw ConfigError("unknown structuring element type: " + type);
}

json shape_to_json(const Shape& s) {
  json j;
  if (const auto* b = std::get_if<BallShape>(&s)) {
    j["type"] = "ball";
    j["center"] = vec_to_json(b->c);
    j["radius"] = b->rho;
  } else if (const auto* b = std::get_if<BoxShape>(&s)) {
    j["type"] = "box";
    j["lo"] = vec_to_json(b->lo);
    j["hi"] = vec_to_json(b->hi);
  } else if (const auto* b = std::get_if<PolygonShape>(&s)) {
    j["type"] = "polygon";
    j["vertices"] = vecs_to_json(b->verts);
  } else if (const auto* b = std::get_if<BallUnionShape>(&s)) {
    j["type"] = "ball_union";
    j["dim"] = b->dim;
    json balls = json::array();
    for (const auto& x : b->balls)
      balls.push_back({{"center", vec_to_json(x.c)}, {"radius", x.rho}});
    j["balls"] = balls;
  } else if (const auto* b = std::get_if<SheetCircle>(&s)) {
    j["type"] = "sheet_circle";
    j["center"] = vec_to_json(b->c);
    j["radius"] = b->rho;
  } else if (const auto* b = std::get_if<SheetSphere>(&s)) {
    j["type"] = "sheet_sphere";
    j["center"] = vec_to_json(b->c);
    j["radius"] = b->rho;
  } else if (const auto* b = std::get_if<SheetPolygonBoundary>(&s)) {
    j["type"] = "sheet_polygon";
    j["vertices"] = vecs_to_json(b->verts);
  } else if (const auto* b = std::get_if<SheetSegment>(&s)) {
    j["type"] = "sheet_segment";
    j["a"] = vec_to_json(b->a);
    j["b"] = vec_to_json(b->b);
  } else if (const auto* b = std::get_if<SlabProduct>(&s)) {
    j["type"] = "slab_product";
    j["axis"] = b->axis;
    j["lo"] = b->lo;
    j["hi"] = b->hi;
    j["shift"] = vec_to_json(b->shift);
    j["base"] = shape_to_json(Shape{b->base});
  } else if (const auto* b = std::get_if<EmptyShape>(&s)) {
    j["type"] = "empty";
    j["dim"] = b->dim;
  }
  return j;
}

Shape shape_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "ball")
    return BallShape{vec_from_json(j.at("center")),
                     j.at("radius").get<double>()};
  if (type == "box")
    return BoxShape{vec_from_json(j.at("lo")), vec_from_json(j.at("hi"))};
  if (type == "polygon") return PolygonShape{vecs_from_json(j.at("vertices"))};
  if (type == "ball_union") {
    BallUnionShape s;
    s.dim = j.at("dim").get<int>();
    for (const auto& b : j.at("balls"))
      s.balls.push_back(
          {vec_from_json(b.at("center")), b.at("radius").get<double>()});
    return s;
  }
  if (type == "sheet_circle")
    return SheetCircle{vec_from_json(j.at("center")),
                       j.at("radius").get<double>()};
  if (type == "sheet_sphere")
    return SheetSphere{vec_from_json(j.at("center")),
                       j.at("radius").get<double>()};
  if (type == "sheet_polygon")
    return SheetPolygonBoundary{vecs_from_json(j.at("vertices"))};
  if (type == "sheet_segment")
    return SheetSegment{vec_from_json(j.at("a")), vec_from_json(j.at("b"))};
  if (type == "slab_product") {
    SlabProduct s;
    s.axis = j.at("axis").get<int>();
    s.lo = j.at("lo").get<double>();
    s.hi = j.at("hi").get<double>();
    s.shift = vec_from_json(j.at("shift"));
    s.base = std::get<BallUnionShape>(shape_from_json(j.at("base")));
    return s;
  }
  if (type == "empty") return EmptyShape{j.at("dim").get<int>()};
  throw ConfigError("unknown shape type: " + type);
}

namespace {

json law_to_json(const DeltaLaw& law) {
  json j;
  if (law.kind == DeltaLaw::Kind::Power) {
    j["kind"] = "power";
    j["k"] = law.k;
  } else {
    j["kind"] = "exp";
    j["delta0"] = law.delta0;
  }
  return j;
}

DeltaLaw law_from_json(const json& j) {
  DeltaLaw law;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "power") {
    law.kind = DeltaLaw::Kind::Power;
    law.k = j.at("k").get<double>();
  } else if (kind == "exp") {
    law.kind = DeltaLaw::Kind::Exponential;
    law.delta0 = j.at("delta0").get<double>();
  } else {
    throw ConfigError("unknown delta law kind: " + kind);
  }
  return law;
}

// Fixed-precision JSON dump: nlohmann prints shortest round-trip doubles,
// which is already deterministic; we keep one dump style in one place.
std::string dump(const json& j) { return j.dump(); }

}  // namespace

void write_packing(const std::string& path, const BallPacking& p) {
  std::ostringstream os;
  json header;
  header["dim"] = p.dim;
  header["law"] = law_to_json(p.law);
  header["t_min"] = p.t_min;
  header["seed"] = p.seed;
  header["count"] = p.balls.size();
  header["audit"] = {{"probes", p.audit.probes},
                     {"uncovered", p.audit.uncovered}};
  os << dump(header) << "\n";
  for (const auto& b : p.balls) {
    json line;
    line["x"] = vec_to_json(b.x);
    line["delta"] = b.delta;
    line["rho"] = b.rho;
    os << dump(line) << "\n";
  }
  write_text_atomic(path, os.str());
}

BallPacking read_packing(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ResourceError("cannot open packing file " + path);
  std::string line;
  if (!std::getline(is, line))
    throw ConfigError("packing file has no header: " + path);
  const json header = json::parse(line);
  BallPacking p;
  p.dim = header.at("dim").get<int>();
  p.law = law_from_json(header.at("law"));
  p.t_min = header.at("t_min").get<double>();
  p.seed = header.at("seed").get<std::uint64_t>();
  if (header.contains("audit")) {
    p.audit.probes = header["audit"].at("probes").get<int>();
    p.audit.uncovered = header["audit"].at("uncovered").get<int>();
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const json b = json::parse(line);
    p.balls.push_back({vec_from_json(b.at("x")), b.at("delta").get<double>(),
                       b.at("rho").get<double>()});
  }
  p.validate();
  return p;
}

json scene_to_json(const CylinderScene& s) {
  json j;
  j["D"] = {{"dim", s.base.dim},
            {"law", law_to_json(s.base.law)},
            {"t_min", s.base.t_min},
            {"seed", s.base.seed},
            {"count", s.base.balls.size()}};
  json copies = json::array();
  for (const auto& c : s.copies)
    copies.push_back({{"axis", c.axis}, {"offset", vec_to_json(c.shift)}});
  j["copies"] = copies;
  return j;
}

json summary_to_json(const PackingSummary& s) {
  json j;
  j["count"] = s.count;
  j["volume"] = s.volume;
  j["P_iso"] = s.p_iso;
  j["P_disk"] = s.p_disk;
  j["t"] = vec_to_json(s.ts);
  j["b"] = vec_to_json(s.b);
  return j;
}

std::string report_to_csv(const ConvergenceReport& r) {
  std::ostringstream os;
  os << "r,excess,f,fit_c0,fit_c1,residual,trend\n";
  for (std::size_t i = 0; i < r.rs.size(); ++i)
    os << format_double(r.rs[i]) << ',' << format_double(r.excess[i]) << ','
       << format_double(r.f[i]) << ',' << format_double(r.fit.c0) << ','
       << format_double(r.fit.c1) << ',' << format_double(r.fit.residual)
       << ',' << trend_name(r.trend) << "\n";
  return os.str();
}

json report_to_json(const ConvergenceReport& r) {
  json j;
  j["r"] = vec_to_json(r.rs);
  j["excess"] = vec_to_json(r.excess);
  j["f"] = vec_to_json(r.f);
  j["fit"] = {{"c0", r.fit.c0}, {"c1", r.fit.c1}, {"residual", r.fit.residual}};
  j["trend"] = trend_name(r.trend);
  j["growth_ratio"] = r.growth_ratio;
  return j;
}

json afp_to_json(const AFPReport& r) {
  json j;
  j["gamma_hat"] = r.gamma_hat;
  j["pass"] = r.pass;
  json samples = json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"a", vec_to_json(s.a)},
                       {"r", s.r},
                       {"nu", s.nu},
                       {"proj", s.proj},
                       {"ratio", s.ratio}});
  j["samples"] = samples;
  return j;
}

void write_grid(const std::string& path, const VoxelGrid& g) {
  json header;
  header["dim"] = g.dim;
  header["origin"] = vec_to_json(g.origin);
  header["spacing"] = g.h;
  header["dims"] = {g.dims[0], g.dims[1], g.dims[2]};
  write_text_atomic(path + ".json", header.dump(2) + "\n");
  std::string raw(reinterpret_cast<const char*>(g.words.data()),
                  g.words.size() * sizeof(std::uint64_t));
  write_text_atomic(path + ".bits", raw);
}

VoxelGrid read_grid(const std::string& path) {
  std::ifstream hs(path + ".json");
  if (!hs) throw ResourceError("cannot open grid header " + path + ".json");
  const json header = json::parse(hs);
  VoxelGrid g;
  g.dim = header.at("dim").get<int>();
  g.origin = vec_from_json(header.at("origin"));
  g.h = header.at("spacing").get<double>();
  for (int i = 0; i < 3; ++i) g.dims[i] = header.at("dims")[i].get<int>();
  g.wpr = (std::size_t(g.dims[0]) + 63) / 64;
  g.words.assign(g.wpr * g.rows(), 0);
  std::ifstream bs(path + ".bits", std::ios::binary);
  if (!bs) throw ResourceError("cannot open grid bits " + path + ".bits");
  bs.read(reinterpret_cast<char*>(g.words.data()),
          std::streamsize(g.words.size() * sizeof(std::uint64_t)));
  if (std::size_t(bs.gcount()) != g.words.size() * sizeof(std::uint64_t))
    throw ConfigError("grid bits file truncated: " + path + ".bits");
  return g;
}

}  // namespace mink
