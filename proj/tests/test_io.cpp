#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "mink/io.hpp"

using namespace mink;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

fs::path tmpdir() {
  const auto d = fs::temp_directory_path() / "mink_io_test";
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("structuring elements round-trip through JSON") {
  const std::vector<StructuringElement> bodies = {
      StructuringElement::singleton({1, 2}),
      StructuringElement::segment({0, 0}, {1, 0.5}),
      StructuringElement::polytope({{0, 0}, {1, 0}, {0, 1}}),
      StructuringElement::ball({0, 0, 0}, 1.0,
                               {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}),
      StructuringElement::ball({0.5, 0.5}, 0.25)};
  for (const auto& q : bodies) {
    const auto back = body_from_json(body_to_json(q));
    CHECK(back.kind() == q.kind());
    CHECK(back.dim() == q.dim());
    Vec v(q.dim(), 0.3);
    v[0] = -0.7;
    CHECK(back.support(v) == doctest::Approx(q.support(v)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(body_from_json({{"type", "mystery"}}), ConfigError);
}

TEST_CASE("shapes round-trip through JSON") {
  const std::vector<Shape> shapes = {
      BallShape{{0, 0}, 1},
      BoxShape{{0, 0, 0}, {1, 2, 3}},
      PolygonShape{{{0, 0}, {1, 0}, {0, 1}}},
      SheetCircle{{0, 0}, 0.5},
      SlabProduct{BallUnionShape{2, {{{0.1, 0.2}, 0.05}}}, 1, 0, 1, {4, 0, 0}},
      EmptyShape{3}};
  for (const auto& s : shapes) {
    const auto back = shape_from_json(shape_to_json(s));
    CHECK(back.index() == s.index());
    CHECK(shape_dim(back) == shape_dim(s));
    const auto [lo1, hi1] = shape_bounds(s);
    const auto [lo2, hi2] = shape_bounds(back);
    CHECK(dist(lo1, lo2) == doctest::Approx(0));
    CHECK(dist(hi1, hi2) == doctest::Approx(0));
  }
}

TEST_CASE("packing files: round-trip, revalidation, determinism") {
  DeltaLaw law;
  law.kind = DeltaLaw::Kind::Power;
  law.k = 3;
  const auto p = gen_packing(2, law, 0.8, 17);
  const auto dir = tmpdir();
  const auto path = (dir / "p.jsonl").string();
  write_packing(path, p);
  const auto q = read_packing(path);
  REQUIRE(q.balls.size() == p.balls.size());
  CHECK(q.t_min == p.t_min);
  CHECK(q.seed == p.seed);
  for (std::size_t i = 0; i < p.balls.size(); ++i)
    CHECK(q.balls[i].x == p.balls[i].x);

  write_packing((dir / "p2.jsonl").string(), p);
  CHECK(slurp(dir / "p.jsonl") == slurp(dir / "p2.jsonl"));

  // corrupt a radius: revalidation on load must reject
  auto text = slurp(dir / "p.jsonl");
  const auto pos = text.find("\"delta\":");
  text.replace(pos, 9, "\"delta\":9");
  write_text_atomic((dir / "bad.jsonl").string(), text);
  CHECK_THROWS_AS(read_packing((dir / "bad.jsonl").string()), ConfigError);
}

TEST_CASE("grids round-trip through the raw dump") {
  auto g = VoxelGrid::make(2, {0, 0}, {1, 1}, 0.125);
  g.set(1, 2);
  g.set(7, 7);
  const auto dir = tmpdir();
  write_grid((dir / "g").string(), g);
  const auto back = read_grid((dir / "g").string());
  CHECK(back.words == g.words);
  CHECK(back.dims == g.dims);
  CHECK(back.h == g.h);
}

TEST_CASE("report CSV shape") {
  ConvergenceReport r;
  r.rs = {0.2, 0.1};
  r.excess = {0.9, 0.45};
  r.f = {4.5, 4.5};
  r.fit = {4.5, 0.0, 0.0};
  r.trend = Trend::Converging;
  const auto csv = report_to_csv(r);
  CHECK(csv.find("r,excess,f,fit_c0,fit_c1,residual,trend") == 0);
  CHECK(csv.find("converging") != std::string::npos);
  const auto j = report_to_json(r);
  CHECK(j["trend"] == "converging");
  CHECK(j["fit"]["c0"] == 4.5);
}
