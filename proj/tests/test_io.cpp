#include <doctest.h>

#include <filesystem>
#include <random>

#include "tfsieve/error.hpp"
#include "tfsieve/io.hpp"

using namespace tfsieve;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("tfsieve_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

TFField sample_field() {
  const PhaseGrid g(TimeAxis{-1.0, 0.25, 9}, TimeAxis{-0.6, 0.3, 5});
  TFField F(g);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd;
  for (cplx& v : F.values()) v = cplx(nd(rng), nd(rng)) * 1e-3;
  F(0, 0) = cplx(1.0 / 3.0, -0.0);
  return F;
}

bool same(const TFField& a, const TFField& b) { return a.grid().same_as(b.grid()) && a.values() == b.values(); }

}  // namespace

TEST_CASE("tffield: CSV and binary roundtrips are exact") {
  const TFField F = sample_field();
  CHECK(same(io::tffield_from_csv(io::tffield_to_csv(F)), F));
  const std::string bin = io::tffield_to_binary(F);
  CHECK(bin.size() == 48 + 16 * F.values().size());
  CHECK(bin.substr(0, 4) == "TFF1");
  CHECK(same(io::tffield_from_binary(bin), F));

  TempDir tmp;
  io::save_tffield(tmp / "f.csv", F);
  io::save_tffield(tmp / "f.tff", F);
  CHECK(io::read_file(tmp / "f.csv").rfind("# TFF1", 0) == 0);
  CHECK(same(io::load_tffield(tmp / "f.csv"), F));
  CHECK(same(io::load_tffield(tmp / "f.tff"), F));
}

TEST_CASE("tffield: malformed input is rejected") {
  const TFField F = sample_field();
  std::string bin = io::tffield_to_binary(F);
  CHECK_THROWS_AS(io::tffield_from_binary(bin.substr(0, bin.size() - 3)), Error);
  CHECK_THROWS_AS(io::tffield_from_binary("TFF2" + bin.substr(4)), Error);
  std::string csv = io::tffield_to_csv(F);
  CHECK_THROWS_AS(io::tffield_from_csv(csv.substr(0, csv.size() / 2)), Error);
  CHECK_THROWS_AS(io::tffield_from_csv("x,xi,re,im\n0,0,1,0\n"), Error);
  CHECK_THROWS_AS(io::load_tffield("/nonexistent/field.tff"), Error);
}

TEST_CASE("region: JSON roundtrip and validation") {
  const Region r = Region::from_shapes({Disc{{0.5, -1.0}, 0.75}, Rect{{-2.0, -1.0}, {-1.0, 0.5}}}, true);
  const io::json j = io::region_to_json(r);
  CHECK(j["complement"] == true);
  CHECK(j["shapes"][0]["type"] == "disc");
  const Region back = io::region_from_json(j);
  CHECK(back.complement());
  CHECK(back.shapes().size() == 2);
  CHECK(std::get<Disc>(back.shapes()[0]).radius == 0.75);
  CHECK(std::get<Rect>(back.shapes()[1]).max.freq == 0.5);

  CHECK_THROWS_AS(io::region_from_json(io::json::parse(R"({"shapes":[{"type":"star"}]})")), Error);
  CHECK_THROWS_AS(io::region_from_json(io::json::parse(R"({"shapes":[{"type":"disc","center":[0,0],"radius":-1}]})")),
                  Error);
  CHECK_THROWS_AS(
      io::region_from_json(io::json::parse(R"({"shapes":[{"type":"rect","min":[1,0],"max":[0,1]}]})")), Error);
  CHECK_THROWS_AS(io::region_from_json(io::json::parse(R"({"complement":true})")), Error);
}

TEST_CASE("masks: PGM and CSV roundtrips with sidecar grids") {
  const PhaseGrid g(TimeAxis{-1.0, 0.5, 5}, TimeAxis{0.0, 0.25, 3});
  Mask m(g);
  m.set(0, 0, true);
  m.set(4, 2, true);
  m.set(2, 1, true);
  const std::string pgm = io::mask_to_pgm(m);
  CHECK(io::mask_from_pgm(pgm, g).cells() == m.cells());
  // Top row of the image is the largest frequency.
  CHECK(static_cast<unsigned char>(pgm[pgm.size() - 15 + 4]) == 255);  // (4, 2)
  CHECK(static_cast<unsigned char>(pgm[pgm.size() - 15 + 0]) == 0);    // (0, 2)
  CHECK(static_cast<unsigned char>(pgm[pgm.size() - 5]) == 255);       // (0, 0)

  TempDir tmp;
  io::write_file_atomic(tmp / "m.pgm", pgm);
  io::write_file_atomic(tmp / "m.json", io::grid_to_json(g).dump());
  const Region r = io::load_region(tmp / "m.pgm", PhaseGrid::centered(1.0, 1.0));
  REQUIRE(r.is_mask());
  CHECK(r.mask().grid().same_as(g));
  CHECK(r.mask().cells() == m.cells());

  io::write_file_atomic(tmp / "c.csv", "1,0,0\n0,0,0\n0,1,0\n0,0,0\n0,0,1\n");
  const Region c = io::load_region(tmp / "c.csv", g);
  CHECK(c.mask().cells() == m.cells());

  CHECK_THROWS_AS(io::mask_from_csv("1,0\n", g), Error);
  CHECK_THROWS_AS(io::mask_from_csv("1,0,2\n0,0,0\n0,1,0\n0,0,0\n0,0,1\n", g), Error);
  CHECK_THROWS_AS(io::mask_from_pgm("P5\n2 2\n255\n\x01\x00\x00\x00", PhaseGrid::centered(0.5, 1.0)), Error);
  CHECK_THROWS_AS(io::load_region(tmp / "m.txt", g), Error);
}

TEST_CASE("point sets and lattices") {
  const PointSet p = io::pointset_from_csv("x,xi\n0,0\n1.5,-2\n");
  REQUIRE(p.points.size() == 2);
  CHECK(p.points[1].freq == -2.0);
  CHECK_THROWS_AS(io::pointset_from_csv("0,0\n0,0\n"), Error);
  CHECK_THROWS_AS(io::pointset_from_csv("0,0,1\n"), Error);

  const Lattice L = io::lattice_from_json(io::json::parse(R"({"generator":[[0.5,0],[0,0.5]],"window_order":1})"));
  CHECK(L.density() == doctest::Approx(4.0));
  CHECK(L.window_order == 1);
  CHECK_THROWS_AS(io::lattice_from_json(io::json::parse(R"({"generator":[[1,2],[2,4]]})")), Error);
  CHECK_THROWS_AS(io::lattice_from_json(io::json::parse(R"({"generator":[1,2]})")), Error);
}

TEST_CASE("certificate JSON keys") {
  SieveCertificate c;
  c.order = 1;
  c.radius = 0.5;
  c.bound_a = 0.25;
  const io::json j = io::certificate_to_json(c, PhaseGrid::centered(1.0, 0.5));
  for (const char* key : {"r", "R", "p", "A_r", "rho", "C_r", "bound_A", "bound_rho", "grid_meta", "error_estimates"})
    CHECK(j.contains(key));
  CHECK(j["grid_meta"]["x_count"] == 5);
  CHECK(j["error_estimates"].contains("edge_effect"));
}

TEST_CASE("atomic writes leave no temporary files behind") {
  TempDir tmp;
  io::write_file_atomic(tmp / "a.txt", "one");
  io::write_file_atomic(tmp / "a.txt", "two");
  CHECK(io::read_file(tmp / "a.txt") == "two");
  int n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(tmp.path)) ++n;
  CHECK(n == 1);
  CHECK_THROWS_AS(io::write_file_atomic(tmp / "missing/dir/a.txt", "x"), Error);
}

TEST_CASE("heatmap scales to the field maximum") {
  const TFField F = sample_field();
  const std::string pgm = io::heatmap_pgm(F);
  const std::string header = "P5\n9 5\n255\n";
  CHECK(pgm.rfind(header, 0) == 0);
  CHECK(pgm.size() == header.size() + 45);
  int peak = 0;
  for (std::size_t n = header.size(); n < pgm.size(); ++n) peak = std::max(peak, int(static_cast<unsigned char>(pgm[n])));
  CHECK(peak == 255);
}
