#include "tfsieve/io.hpp"

#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tfsieve/error.hpp"

namespace tfsieve::io {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
void put_le(std::string& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.append(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(const std::string& in, std::size_t pos) {
  if (pos + sizeof(T) > in.size()) throw Error(ErrorCode::InvalidInput, "binary field is truncated");
  unsigned char b[sizeof(T)];
  std::memcpy(b, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidInput, "not a number: '" + s + "'");
  }
  while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
  if (used != s.size()) throw Error(ErrorCode::InvalidInput, "not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  return parts;
}

std::string trim_cr(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

PhasePoint point_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::InvalidInput, "expected a point [x, xi]");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "cannot read " + path);
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw Error(ErrorCode::Io, "cannot write " + tmp);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw Error(ErrorCode::Io, "cannot move output into place at " + path);
  }
}

json grid_to_json(const PhaseGrid& g) {
  return json{{"x_start", g.time.start}, {"x_step", g.time.step}, {"x_count", g.time.count},
              {"xi_start", g.freq.start}, {"xi_step", g.freq.step}, {"xi_count", g.freq.count}};
}

PhaseGrid grid_from_json(const json& j) {
  try {
    return PhaseGrid(TimeAxis{j.at("x_start").get<double>(), j.at("x_step").get<double>(), j.at("x_count").get<int>()},
                     TimeAxis{j.at("xi_start").get<double>(), j.at("xi_step").get<double>(), j.at("xi_count").get<int>()});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("grid metadata: ") + e.what());
  }
}

std::string tffield_to_csv(const TFField& F) {
  const PhaseGrid& g = F.grid();
  std::string out = "# TFF1 x_start=" + fmt(g.time.start) + " x_step=" + fmt(g.time.step) +
                    " x_count=" + std::to_string(g.time.count) + " xi_start=" + fmt(g.freq.start) +
                    " xi_step=" + fmt(g.freq.step) + " xi_count=" + std::to_string(g.freq.count) + "\n";
  out += "x,xi,re,im\n";
  for (int i = 0; i < g.nx(); ++i)
    for (int k = 0; k < g.nxi(); ++k) {
      const cplx v = F(i, k);
      out += fmt(g.time.at(i)) + "," + fmt(g.freq.at(k)) + "," + fmt(v.real()) + "," + fmt(v.imag()) + "\n";
    }
  return out;
}

TFField tffield_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# TFF1", 0) != 0)
    throw Error(ErrorCode::InvalidInput, "CSV field lacks the TFF1 metadata line");
  json meta;
  for (const std::string& tok : split(trim_cr(line.substr(6)), ' ')) {
    if (tok.empty()) continue;
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidInput, "bad metadata token '" + tok + "'");
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key.ends_with("count"))
      meta[key] = static_cast<int>(parse_double(val));
    else
      meta[key] = parse_double(val);
  }
  const PhaseGrid grid = grid_from_json(meta);
  if (!std::getline(in, line)) throw Error(ErrorCode::InvalidInput, "CSV field lacks its column header");
  TFField F(grid);
  std::size_t n = 0;
  while (std::getline(in, line)) {
    line = trim_cr(line);
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() != 4) throw Error(ErrorCode::InvalidInput, "CSV field rows need 4 columns");
    if (n >= grid.size()) throw Error(ErrorCode::InvalidInput, "CSV field has too many rows");
    F.values()[n++] = cplx(parse_double(parts[2]), parse_double(parts[3]));
  }
  if (n != grid.size()) throw Error(ErrorCode::InvalidInput, "CSV field has too few rows");
  return F;
}

std::string tffield_to_binary(const TFField& F) {
  const PhaseGrid& g = F.grid();
  std::string out = "TFF1";
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.time.count));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.freq.count));
  put_le<std::uint32_t>(out, 0);
  put_le<double>(out, g.time.start);
  put_le<double>(out, g.time.step);
  put_le<double>(out, g.freq.start);
  put_le<double>(out, g.freq.step);
  out.reserve(out.size() + 16 * g.size());
  for (const cplx& v : F.values()) {
    put_le<double>(out, v.real());
    put_le<double>(out, v.imag());
  }
  return out;
}

TFField tffield_from_binary(const std::string& bytes) {
  if (bytes.size() < 48 || bytes.compare(0, 4, "TFF1") != 0) throw Error(ErrorCode::InvalidInput, "not a TFF1 binary field");
  const auto nx = get_le<std::uint32_t>(bytes, 4), nxi = get_le<std::uint32_t>(bytes, 8);
  const PhaseGrid grid(TimeAxis{get_le<double>(bytes, 16), get_le<double>(bytes, 24), static_cast<int>(nx)},
                       TimeAxis{get_le<double>(bytes, 32), get_le<double>(bytes, 40), static_cast<int>(nxi)});
  if (bytes.size() != 48 + 16 * grid.size()) throw Error(ErrorCode::InvalidInput, "binary field size does not match header");
  TFField F(grid);
  for (std::size_t n = 0; n < grid.size(); ++n)
    F.values()[n] = cplx(get_le<double>(bytes, 48 + 16 * n), get_le<double>(bytes, 56 + 16 * n));
  return F;
}

TFField load_tffield(const std::string& path) {
  const std::string data = read_file(path);
  if (data.rfind("TFF1", 0) == 0) return tffield_from_binary(data);
  return tffield_from_csv(data);
}

void save_tffield(const std::string& path, const TFField& F) {
  const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  write_file_atomic(path, csv ? tffield_to_csv(F) : tffield_to_binary(F));
}

Region region_from_json(const json& j) {
  try {
    std::vector<Shape> shapes;
    for (const json& s : j.at("shapes")) {
      const std::string type = s.at("type").get<std::string>();
      if (type == "disc")
        shapes.emplace_back(Disc{point_from_json(s.at("center")), s.at("radius").get<double>()});
      else if (type == "rect")
        shapes.emplace_back(Rect{point_from_json(s.at("min")), point_from_json(s.at("max"))});
      else
        throw Error(ErrorCode::InvalidInput, "unknown shape type '" + type + "'");
    }
    return Region::from_shapes(std::move(shapes), j.value("complement", false));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("region spec: ") + e.what());
  }
}

json region_to_json(const Region& region) {
  if (region.is_mask()) throw Error(ErrorCode::InvalidInput, "raster regions are stored as masks");
  json shapes = json::array();
  for (const Shape& s : region.shapes()) {
    if (const Disc* d = std::get_if<Disc>(&s))
      shapes.push_back({{"type", "disc"}, {"center", {d->center.time, d->center.freq}}, {"radius", d->radius}});
    else {
      const Rect& r = std::get<Rect>(s);
      shapes.push_back({{"type", "rect"}, {"min", {r.min.time, r.min.freq}}, {"max", {r.max.time, r.max.freq}}});
    }
  }
  return json{{"shapes", shapes}, {"complement", region.complement()}};
}

std::string mask_to_pgm(const Mask& mask) {
  const PhaseGrid& g = mask.grid();
  std::string out = "P5\n" + std::to_string(g.nx()) + " " + std::to_string(g.nxi()) + "\n255\n";
  for (int k = g.nxi() - 1; k >= 0; --k)
    for (int i = 0; i < g.nx(); ++i) out.push_back(static_cast<char>(mask.at(i, k) ? 255 : 0));
  return out;
}

Mask mask_from_pgm(const std::string& bytes, const PhaseGrid& grid) {
  std::istringstream in(bytes);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic;
  auto skip_comments = [&] {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string c;
      std::getline(in, c);
      in >> std::ws;
    }
  };
  skip_comments();
  in >> w;
  skip_comments();
  in >> h;
  skip_comments();
  in >> maxval;
  if (magic != "P5" || !in || maxval != 255) throw Error(ErrorCode::InvalidInput, "mask must be an 8-bit binary PGM");
  in.get();
  if (w != grid.nx() || h != grid.nxi()) throw Error(ErrorCode::InvalidInput, "mask size does not match its grid");
  std::string pix(static_cast<std::size_t>(w) * h, '\0');
  in.read(pix.data(), static_cast<std::streamsize>(pix.size()));
  if (in.gcount() != static_cast<std::streamsize>(pix.size())) throw Error(ErrorCode::InvalidInput, "PGM is truncated");
  Mask m(grid);
  for (int row = 0; row < h; ++row)
    for (int i = 0; i < w; ++i) {
      const auto v = static_cast<unsigned char>(pix[static_cast<std::size_t>(row) * w + i]);
      if (v != 0 && v != 255) throw Error(ErrorCode::InvalidInput, "mask pixels must be 0 or 255");
      m.set(i, h - 1 - row, v == 255);
    }
  return m;
}

Mask mask_from_csv(const std::string& text, const PhaseGrid& grid) {
  std::istringstream in(text);
  std::string line;
  Mask m(grid);
  int i = 0;
  while (std::getline(in, line)) {
    line = trim_cr(line);
    if (line.empty()) continue;
    if (i >= grid.nx()) throw Error(ErrorCode::InvalidInput, "mask CSV has too many rows");
    const auto parts = split(line, ',');
    if (static_cast<int>(parts.size()) != grid.nxi()) throw Error(ErrorCode::InvalidInput, "mask CSV row has the wrong length");
    for (int k = 0; k < grid.nxi(); ++k) {
      const std::string v = trim_cr(parts[k]);
      if (v != "0" && v != "1") throw Error(ErrorCode::InvalidInput, "mask CSV values must be 0 or 1");
      m.set(i, k, v == "1");
    }
    ++i;
  }
  if (i != grid.nx()) throw Error(ErrorCode::InvalidInput, "mask CSV has too few rows");
  return m;
}

Region load_region(const std::string& path, const PhaseGrid& fallback) {
  const std::filesystem::path p(path);
  const std::string ext = p.extension().string();
  if (ext == ".json") {
    json j;
    try {
      j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::InvalidInput, std::string("region file: ") + e.what());
    }
    return region_from_json(j);
  }
  PhaseGrid grid = fallback;
  std::filesystem::path side = p;
  side.replace_extension(".json");
  if (std::filesystem::exists(side)) {
    try {
      grid = grid_from_json(json::parse(read_file(side.string())));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::InvalidInput, std::string("mask sidecar: ") + e.what());
    }
  }
  if (ext == ".pgm") return Region::from_mask(mask_from_pgm(read_file(path), grid));
  if (ext == ".csv") return Region::from_mask(mask_from_csv(read_file(path), grid));
  throw Error(ErrorCode::InvalidInput, "unknown region file type '" + ext + "'");
}

PointSet pointset_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<PhasePoint> pts;
  while (std::getline(in, line)) {
    line = trim_cr(line);
    if (line.empty() || line[0] == '#') continue;
    const auto parts = split(line, ',');
    if (parts.size() != 2) throw Error(ErrorCode::InvalidInput, "point rows need 2 columns");
    // Allow a header row.
    if (pts.empty() && !parts[0].empty() && std::isalpha(static_cast<unsigned char>(parts[0][0]))) continue;
    pts.push_back({parse_double(parts[0]), parse_double(parts[1])});
  }
  return PointSet(std::move(pts));
}

Lattice lattice_from_json(const json& j) {
  try {
    Lattice L;
    const json& g = j.at("generator");
    if (!g.is_array() || g.size() != 2) throw Error(ErrorCode::InvalidInput, "generator must be 2x2");
    for (int a = 0; a < 2; ++a) {
      if (!g[a].is_array() || g[a].size() != 2) throw Error(ErrorCode::InvalidInput, "generator must be 2x2");
      for (int b = 0; b < 2; ++b) L.generator(a, b) = g[a][b].get<double>();
    }
    if (j.contains("window_order")) L.window_order = j["window_order"].get<int>();
    if (j.contains("box_min")) L.box_min = point_from_json(j["box_min"]);
    if (j.contains("box_max")) L.box_max = point_from_json(j["box_max"]);
    L.validate();
    return L;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("lattice spec: ") + e.what());
  }
}

std::string signal_to_csv(const Signal& s) {
  std::string out = "t,re,im\n";
  for (int n = 0; n < s.axis.count; ++n)
    out += fmt(s.axis.at(n)) + "," + fmt(s.samples[n].real()) + "," + fmt(s.samples[n].imag()) + "\n";
  return out;
}

json certificate_to_json(const SieveCertificate& c, const PhaseGrid& grid) {
  return json{{"r", c.order},
              {"R", c.radius},
              {"p", c.p},
              {"A_r", c.a_density},
              {"rho", c.nyquist_density},
              {"C_r", c.c_constant},
              {"bound_A", c.bound_a},
              {"bound_rho", c.bound_rho},
              {"grid_meta", grid_to_json(grid)},
              {"error_estimates", {{"A_r", c.a_error}, {"rho", c.rho_error}, {"edge_effect", c.edge_effect}}}};
}

std::string heatmap_pgm(const TFField& F) {
  const PhaseGrid& g = F.grid();
  const double peak = F.max_abs();
  std::string out = "P5\n" + std::to_string(g.nx()) + " " + std::to_string(g.nxi()) + "\n255\n";
  for (int k = g.nxi() - 1; k >= 0; --k)
    for (int i = 0; i < g.nx(); ++i) {
      const double v = peak > 0 ? std::abs(F(i, k)) / peak : 0.0;
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v))));
    }
  return out;
}

}  // namespace tfsieve::io
