#pragma once

#include <json.hpp>

#include <string>

#include "tfsieve/gabor_discrete.hpp"
#include "tfsieve/region_density.hpp"
#include "tfsieve/sieve_bounds.hpp"
#include "tfsieve/tf_grid.hpp"

namespace tfsieve::io {

using nlohmann::json;

std::string read_file(const std::string& path);
// Writes to a temporary sibling and renames it over path.
void write_file_atomic(const std::string& path, const std::string& contents);

json grid_to_json(const PhaseGrid& grid);
PhaseGrid grid_from_json(const json& j);

// First line: "# TFF1 x_start=.. x_step=.. x_count=.. xi_start=.. xi_step=.. xi_count=..",
// then "x,xi,re,im" and one row per cell, x-major.
std::string tffield_to_csv(const TFField& F);
TFField tffield_from_csv(const std::string& text);

// 48-byte little-endian header: "TFF1", u32 x_count, u32 xi_count, u32 reserved,
// f64 x_start, x_step, xi_start, xi_step; then re, im pairs x-major.
std::string tffield_to_binary(const TFField& F);
TFField tffield_from_binary(const std::string& bytes);

// Picks the format from the leading magic.
TFField load_tffield(const std::string& path);
void save_tffield(const std::string& path, const TFField& F);

Region region_from_json(const json& j);
json region_to_json(const Region& region);

// Binary PGM, width x_count, height xi_count, top row = largest xi.
std::string mask_to_pgm(const Mask& mask);
Mask mask_from_pgm(const std::string& bytes, const PhaseGrid& grid);
// One row per x index, comma-separated 0/1 across xi.
Mask mask_from_csv(const std::string& text, const PhaseGrid& grid);

// .json shape files; .pgm and .csv masks take their grid from a sidecar
// <stem>.json when present, otherwise from fallback.
Region load_region(const std::string& path, const PhaseGrid& fallback);

PointSet pointset_from_csv(const std::string& text);
Lattice lattice_from_json(const json& j);

std::string signal_to_csv(const Signal& s);

json certificate_to_json(const SieveCertificate& c, const PhaseGrid& grid);

// Magnitude heatmap scaled to the field maximum.
std::string heatmap_pgm(const TFField& F);

}  // namespace tfsieve::io
