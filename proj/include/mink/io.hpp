#pragma once

#include <string>

#include "mink/estimate.hpp"
#include "mink/packing.hpp"

#include "json.hpp"

namespace mink {

// All writers are atomic (temp file + rename) and format doubles with %.17g,
// so identical inputs give byte-identical files.
std::string format_double(double v);
void write_text_atomic(const std::string& path, const std::string& content);

nlohmann::json body_to_json(const StructuringElement& q);
StructuringElement body_from_json(const nlohmann::json& j);

nlohmann::json shape_to_json(const Shape& s);
Shape shape_from_json(const nlohmann::json& j);

// Packing file: one JSON object per line, {"x": [...], "delta": d, "rho": r},
// preceded by a header line with dim/law/t_min/seed/audit.
void write_packing(const std::string& path, const BallPacking& p);
BallPacking read_packing(const std::string& path);  // revalidates invariants

nlohmann::json scene_to_json(const CylinderScene& s);

nlohmann::json summary_to_json(const PackingSummary& s);

std::string report_to_csv(const ConvergenceReport& r);
nlohmann::json report_to_json(const ConvergenceReport& r);

nlohmann::json afp_to_json(const AFPReport& r);

// Grid dump: <path>.json header {origin, spacing, dims} + <path>.bits raw
// little-endian words.
void write_grid(const std::string& path, const VoxelGrid& g);
VoxelGrid read_grid(const std::string& path);

}  // namespace mink
