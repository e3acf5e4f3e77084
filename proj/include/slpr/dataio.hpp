#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "slpr/codec.hpp"
#include "slpr/eval.hpp"
#include "slpr/geom.hpp"
#include "slpr/suppress.hpp"

namespace slpr {

enum class AnnoFormat { kIcdar15, kCtw1500, kPolygonJson };

/// One ground-truth region as stored in an annotation file.
struct AnnotationRecord {
    Polygond polygon;
    bool dont_care = false;
    std::string transcription;
};

inline GroundTruthd to_ground_truth(const AnnotationRecord& r) { return {r.polygon, r.dont_care}; }

/// "x1,y1,...,x4,y4,transcription"; transcription "###" marks don't-care and
/// may itself contain commas (only the first 8 fields are numeric). A UTF-8
/// BOM and trailing CR are tolerated.
AnnotationRecord parse_icdar15(const std::string& line);

/// 32 comma-separated integers: x_min,y_min,x_max,y_max then 14 (dx,dy)
/// offsets relative to (x_min,y_min). The stated box must equal the vertex
/// bounding box and offsets must be non-negative.
AnnotationRecord parse_ctw1500(const std::string& line);

std::string write_icdar15(const AnnotationRecord& r);
std::string write_ctw1500(const AnnotationRecord& r);

/// Detection lines reuse the annotation grammars with a trailing score field:
/// icdar15 = 8 integers + score, ctw1500 = 32 integers + score. Scores are
/// printed with shortest round-trip formatting. Coordinates are rounded to
/// the nearest integer for the two text formats (both benchmarks use integer
/// pixels); polygon_json keeps exact floating-point values.
std::string write_detection_line(const Detectiond& det, AnnoFormat fmt);
Detectiond parse_detection_line(const std::string& line, AnnoFormat fmt, std::int64_t fallback_id);

// ---- whole-file helpers -------------------------------------------------
// Text files are LF-terminated, one record per line; blank lines are skipped.
// Parse errors are rethrown with "file:line:" context. polygon_json files
// hold one JSON array of {"polygon": [[x,y],...], "score", "dont_care", "id"}.

std::vector<AnnotationRecord> read_annotation_file(const std::filesystem::path& file, AnnoFormat fmt);
void write_annotation_file(const std::filesystem::path& file, const std::vector<AnnotationRecord>& recs,
                           AnnoFormat fmt);

std::vector<Detectiond> read_detection_file(const std::filesystem::path& file, AnnoFormat fmt);
void write_detection_file(const std::filesystem::path& file, const std::vector<Detectiond>& dets, AnnoFormat fmt);

/// Target files: one region per line, 4 + 4n space-separated decimals
/// (x_min y_min x_max y_max, then the 2n line_x values, then the 2n line_y
/// values), shortest round-trip formatting, "#" lines ignored.
std::vector<SlprTargetd> read_target_file(const std::filesystem::path& file);
void write_target_file(const std::filesystem::path& file, const std::vector<SlprTargetd>& targets);

/// Image id for gt/res pairing: file stem with a leading "gt_", "res_" or
/// "t_" prefix removed ("gt_42.txt" -> "42").
std::string image_id(const std::filesystem::path& file);

/// Sorted list of regular files in a directory with the given extension.
std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir, const std::string& extension);

/// Arc-length resampling of an even-count closed polygon to exactly 14
/// vertices by resampling each half (the two long-side chains of a chain
/// restoration, or the two opposite sides of a quad) to 7 points. Identity on
/// 14-vertex polygons; FormatError on odd vertex counts.
Polygond to_fourteen_vertices(const Polygond& polygon);

}  // namespace slpr
