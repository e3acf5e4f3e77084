#include "slpr/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string_view>

#include "json.hpp"
#include "slpr/detail/numio.hpp"
#include "slpr/errors.hpp"

namespace slpr {
namespace {

using json = nlohmann::ordered_json;

constexpr std::string_view kBom = "\xEF\xBB\xBF";

std::string_view strip_icdar_line(std::string_view s) {
    if (s.substr(0, kBom.size()) == kBom) s.remove_prefix(kBom.size());
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

long long round_px(double v) { return std::llround(v); }

double parse_coord(std::string_view tok, const char* what) {
    double v = 0.0;
    if (!detail::parse_double(tok, v)) {
        throw ParseError(std::string("bad ") + what + " '" + std::string(tok) + "'");
    }
    return v;
}

long long parse_int_field(std::string_view tok) {
    long long v = 0;
    if (!detail::parse_ll(tok, v)) {
        throw ParseError("bad integer field '" + std::string(tok) + "'");
    }
    return v;
}

double parse_score(std::string_view tok) {
    double s = 0.0;
    if (!detail::parse_double(tok, s) || s < 0.0 || s > 1.0) {
        throw ParseError("score must be a number in [0, 1], got '" + std::string(tok) + "'");
    }
    return s;
}

Polygond icdar_vertices(const std::vector<std::string_view>& fields) {
    Polygond poly;
    poly.reserve(4);
    for (std::size_t i = 0; i < 4; ++i) {
        const double x = parse_coord(fields[2 * i], "coordinate");
        const double y = parse_coord(fields[2 * i + 1], "coordinate");
        poly.emplace_back(x, y);
    }
    validate_polygon(poly);
    return poly;
}

/// 32 integers: box, then 14 offsets from the box's min corner. Offsets must
/// stay inside the box and the vertices must fill it exactly, which is what
/// makes write(parse(line)) byte-identical.
Polygond ctw_vertices(const std::vector<std::string_view>& fields) {
    long long vals[32];
    for (std::size_t i = 0; i < 32; ++i) vals[i] = parse_int_field(fields[i]);
    const long long x_min = vals[0], y_min = vals[1], x_max = vals[2], y_max = vals[3];
    if (x_min >= x_max || y_min >= y_max) throw ParseError("stated box is empty");
    Polygond poly;
    poly.reserve(14);
    long long vx_min = vals[4] + x_min, vx_max = vx_min, vy_min = vals[5] + y_min, vy_max = vy_min;
    for (std::size_t i = 0; i < 14; ++i) {
        const long long dx = vals[4 + 2 * i];
        const long long dy = vals[5 + 2 * i];
        if (dx < 0 || dy < 0 || x_min + dx > x_max || y_min + dy > y_max) {
            throw ParseError("vertex offset outside the stated box");
        }
        const long long vx = x_min + dx;
        const long long vy = y_min + dy;
        vx_min = std::min(vx_min, vx);
        vx_max = std::max(vx_max, vx);
        vy_min = std::min(vy_min, vy);
        vy_max = std::max(vy_max, vy);
        poly.emplace_back(static_cast<double>(vx), static_cast<double>(vy));
    }
    if (vx_min != x_min || vy_min != y_min || vx_max != x_max || vy_max != y_max) {
        throw ParseError("stated box does not match the vertex bounding box");
    }
    validate_polygon(poly);
    return poly;
}

std::string icdar_coords(const Polygond& poly) {
    std::string out;
    for (const auto& v : poly) {
        out += std::to_string(round_px(v.x()));
        out += ',';
        out += std::to_string(round_px(v.y()));
        out += ',';
    }
    out.pop_back();
    return out;
}

std::string ctw_coords(const Polygond& poly) {
    long long xs[14], ys[14];
    for (std::size_t i = 0; i < 14; ++i) {
        xs[i] = round_px(poly[i].x());
        ys[i] = round_px(poly[i].y());
    }
    const long long x_min = *std::min_element(xs, xs + 14);
    const long long x_max = *std::max_element(xs, xs + 14);
    const long long y_min = *std::min_element(ys, ys + 14);
    const long long y_max = *std::max_element(ys, ys + 14);
    if (x_min >= x_max || y_min >= y_max) throw FormatError("polygon rounds to an empty box");
    std::string out = std::to_string(x_min) + ',' + std::to_string(y_min) + ',' + std::to_string(x_max) + ',' +
                      std::to_string(y_max);
    for (std::size_t i = 0; i < 14; ++i) {
        out += ',';
        out += std::to_string(xs[i] - x_min);
        out += ',';
        out += std::to_string(ys[i] - y_min);
    }
    return out;
}

json polygon_to_json(const Polygond& poly) {
    json arr = json::array();
    for (const auto& v : poly) arr.push_back(json::array({v.x(), v.y()}));
    return arr;
}

Polygond polygon_from_json(const json& arr) {
    if (!arr.is_array() || arr.size() < 3) throw ParseError("'polygon' must be an array of at least 3 points");
    Polygond poly;
    poly.reserve(arr.size());
    for (const auto& pt : arr) {
        if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
            throw ParseError("polygon points must be [x, y] number pairs");
        }
        poly.emplace_back(pt[0].get<double>(), pt[1].get<double>());
    }
    validate_polygon(poly);
    return poly;
}

json load_json_array(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open " + file.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError(file.string() + ": " + e.what());
    }
    if (!doc.is_array()) throw ParseError(file.string() + ": expected a JSON array of regions");
    return doc;
}

void store_file(const std::filesystem::path& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot open " + file.string() + " for writing");
    out << content;
    if (!out.good()) throw Error("failed writing " + file.string());
}

/// Runs `parse` over every non-blank line, rethrowing with file:line context.
template <typename Parse>
void for_each_line(const std::filesystem::path& file, Parse&& parse) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open " + file.string());
    std::string line;
    long long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = line;
        if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
        if (lineno == 1 && sv.substr(0, kBom.size()) == kBom) sv.remove_prefix(kBom.size());
        if (sv.empty()) continue;
        try {
            parse(sv);
        } catch (const Error& e) {
            throw ParseError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

}  // namespace

AnnotationRecord parse_icdar15(const std::string& line) {
    const std::string_view sv = strip_icdar_line(line);
    const auto fields = detail::split(sv, ',');
    if (fields.size() < 9) throw ParseError("icdar15 line needs 8 coordinates and a transcription");
    AnnotationRecord rec;
    rec.polygon = icdar_vertices(fields);
    // The transcription is everything after the 8th comma; it may contain commas.
    std::string transcription(fields[8]);
    for (std::size_t i = 9; i < fields.size(); ++i) {
        transcription += ',';
        transcription += fields[i];
    }
    rec.transcription = std::move(transcription);
    rec.dont_care = rec.transcription == "###";
    return rec;
}

AnnotationRecord parse_ctw1500(const std::string& line) {
    std::string_view sv = line;
    if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
    const auto fields = detail::split(sv, ',');
    if (fields.size() != 32) throw ParseError("ctw1500 line needs exactly 32 integers");
    AnnotationRecord rec;
    rec.polygon = ctw_vertices(fields);
    return rec;
}

std::string write_icdar15(const AnnotationRecord& r) {
    if (r.polygon.size() != 4) throw FormatError("icdar15 records need exactly 4 vertices");
    return icdar_coords(r.polygon) + ',' + (r.dont_care ? "###" : r.transcription);
}

std::string write_ctw1500(const AnnotationRecord& r) {
    if (r.polygon.size() != 14) throw FormatError("ctw1500 records need exactly 14 vertices");
    return ctw_coords(r.polygon);
}

std::string write_detection_line(const Detectiond& det, AnnoFormat fmt) {
    switch (fmt) {
        case AnnoFormat::kIcdar15:
            if (det.polygon.size() != 4) throw FormatError("icdar15 detections need exactly 4 vertices");
            return icdar_coords(det.polygon) + ',' + detail::format_double(det.score);
        case AnnoFormat::kCtw1500:
            return ctw_coords(to_fourteen_vertices(det.polygon)) + ',' + detail::format_double(det.score);
        case AnnoFormat::kPolygonJson:
            break;
    }
    throw FormatError("polygon_json has no single-line form");
}

Detectiond parse_detection_line(const std::string& line, AnnoFormat fmt, std::int64_t fallback_id) {
    Detectiond det;
    det.id = fallback_id;
    if (fmt == AnnoFormat::kIcdar15) {
        const std::string_view sv = strip_icdar_line(line);
        const auto fields = detail::split(sv, ',');
        if (fields.size() != 9) throw ParseError("icdar15 detection line needs 8 coordinates and a score");
        det.polygon = icdar_vertices(fields);
        det.score = parse_score(fields[8]);
    } else if (fmt == AnnoFormat::kCtw1500) {
        std::string_view sv = line;
        if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
        const auto fields = detail::split(sv, ',');
        if (fields.size() != 33) throw ParseError("ctw1500 detection line needs 32 integers and a score");
        det.polygon = ctw_vertices({fields.begin(), fields.begin() + 32});
        det.score = parse_score(fields[32]);
    } else {
        throw FormatError("polygon_json has no single-line form");
    }
    det.rect = polygon_bbox(det.polygon);
    return det;
}

std::vector<AnnotationRecord> read_annotation_file(const std::filesystem::path& file, AnnoFormat fmt) {
    std::vector<AnnotationRecord> recs;
    if (fmt == AnnoFormat::kPolygonJson) {
        const json doc = load_json_array(file);
        try {
            for (const auto& obj : doc) {
                AnnotationRecord rec;
                if (!obj.contains("polygon")) throw ParseError("region object lacks 'polygon'");
                rec.polygon = polygon_from_json(obj.at("polygon"));
                rec.dont_care = obj.value("dont_care", false);
                rec.transcription = obj.value("transcription", std::string{});
                recs.push_back(std::move(rec));
            }
        } catch (const json::exception& e) {
            throw ParseError(file.string() + ": " + e.what());
        } catch (const Error& e) {
            throw ParseError(file.string() + ": " + e.what());
        }
        return recs;
    }
    for_each_line(file, [&](std::string_view sv) {
        recs.push_back(fmt == AnnoFormat::kIcdar15 ? parse_icdar15(std::string(sv)) : parse_ctw1500(std::string(sv)));
    });
    return recs;
}

void write_annotation_file(const std::filesystem::path& file, const std::vector<AnnotationRecord>& recs,
                           AnnoFormat fmt) {
    if (fmt == AnnoFormat::kPolygonJson) {
        json doc = json::array();
        for (const auto& rec : recs) {
            json obj;
            obj["polygon"] = polygon_to_json(rec.polygon);
            obj["dont_care"] = rec.dont_care;
            if (!rec.transcription.empty()) obj["transcription"] = rec.transcription;
            doc.push_back(std::move(obj));
        }
        store_file(file, doc.dump(2) + "\n");
        return;
    }
    std::string out;
    for (const auto& rec : recs) {
        out += fmt == AnnoFormat::kIcdar15 ? write_icdar15(rec) : write_ctw1500(rec);
        out += '\n';
    }
    store_file(file, out);
}

std::vector<Detectiond> read_detection_file(const std::filesystem::path& file, AnnoFormat fmt) {
    std::vector<Detectiond> dets;
    if (fmt == AnnoFormat::kPolygonJson) {
        const json doc = load_json_array(file);
        try {
            for (const auto& obj : doc) {
                Detectiond det;
                if (!obj.contains("polygon")) throw ParseError("region object lacks 'polygon'");
                det.polygon = polygon_from_json(obj.at("polygon"));
                det.score = obj.value("score", 1.0);
                if (!(det.score >= 0.0 && det.score <= 1.0)) throw ParseError("score must be in [0, 1]");
                det.id = obj.value("id", static_cast<std::int64_t>(dets.size()));
                det.rect = polygon_bbox(det.polygon);
                dets.push_back(std::move(det));
            }
        } catch (const json::exception& e) {
            throw ParseError(file.string() + ": " + e.what());
        } catch (const Error& e) {
            throw ParseError(file.string() + ": " + e.what());
        }
        return dets;
    }
    for_each_line(file, [&](std::string_view sv) {
        dets.push_back(parse_detection_line(std::string(sv), fmt, static_cast<std::int64_t>(dets.size())));
    });
    return dets;
}

void write_detection_file(const std::filesystem::path& file, const std::vector<Detectiond>& dets, AnnoFormat fmt) {
    if (fmt == AnnoFormat::kPolygonJson) {
        json doc = json::array();
        for (const auto& det : dets) {
            json obj;
            obj["polygon"] = polygon_to_json(det.polygon);
            obj["score"] = det.score;
            obj["dont_care"] = false;
            obj["id"] = det.id;
            doc.push_back(std::move(obj));
        }
        store_file(file, doc.dump(2) + "\n");
        return;
    }
    std::string out;
    for (const auto& det : dets) {
        out += write_detection_line(det, fmt);
        out += '\n';
    }
    store_file(file, out);
}

std::vector<SlprTargetd> read_target_file(const std::filesystem::path& file) {
    std::vector<SlprTargetd> targets;
    for_each_line(file, [&](std::string_view sv) {
        if (sv.front() == '#') return;
        const auto toks = detail::split_ws(sv);
        std::vector<double> params;
        params.reserve(toks.size());
        for (const auto tok : toks) params.push_back(parse_coord(tok, "target value"));
        targets.push_back(from_params<double>(params));
    });
    return targets;
}

void write_target_file(const std::filesystem::path& file, const std::vector<SlprTargetd>& targets) {
    std::string out;
    for (const auto& t : targets) {
        const auto params = to_params(t);
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (i) out += ' ';
            out += detail::format_double(params[i]);
        }
        out += '\n';
    }
    store_file(file, out);
}

std::string image_id(const std::filesystem::path& file) {
    std::string stem = file.stem().string();
    for (const std::string_view prefix : {"gt_", "res_", "t_"}) {
        if (stem.size() > prefix.size() && std::string_view(stem).substr(0, prefix.size()) == prefix) {
            return stem.substr(prefix.size());
        }
    }
    return stem;
}

std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir, const std::string& extension) {
    if (!std::filesystem::is_directory(dir)) throw Error("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == extension) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

Polygond to_fourteen_vertices(const Polygond& polygon) {
    if (polygon.size() == 14) return polygon;
    if (polygon.size() < 4 || polygon.size() % 2 != 0) {
        throw FormatError("cannot resample a polygon with " + std::to_string(polygon.size()) +
                          " vertices to 14 (need an even count >= 4)");
    }
    const std::size_t half = polygon.size() / 2;
    const std::vector<Pointd> side_a(polygon.begin(), polygon.begin() + static_cast<std::ptrdiff_t>(half));
    const std::vector<Pointd> side_b(polygon.begin() + static_cast<std::ptrdiff_t>(half), polygon.end());
    Polygond out = resample_polyline(side_a, 7);
    const Polygond rb = resample_polyline(side_b, 7);
    out.insert(out.end(), rb.begin(), rb.end());
    return out;
}

}  // namespace slpr
