// Command-line frontend: file-in/file-out pipelines over the sliding-line
// library. Exit codes: 0 success, 1 data/processing error, 2 usage error.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "slpr/codec.hpp"
#include "slpr/dataio.hpp"
#include "slpr/errors.hpp"
#include "slpr/eval.hpp"
#include "slpr/loss.hpp"
#include "slpr/restore.hpp"
#include "slpr/suppress.hpp"
#include "slpr/synth.hpp"

namespace fs = std::filesystem;

namespace {

int thread_budget() {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("SLPR_THREADS");
    if (env == nullptr || *env == '\0') return static_cast<int>(hw);
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0) {
        throw slpr::Error(std::string("SLPR_THREADS must be a non-negative integer, got '") + env + "'");
    }
    if (v == 0) return static_cast<int>(hw);
    return static_cast<int>(std::min(v, 64L));
}

/// Runs fn(0..count-1) on up to SLPR_THREADS workers. Each index must touch
/// independent state; the first exception wins and is rethrown on the caller.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(thread_budget()), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                fn(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

slpr::AnnoFormat parse_format(const std::string& name) {
    if (name == "icdar15") return slpr::AnnoFormat::kIcdar15;
    if (name == "ctw1500") return slpr::AnnoFormat::kCtw1500;
    return slpr::AnnoFormat::kPolygonJson;
}

std::string format_extension(slpr::AnnoFormat fmt) {
    return fmt == slpr::AnnoFormat::kPolygonJson ? ".json" : ".txt";
}

void dump_svg(const fs::path& path, const std::vector<slpr::Polygond>& polys) {
    if (polys.empty()) return;
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (const auto& p : polys) {
        for (const auto& v : p) {
            x0 = std::min(x0, v.x());
            y0 = std::min(y0, v.y());
            x1 = std::max(x1, v.x());
            y1 = std::max(y1, v.y());
        }
    }
    const double pad = 0.05 * std::max(x1 - x0, y1 - y0) + 1.0;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << x0 - pad << ' ' << y0 - pad << ' '
        << (x1 - x0) + 2 * pad << ' ' << (y1 - y0) + 2 * pad << "\">\n";
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    for (std::size_t i = 0; i < polys.size(); ++i) {
        svg << "  <path fill=\"none\" stroke=\"" << colors[i % 5] << "\" stroke-width=\"" << pad * 0.05
            << "\" d=\"";
        for (std::size_t k = 0; k < polys[i].size(); ++k) {
            svg << (k == 0 ? 'M' : 'L') << polys[i][k].x() << ' ' << polys[i][k].y() << ' ';
        }
        svg << "Z\"/>\n";
    }
    svg << "</svg>\n";
    std::ofstream out(path);
    if (!out) throw slpr::Error("cannot write " + path.string());
    out << svg.str();
}

// ---- subcommands ---------------------------------------------------------

int run_encode(const std::string& fmt_name, const fs::path& in_dir, const fs::path& out_dir, int n) {
    const slpr::AnnoFormat fmt = parse_format(fmt_name);
    const auto files = slpr::list_files(in_dir, format_extension(fmt));
    fs::create_directories(out_dir);
    std::atomic<long long> regions{0};
    parallel_for(files.size(), [&](std::size_t i) {
        const auto recs = slpr::read_annotation_file(files[i], fmt);
        std::vector<slpr::SlprTargetd> targets;
        for (const auto& rec : recs) {
            if (rec.dont_care) continue;  // don't-care regions carry no regression target
            targets.push_back(slpr::encode_polygon(rec.polygon, n));
        }
        regions += static_cast<long long>(targets.size());
        slpr::write_target_file(out_dir / ("t_" + slpr::image_id(files[i]) + ".txt"), targets);
    });
    std::cout << "encoded " << regions.load() << " regions from " << files.size() << " files\n";
    return 0;
}

int run_decode(const fs::path& in_dir, const fs::path& out_dir) {
    const auto files = slpr::list_files(in_dir, ".txt");
    fs::create_directories(out_dir);
    std::atomic<long long> regions{0};
    parallel_for(files.size(), [&](std::size_t i) {
        // read_target_file sanitizes: out-of-rect values clamped, pairs sorted
        const auto targets = slpr::read_target_file(files[i]);
        regions += static_cast<long long>(targets.size());
        slpr::write_target_file(out_dir / files[i].filename(), targets);
    });
    std::cout << "decoded " << regions.load() << " regions from " << files.size() << " files\n";
    return 0;
}

int run_restore(const std::string& method_name, double k, const fs::path& in_dir, const fs::path& out_dir,
                const std::string& fmt_name, const fs::path& svg_path) {
    slpr::RestoreConfig cfg;
    cfg.method = method_name == "bhvp" ? slpr::RestoreMethod::kBhvp : slpr::RestoreMethod::kPls;
    cfg.aspect_threshold = k;
    const slpr::AnnoFormat fmt = parse_format(fmt_name);
    const auto files = slpr::list_files(in_dir, ".txt");
    fs::create_directories(out_dir);
    std::atomic<long long> kept{0}, dropped{0};
    std::vector<std::vector<slpr::Polygond>> svg_polys(files.size());
    parallel_for(files.size(), [&](std::size_t i) {
        const auto targets = slpr::read_target_file(files[i]);
        std::vector<slpr::Detectiond> dets;
        for (std::size_t r = 0; r < targets.size(); ++r) {
            slpr::Polygond poly;
            try {
                poly = slpr::restore(targets[r], cfg);
            } catch (const slpr::DegenerateRestoration&) {
                ++dropped;  // near-zero-area restoration: drop the region
                continue;
            }
            dets.push_back(slpr::make_detection(std::move(poly), 1.0, static_cast<std::int64_t>(r)));
        }
        kept += static_cast<long long>(dets.size());
        if (!svg_path.empty()) {
            for (const auto& d : dets) svg_polys[i].push_back(d.polygon);
        }
        slpr::write_detection_file(out_dir / ("res_" + slpr::image_id(files[i]) + format_extension(fmt)), dets,
                                   fmt);
    });
    if (!svg_path.empty()) {
        std::vector<slpr::Polygond> all;
        for (auto& v : svg_polys) all.insert(all.end(), v.begin(), v.end());
        dump_svg(svg_path, all);
    }
    std::cout << "restored " << kept.load() << " regions from " << files.size() << " files";
    if (dropped.load() > 0) std::cout << " (dropped " << dropped.load() << " degenerate)";
    std::cout << "\n";
    return 0;
}

int run_nms(const std::string& mode, double threshold, const fs::path& in_dir, const fs::path& out_dir,
            const std::string& fmt_name, const fs::path& svg_path) {
    const slpr::AnnoFormat fmt = parse_format(fmt_name);
    const auto files = slpr::list_files(in_dir, format_extension(fmt));
    fs::create_directories(out_dir);
    std::atomic<long long> in_count{0}, out_count{0};
    std::vector<std::vector<slpr::Polygond>> svg_polys(files.size());
    parallel_for(files.size(), [&](std::size_t i) {
        const auto dets = slpr::read_detection_file(files[i], fmt);
        const auto kept = mode == "pnms" ? slpr::pnms(dets, threshold) : slpr::nms(dets, threshold);
        in_count += static_cast<long long>(dets.size());
        out_count += static_cast<long long>(kept.size());
        if (!svg_path.empty()) {
            for (const auto& d : kept) svg_polys[i].push_back(d.polygon);
        }
        slpr::write_detection_file(out_dir / ("res_" + slpr::image_id(files[i]) + format_extension(fmt)), kept,
                                   fmt);
    });
    if (!svg_path.empty()) {
        std::vector<slpr::Polygond> all;
        for (auto& v : svg_polys) all.insert(all.end(), v.begin(), v.end());
        dump_svg(svg_path, all);
    }
    std::cout << "kept " << out_count.load() << " of " << in_count.load() << " detections\n";
    return 0;
}

int run_eval(const fs::path& gt_dir, const fs::path& det_dir, const std::string& gt_fmt_name,
             const std::string& det_fmt_name, double iou, const fs::path& report_path) {
    const slpr::AnnoFormat gt_fmt = parse_format(gt_fmt_name);
    const slpr::AnnoFormat det_fmt = parse_format(det_fmt_name);
    const auto gt_files = slpr::list_files(gt_dir, format_extension(gt_fmt));
    if (gt_files.empty()) throw slpr::Error("no ground-truth files in " + gt_dir.string());

    std::vector<slpr::MatchStats> stats(gt_files.size());
    std::vector<std::string> ids(gt_files.size());
    parallel_for(gt_files.size(), [&](std::size_t i) {
        ids[i] = slpr::image_id(gt_files[i]);
        std::vector<slpr::GroundTruthd> gts;
        for (const auto& rec : slpr::read_annotation_file(gt_files[i], gt_fmt)) {
            gts.push_back(slpr::to_ground_truth(rec));
        }
        const fs::path det_file = det_dir / ("res_" + ids[i] + format_extension(det_fmt));
        std::vector<slpr::Detectiond> dets;
        if (fs::exists(det_file)) dets = slpr::read_detection_file(det_file, det_fmt);
        stats[i] = slpr::match_image(dets, gts, iou);
    });
    const slpr::EvalReport report = slpr::aggregate(stats);

    std::cout << std::fixed << std::setprecision(3);
    std::cout << "precision " << report.precision << "\n";
    std::cout << "recall " << report.recall << "\n";
    std::cout << "hmean " << report.hmean << "\n";
    std::cout << "matched " << report.matched << "\n";
    std::cout << "counted " << report.counted_dets << "\n";
    std::cout << "valid " << report.valid_gts << "\n";

    if (!report_path.empty()) {
        nlohmann::ordered_json doc;
        doc["precision"] = report.precision;
        doc["recall"] = report.recall;
        doc["hmean"] = report.hmean;
        doc["matched"] = report.matched;
        doc["counted"] = report.counted_dets;
        doc["valid"] = report.valid_gts;
        doc["iou_threshold"] = iou;
        nlohmann::ordered_json images = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < stats.size(); ++i) {
            images.push_back({{"id", ids[i]},
                              {"matched", stats[i].matched},
                              {"counted", stats[i].counted_dets},
                              {"valid", stats[i].valid_gts}});
        }
        doc["images"] = std::move(images);
        std::ofstream out(report_path);
        if (!out) throw slpr::Error("cannot write " + report_path.string());
        out << doc.dump(2) << "\n";
    }
    return 0;
}

int run_synth(const fs::path& spec_path, int count, const fs::path& out_dir, const std::string& fmt_name,
              const fs::path& svg_path) {
    const slpr::AnnoFormat fmt = parse_format(fmt_name);
    std::ifstream in(spec_path);
    if (!in) throw slpr::Error("cannot open " + spec_path.string());
    std::vector<slpr::ShapeSpec> specs;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        specs.push_back(slpr::parse_shape_spec(line));
    }
    if (specs.empty()) throw slpr::Error("no shape specs in " + spec_path.string());
    fs::create_directories(out_dir);

    std::vector<slpr::Polygond> all_polys(static_cast<std::size_t>(count));
    parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
        slpr::ShapeSpec spec = specs[i % specs.size()];
        spec.seed += static_cast<std::uint64_t>(i);  // one deterministic stream per instance
        slpr::Polygond poly = slpr::generate(spec);
        slpr::AnnotationRecord rec;
        rec.transcription = "text";
        rec.polygon = fmt == slpr::AnnoFormat::kCtw1500 ? slpr::to_fourteen_vertices(poly) : poly;
        if (fmt == slpr::AnnoFormat::kIcdar15 && rec.polygon.size() != 4) {
            throw slpr::FormatError("icdar15 output needs 4-vertex shapes; use ctw1500 or json for " +
                                    slpr::format_shape_spec(spec));
        }
        all_polys[i] = rec.polygon;
        slpr::write_annotation_file(out_dir / ("gt_" + std::to_string(i + 1) + format_extension(fmt)), {rec}, fmt);
    });
    if (!svg_path.empty()) dump_svg(svg_path, all_polys);
    std::cout << "generated " << count << " shapes\n";
    return 0;
}

int run_loss_check(std::uint64_t seed, int probes) {
    // Fixed-point values of the kernel.
    const double cases[][2] = {{0.0, 0.0}, {0.5, 0.125}, {1.0, 0.5}, {2.0, 1.5}};
    for (const auto& c : cases) {
        const double got = slpr::smooth_l1(c[0], 0.0);
        if (std::abs(got - c[1]) > 1e-15) {
            std::cerr << "loss-check: smooth_l1(" << c[0] << ") = " << got << ", want " << c[1] << "\n";
            return 1;
        }
    }

    // Gradient of the scalar kernel against central differences, away from
    // the |d| = 1 kinks where the quadratic and linear branches meet.
    slpr::SplitMix64 rng(seed);
    const double h = 1e-6;
    for (int i = 0; i < probes; ++i) {
        const double z = rng.uniform(-3.0, 3.0);
        const double z_star = rng.uniform(-3.0, 3.0);
        if (std::abs(std::abs(z - z_star) - 1.0) < 1e-4) continue;
        const double fd = (slpr::smooth_l1(z + h, z_star) - slpr::smooth_l1(z - h, z_star)) / (2 * h);
        const double an = slpr::smooth_l1_grad(z, z_star);
        if (std::abs(fd - an) > 1e-5) {
            std::cerr << "loss-check: grad mismatch at d=" << z - z_star << ": analytic " << an << " vs fd " << fd
                      << "\n";
            return 1;
        }
    }

    // Vector loss: analytic per-coordinate gradient vs central differences.
    const slpr::LossConfig cfg;
    std::vector<double> gx(14), gy(14), px(14), py(14);
    for (auto* v : {&gx, &gy, &px, &py}) {
        for (auto& x : *v) x = rng.uniform(-3.0, 3.0);
    }
    const auto grad = slpr::slpr_loss_grad(px, py, gx, gy, cfg);
    for (std::size_t j = 0; j < px.size(); ++j) {
        if (std::abs(std::abs(px[j] - gx[j]) - 1.0) < 1e-4) continue;
        auto hi = px, lo = px;
        hi[j] += h;
        lo[j] -= h;
        const double fd =
            (slpr::slpr_loss(hi, py, gx, gy, cfg) - slpr::slpr_loss(lo, py, gx, gy, cfg)) / (2 * h);
        if (std::abs(fd - grad.d_x[j]) > 1e-5) {
            std::cerr << "loss-check: vector grad mismatch at x[" << j << "]\n";
            return 1;
        }
    }

    // Aspect-gated variant: indicator behavior at h/w in {0.5, 1, 2}.
    const double sx = [&] {
        double s = 0;
        for (std::size_t j = 0; j < px.size(); ++j) s += slpr::smooth_l1(px[j], gx[j]);
        return s;
    }();
    const double sy = [&] {
        double s = 0;
        for (std::size_t j = 0; j < py.size(); ++j) s += slpr::smooth_l1(py[j], gy[j]);
        return s;
    }();
    const double inv = 1.0 / static_cast<double>(px.size() + py.size());
    struct Case {
        double w, h, want;
    };
    const Case ctw_cases[] = {
        {2.0, 1.0, inv * sy},                            // wide: y term only
        {1.0, 1.0, inv * (cfg.lambda_hw * sx + sy)},     // square: both
        {1.0, 2.0, inv * cfg.lambda_hw * sx},            // tall: weighted x term only
    };
    for (const auto& c : ctw_cases) {
        const slpr::AxisRectd rect{0.0, 0.0, c.w, c.h};
        const double got = slpr::slpr_loss_ctw(px, py, gx, gy, rect, cfg);
        if (std::abs(got - c.want) > 1e-12) {
            std::cerr << "loss-check: ctw loss at h/w=" << c.h / c.w << " = " << got << ", want " << c.want
                      << "\n";
            return 1;
        }
    }

    std::cout << "loss-check: ok (" << probes << " gradient probes)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sliding-line scene-text toolkit: encode, restore, suppress, evaluate"};
    app.require_subcommand(1);
    const std::vector<std::string> formats = {"icdar15", "ctw1500", "json"};

    std::string fmt = "icdar15", det_fmt, method = "pls", mode = "nms";
    fs::path in_dir, out_dir, gt_dir, det_dir, spec_path, report_path, svg_path;
    int n = slpr::kDefaultLines;
    double k = 0.8, threshold = 0.3, iou = 0.5;
    int count = 100, probes = 1000;
    std::uint64_t seed = 42;

    auto* enc = app.add_subcommand("encode", "annotations -> sliding-line target files");
    enc->add_option("--format", fmt, "annotation format")->required()->check(CLI::IsMember(formats));
    enc->add_option("--in", in_dir, "annotation directory")->required();
    enc->add_option("--out", out_dir, "target output directory")->required();
    enc->add_option("--n", n, "sliding lines per direction");

    auto* dec = app.add_subcommand("decode", "sanitize target files (clamp to rect, order pairs)");
    dec->add_option("--in", in_dir, "target directory")->required();
    dec->add_option("--out", out_dir, "output directory")->required();

    auto* res = app.add_subcommand("restore", "target files -> detection polygons");
    res->add_option("--method", method, "restoration method")->check(CLI::IsMember({"pls", "bhvp"}));
    res->add_option("--k", k, "aspect threshold");
    res->add_option("--in", in_dir, "target directory")->required();
    res->add_option("--out", out_dir, "detection output directory")->required();
    res->add_option("--format", fmt, "detection output format")->check(CLI::IsMember(formats));
    res->add_option("--dump-svg", svg_path, "write restored polygons as SVG");

    auto* sup = app.add_subcommand("nms", "suppress duplicate detections");
    sup->add_option("--mode", mode, "overlap measure")->check(CLI::IsMember({"nms", "pnms"}));
    sup->add_option("--threshold", threshold, "suppression IoU threshold")->required();
    sup->add_option("--in", in_dir, "detection directory")->required();
    sup->add_option("--out", out_dir, "output directory")->required();
    sup->add_option("--format", fmt, "detection format")->check(CLI::IsMember(formats));
    sup->add_option("--dump-svg", svg_path, "write kept polygons as SVG");

    auto* ev = app.add_subcommand("eval", "score detections against ground truth");
    ev->add_option("--gt", gt_dir, "ground-truth directory")->required();
    ev->add_option("--det", det_dir, "detection directory")->required();
    ev->add_option("--format", fmt, "ground-truth format")->check(CLI::IsMember(formats));
    ev->add_option("--det-format", det_fmt, "detection format (default: same as --format)")
        ->check(CLI::IsMember(formats));
    ev->add_option("--iou", iou, "match IoU threshold");
    ev->add_option("--report", report_path, "write JSON report here");

    auto* syn = app.add_subcommand("synth", "generate seeded ground-truth shapes");
    syn->add_option("--spec", spec_path, "shape spec file (one key=value line per kind)")->required();
    syn->add_option("--count", count, "number of shapes");
    syn->add_option("--out", out_dir, "ground-truth output directory")->required();
    syn->add_option("--format", fmt, "output format")->check(CLI::IsMember(formats));
    syn->add_option("--dump-svg", svg_path, "write generated polygons as SVG");

    auto* losscheck = app.add_subcommand("loss-check", "self-check loss kernels against finite differences");
    losscheck->add_option("--seed", seed, "probe RNG seed");
    losscheck->add_option("--probes", probes, "number of gradient probes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    // Domain checks on flag values are usage errors (exit 2), not data errors.
    auto usage_error = [](const char* msg) {
        std::cerr << "error: " << msg << "\n";
        return 2;
    };
    if (enc->parsed() && n < 1) return usage_error("--n must be at least 1");
    if (res->parsed() && !(k > 0.0 && k <= 1.0)) return usage_error("--k must be in (0, 1]");
    if (sup->parsed() && !(threshold > 0.0 && threshold < 1.0)) {
        return usage_error("--threshold must be in (0, 1)");
    }
    if (ev->parsed() && !(iou > 0.0 && iou < 1.0)) return usage_error("--iou must be in (0, 1)");
    if (syn->parsed() && count < 1) return usage_error("--count must be at least 1");
    if (losscheck->parsed() && probes < 1) return usage_error("--probes must be at least 1");

    try {
        if (enc->parsed()) return run_encode(fmt, in_dir, out_dir, n);
        if (dec->parsed()) return run_decode(in_dir, out_dir);
        if (res->parsed()) return run_restore(method, k, in_dir, out_dir, fmt, svg_path);
        if (sup->parsed()) return run_nms(mode, threshold, in_dir, out_dir, fmt, svg_path);
        if (ev->parsed()) return run_eval(gt_dir, det_dir, fmt, det_fmt.empty() ? fmt : det_fmt, iou, report_path);
        if (syn->parsed()) return run_synth(spec_path, count, out_dir, fmt, svg_path);
        if (losscheck->parsed()) return run_loss_check(seed, probes);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
