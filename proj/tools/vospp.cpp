// vospp: object selection and temporal-consistency repair for video object
// segmentation masks stored in a DAVIS-style directory tree.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vospp/image_codec.hpp"
#include "vospp/metrics.hpp"
#include "vospp/object_selection.hpp"
#include "vospp/parallel.hpp"
#include "vospp/sequence_io.hpp"
#include "vospp/synthetic.hpp"
#include "vospp/temporal_consistency.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vospp;

namespace {

struct RunConfig {
    DatasetLayout layout = DatasetLayout::from_environment();
    std::string root_flag;
    std::string frames_flag, raw_flag, gt_flag, output_flag;
    std::vector<std::string> sequences;
    unsigned jobs = 1;
    bool verbose = false;
    std::string json_path;

    SelectionConfig selection;
    TcConfig tc;
    bool no_refining = false;
    bool not_use_all_objects = false;

    // evaluate
    std::string matching = "identity";
    int boundary_tol = -1;
    std::string pred_subdir;

    // diagnose
    std::string masks_subdir;
    std::string overlay_dir;

    // synth
    std::string script;
    std::string synth_name = "synthetic";

    void finalize() {
        if (!root_flag.empty()) layout.root = root_flag;
        if (!frames_flag.empty()) layout.frames_subdir = frames_flag;
        if (!raw_flag.empty()) layout.raw_masks_subdir = raw_flag;
        if (!gt_flag.empty()) layout.gt_subdir = gt_flag;
        if (!output_flag.empty()) layout.output_subdir = output_flag;
        tc.refine = !no_refining;
        tc.use_all_objects = !not_use_all_objects;
        selection.validate();
        tc.validate();
    }
};

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Output of one sequence, produced on a worker and printed in name order.
struct SequenceOutcome {
    std::string name;
    std::size_t frames = 0;
    double ms = 0.0;
    std::string text;
    json report;
    std::string error;
};

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * v);
    return buf;
}

std::string fixed(double v, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

json scores_json(const std::vector<ObjectScore>& scores, int top_k) {
    json out = json::array();
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const auto& s = scores[i];
        out.push_back({{"rank", i + 1},
                       {"id", s.id},
                       {"appearance_count", s.appearance_count},
                       {"relative_size", s.relative_size},
                       {"score", s.combined},
                       {"kept", static_cast<int>(i) < top_k}});
    }
    return out;
}

std::string scores_table(const std::vector<ObjectScore>& scores, int top_k) {
    std::ostringstream os;
    os << "  rank  id     N      S          score      kept\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const auto& s = scores[i];
        char line[128];
        std::snprintf(line, sizeof(line), "  %-5zu %-6u %-6d %-10.4f %-10.4f %s\n", i + 1, static_cast<unsigned>(s.id),
                      s.appearance_count, s.relative_size, s.combined, static_cast<int>(i) < top_k ? "yes" : "no");
        os << line;
    }
    return os.str();
}

json report_json(const InconsistencyReport& report) {
    json entries = json::array();
    for (const auto& e : report.entries) {
        entries.push_back({{"id", e.id},
                           {"frame", e.frame},
                           {"pass", e.pass},
                           {"status", std::string(to_string(e.status))},
                           {"details", e.details}});
    }
    json counts = json::object();
    for (TcStatus s : {TcStatus::detected, TcStatus::refined_away_zoom, TcStatus::refined_away_occlusion,
                       TcStatus::uncorrectable, TcStatus::corrected}) {
        counts[std::string(to_string(s))] = report.count(s);
    }
    return {{"passes_run", report.passes_run},
            {"passes_with_changes", report.passes_with_changes},
            {"counts", counts},
            {"entries", entries}};
}

std::string report_text(const InconsistencyReport& report, bool verbose) {
    std::ostringstream os;
    os << "  passes " << report.passes_run << " (" << report.passes_with_changes << " with changes)";
    for (TcStatus s : {TcStatus::corrected, TcStatus::uncorrectable, TcStatus::refined_away_occlusion,
                       TcStatus::refined_away_zoom, TcStatus::detected}) {
        os << "  " << to_string(s) << "=" << report.count(s);
    }
    os << "\n";
    if (verbose) {
        for (const auto& e : report.entries) {
            os << "    id " << e.id << " frame " << frame_stem(static_cast<std::size_t>(e.frame)) << " pass " << e.pass << " "
               << to_string(e.status);
            if (!e.details.empty()) os << " (" << e.details << ")";
            os << "\n";
        }
    }
    return os.str();
}

std::vector<std::string> resolve_sequences(const RunConfig& cfg, const fs::path& listing_dir) {
    if (!cfg.sequences.empty()) return cfg.sequences;
    if (!fs::is_directory(listing_dir)) throw IoError(IoErrorKind::missing_file, "missing directory " + listing_dir.string());
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(listing_dir)) {
        if (entry.is_directory()) names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    if (names.empty()) throw IoError(IoErrorKind::layout, "no sequences under " + listing_dir.string());
    return names;
}

// Runs `work` for each sequence on up to cfg.jobs threads, then prints the
// outcomes in name order and writes the JSON report. Returns the exit code.
template <typename Work>
int run_batch(const RunConfig& cfg, const std::vector<std::string>& names, const char* command, Work&& work,
              const std::function<void(const std::vector<SequenceOutcome>&, json&)>& summarize = {}) {
    std::vector<SequenceOutcome> outcomes(names.size());
    parallel_for(names.size(), cfg.jobs, [&](std::size_t i) {
        SequenceOutcome& out = outcomes[i];
        out.name = names[i];
        const auto start = Clock::now();
        try {
            work(names[i], out);
        } catch (const std::exception& e) {
            out.error = e.what();
        }
        out.ms = elapsed_ms(start);
    });

    int status = 0;
    double total_ms = 0.0;
    std::size_t total_frames = 0;
    json doc = {{"command", command}, {"sequences", json::array()}};
    for (const auto& out : outcomes) {
        if (!out.error.empty()) {
            std::cerr << "error: sequence '" << out.name << "': " << out.error << "\n";
            doc["sequences"].push_back({{"name", out.name}, {"error", out.error}});
            status = 1;
            continue;
        }
        std::cout << out.text;
        const double per_frame = out.frames ? out.ms / static_cast<double>(out.frames) : 0.0;
        std::cout << "  time " << fixed(out.ms, 1) << " ms (" << fixed(per_frame, 2) << " ms/frame, " << out.frames
                  << " frames)\n";
        total_ms += out.ms;
        total_frames += out.frames;
        json entry = out.report;
        entry["name"] = out.name;
        entry["frames"] = out.frames;
        doc["sequences"].push_back(entry);
    }
    if (summarize) summarize(outcomes, doc);
    if (total_frames > 0) {
        std::cout << "total time " << fixed(total_ms, 1) << " ms over " << total_frames << " frames\n";
    }
    if (!cfg.json_path.empty()) {
        if (cfg.json_path == "-") {
            std::cout << doc.dump(2) << "\n";
        } else {
            std::ofstream f(cfg.json_path);
            if (!f) {
                std::cerr << "error: cannot write report " << cfg.json_path << "\n";
                return 1;
            }
            f << doc.dump(2) << "\n";
        }
    }
    return status;
}

int cmd_select(const RunConfig& cfg) {
    const auto names = resolve_sequences(cfg, cfg.layout.frames_dir(""));
    return run_batch(cfg, names, "select", [&](const std::string& name, SequenceOutcome& out) {
        const SequenceBundle raw = load_sequence(cfg.layout, name);
        const auto scores = score_objects(raw, cfg.selection);
        const SequenceBundle os = select_top(raw, cfg.selection);
        save_masks(os, cfg.layout, name);
        out.frames = raw.size();
        out.text = "sequence " + name + ": " + std::to_string(raw.object_ids.size()) + " proposals, kept " +
                   std::to_string(os.object_ids.size()) + "\n" + scores_table(scores, cfg.selection.top_k);
        out.report = {{"selection", scores_json(scores, cfg.selection.top_k)}};
    });
}

int cmd_refine(const RunConfig& cfg) {
    const auto names = resolve_sequences(cfg, cfg.layout.frames_dir(""));
    return run_batch(cfg, names, "refine", [&](const std::string& name, SequenceOutcome& out) {
        const SequenceBundle raw = load_sequence(cfg.layout, name);
        const auto scores = score_objects(raw, cfg.selection);
        const SequenceBundle os = select_top(raw, cfg.selection);
        const TcResult tc = run_tc(os, raw, cfg.tc);
        save_masks(tc.bundle, cfg.layout, name);
        out.frames = raw.size();
        out.text = "sequence " + name + ": kept " + std::to_string(os.object_ids.size()) + " of " +
                   std::to_string(raw.object_ids.size()) + " proposals\n" + report_text(tc.report, cfg.verbose);
        if (cfg.verbose) out.text += scores_table(scores, cfg.selection.top_k);
        out.report = {{"selection", scores_json(scores, cfg.selection.top_k)}, {"tc", report_json(tc.report)}};
    });
}

Rgb status_color(TcStatus s) {
    switch (s) {
        case TcStatus::corrected: return {40, 220, 40};
        case TcStatus::uncorrectable: return {230, 40, 40};
        case TcStatus::refined_away_occlusion: return {40, 120, 240};
        case TcStatus::refined_away_zoom: return {240, 200, 40};
        case TcStatus::detected: return {240, 40, 200};
    }
    return {255, 255, 255};
}

void write_overlays(const SequenceBundle& bundle, const InconsistencyReport& report, const fs::path& dir) {
    // one image per flagged frame; each flagged object tinted by its status
    std::map<int, std::vector<const ReportEntry*>> by_frame;
    for (const auto& e : report.entries) by_frame[e.frame].push_back(&e);
    fs::create_directories(dir);
    for (const auto& [frame, entries] : by_frame) {
        RgbFrame img = bundle.frames[static_cast<std::size_t>(frame)];
        for (const ReportEntry* e : entries) {
            const BinaryMask m = extract_object(bundle.masks[static_cast<std::size_t>(frame)], e->id);
            const Rgb tint = status_color(e->status);
            for (int r = 0; r < img.height(); ++r) {
                for (int c = 0; c < img.width(); ++c) {
                    if (!m.get(r, c)) continue;
                    std::uint8_t* px = img.at(r, c);
                    for (int ch = 0; ch < 3; ++ch) px[ch] = static_cast<std::uint8_t>((px[ch] + tint[ch]) / 2);
                }
            }
        }
        write_rgb_png(dir / (frame_stem(static_cast<std::size_t>(frame)) + ".png"), img);
    }
}

int cmd_diagnose(const RunConfig& cfg) {
    const auto names = resolve_sequences(cfg, cfg.layout.frames_dir(""));
    return run_batch(cfg, names, "diagnose", [&](const std::string& name, SequenceOutcome& out) {
        DatasetLayout layout = cfg.layout;
        if (!cfg.masks_subdir.empty()) layout.raw_masks_subdir = cfg.masks_subdir;
        const SequenceBundle os = load_sequence(layout, name);
        const InconsistencyReport report = diagnose(os, cfg.tc);
        if (!cfg.overlay_dir.empty()) write_overlays(os, report, fs::path(cfg.overlay_dir) / name);
        out.frames = os.size();
        out.text = "sequence " + name + ": " + std::to_string(report.entries.size()) + " flagged object-frames\n" +
                   report_text(report, true);
        out.report = {{"tc", report_json(report)}};
    });
}

int cmd_evaluate(const RunConfig& cfg) {
    EvaluationOptions options;
    options.boundary_tol = cfg.boundary_tol;
    if (cfg.matching == "identity") {
        options.matching = Matching::identity;
    } else if (cfg.matching == "hungarian") {
        options.matching = Matching::hungarian;
    } else {
        std::cerr << "error: --matching must be identity or hungarian\n";
        return 2;
    }
    DatasetLayout layout = cfg.layout;
    if (!cfg.pred_subdir.empty()) layout.output_subdir = cfg.pred_subdir;
    const auto names = resolve_sequences(cfg, layout.gt_dir(""));
    std::vector<SequenceMetrics> metrics(names.size());
    std::vector<bool> ok(names.size(), false);
    std::mutex slot_mutex;
    std::cout << "sequence                 object matched  J       F       J&F\n";
    return run_batch(
        cfg, names, "evaluate",
        [&](const std::string& name, SequenceOutcome& out) {
            const SequenceBundle gt = load_mask_bundle(layout.gt_dir(name), name);
            const SequenceBundle pred = load_mask_bundle(layout.output_dir(name), name);
            const SequenceMetrics m = evaluate_sequence(pred, gt, options);
            out.frames = gt.masks.size();
            std::ostringstream text;
            json objects = json::array();
            for (const auto& o : m.objects) {
                char line[160];
                std::snprintf(line, sizeof(line), "%-24s %-6u %-8u %-7s %-7s %s\n", name.c_str(), static_cast<unsigned>(o.id),
                              static_cast<unsigned>(o.matched), percent(o.j_mean).c_str(), percent(o.f_mean).c_str(),
                              percent(o.jf).c_str());
                text << line;
                objects.push_back({{"id", o.id}, {"matched", o.matched}, {"J", o.j_mean}, {"F", o.f_mean}, {"JF", o.jf}});
            }
            out.text = text.str();
            out.report = {{"objects", objects}, {"J", m.j_mean}, {"F", m.f_mean}, {"JF", m.jf}};
            const auto idx = static_cast<std::size_t>(std::find(names.begin(), names.end(), name) - names.begin());
            std::lock_guard<std::mutex> lock(slot_mutex);
            metrics[idx] = m;
            ok[idx] = true;
        },
        [&](const std::vector<SequenceOutcome>&, json& doc) {
            std::vector<SequenceMetrics> scored;
            for (std::size_t i = 0; i < names.size(); ++i) {
                if (ok[i]) scored.push_back(metrics[i]);
            }
            const SequenceMetrics global = aggregate(scored);
            std::cout << "Global  J&F " << percent(global.jf) << "  J " << percent(global.j_mean) << "  F "
                      << percent(global.f_mean) << "\n";
            doc["global"] = {{"J", global.j_mean}, {"F", global.f_mean}, {"JF", global.jf}};
        });
}

int cmd_synth(const RunConfig& cfg) {
    const SceneDocument doc = load_scene(cfg.script);
    const auto start = Clock::now();
    const RenderedScene scene = render(doc.scene, cfg.synth_name);
    const InjectionResult injected = inject_defects(scene.clean, doc.defects, doc.scene.seed);
    save_frames(injected.bundle.frames, cfg.layout.frames_dir(cfg.synth_name));
    save_label_maps(injected.bundle.masks, cfg.layout.raw_masks_dir(cfg.synth_name));
    save_label_maps(scene.ground_truth.masks, cfg.layout.gt_dir(cfg.synth_name));
    std::cout << "sequence " << cfg.synth_name << ": " << scene.clean.size() << " frames, "
              << scene.clean.object_ids.size() << " objects, " << doc.defects.size() << " defects\n";
    for (const auto& region : injected.regions) {
        std::cout << "  defect on id " << region.id << " frame " << frame_stem(region.frame) << ": " << area(region.mask)
                  << " pixels\n";
    }
    std::cout << "  time " << fixed(elapsed_ms(start), 1) << " ms\n";
    return 0;
}

void add_layout_options(CLI::App* app, RunConfig& cfg) {
    app->add_option("--root", cfg.root_flag, "Dataset root (env VOSPP_ROOT)");
    app->add_option("--frames-dir", cfg.frames_flag, "Frame subdirectory (env VOSPP_FRAMES_DIR)");
    app->add_option("--raw-dir", cfg.raw_flag, "Raw proposal mask subdirectory (env VOSPP_RAW_DIR)");
    app->add_option("--gt-dir", cfg.gt_flag, "Ground-truth subdirectory (env VOSPP_GT_DIR)");
    app->add_option("--output-dir", cfg.output_flag, "Output subdirectory (env VOSPP_OUTPUT_DIR)");
}

void add_batch_options(CLI::App* app, RunConfig& cfg) {
    add_layout_options(app, cfg);
    app->add_option("--seq", cfg.sequences, "Sequence names (default: all)");
    app->add_option("-j,--jobs", cfg.jobs, "Sequences processed in parallel (0 = hardware threads)");
    app->add_option("--json", cfg.json_path, "Write the JSON report to this file ('-' for stdout)");
    app->add_flag("-v,--verbose", cfg.verbose, "Print every report entry");
}

void add_selection_options(CLI::App* app, RunConfig& cfg) {
    app->add_option("--alpha", cfg.selection.alpha, "Weight of the relative-size term")->capture_default_str();
    app->add_option("--top-k", cfg.selection.top_k, "Objects kept per sequence")->capture_default_str();
}

void add_tc_options(CLI::App* app, RunConfig& cfg) {
    TcConfig& tc = cfg.tc;
    app->add_option("--window", tc.window, "Detection window length")->capture_default_str();
    app->add_option("--tau-min", tc.occlusion_tau_min, "Occlusion threshold for large objects")->capture_default_str();
    app->add_option("--tau-max", tc.occlusion_tau_max, "Occlusion threshold for tiny objects")->capture_default_str();
    app->add_option("--size-ref", tc.size_ref, "Object/frame area ratio where tau reaches tau-min")->capture_default_str();
    app->add_option("--zoom-tol", tc.zoom_centroid_tol, "Centroid drift tolerance for zoom, x sqrt(area)")
        ->capture_default_str();
    app->add_option("--min-component-frac", tc.min_component_frac, "Smallest kept component, fraction of frame")
        ->capture_default_str();
    app->add_option("--minor-add-frac", tc.minor_add_frac, "Skip added parts below this fraction of the object")
        ->capture_default_str();
    app->add_option("--overseg-cover-frac", tc.overseg_cover_frac, "Coverage needed to merge a whole proposal")
        ->capture_default_str();
    app->add_option("--erosion-radius", tc.erosion_radius, "Erosion radius of the reliability filter")
        ->capture_default_str();
    app->add_option("--max-passes", tc.max_passes, "Propagation passes (0 = number of frames)")->capture_default_str();
    app->add_option("--hist-bins", tc.histogram_bins, "Histogram bins per channel")->capture_default_str();
    app->add_flag("--no-refining", cfg.no_refining, "Skip the occlusion filter");
    app->add_flag("--not-use-all-objects", cfg.not_use_all_objects, "Do not merge whole raw proposals");
    app->add_option("--flow-window", tc.flow.window_size, "Lucas-Kanade window")->capture_default_str();
    app->add_option("--flow-levels", tc.flow.pyramid_levels, "Pyramid levels")->capture_default_str();
    app->add_option("--flow-iterations", tc.flow.iterations_per_level, "Iterations per level")->capture_default_str();
    app->add_option("--eigen-floor", tc.flow.eigen_floor, "Minimum structure-tensor eigenvalue")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Object selection and temporal-consistency repair for video object segmentation masks"};
    app.require_subcommand(1);
    RunConfig cfg;

    CLI::App* select = app.add_subcommand("select", "Keep the top-k raw proposals per sequence");
    add_batch_options(select, cfg);
    add_selection_options(select, cfg);

    CLI::App* refine = app.add_subcommand("refine", "Object selection followed by temporal-consistency repair");
    add_batch_options(refine, cfg);
    add_selection_options(refine, cfg);
    add_tc_options(refine, cfg);

    CLI::App* evaluate = app.add_subcommand("evaluate", "Score predictions against ground truth (J, F, J&F)");
    add_batch_options(evaluate, cfg);
    evaluate->add_option("--pred-dir", cfg.pred_subdir, "Prediction subdirectory (default: output dir)");
    evaluate->add_option("--matching", cfg.matching, "identity or hungarian")->capture_default_str();
    evaluate->add_option("--boundary-tol", cfg.boundary_tol, "Contour tolerance in pixels (-1 = diagonal rule)")
        ->capture_default_str();

    CLI::App* diag = app.add_subcommand("diagnose", "Report inconsistent frames without modifying masks");
    add_batch_options(diag, cfg);
    add_tc_options(diag, cfg);
    diag->add_option("--masks-dir", cfg.masks_subdir, "Mask subdirectory to inspect (default: raw dir)");
    diag->add_option("--overlay-dir", cfg.overlay_dir, "Write status overlays for flagged frames here");

    CLI::App* synth = app.add_subcommand("synth", "Render a scripted synthetic sequence into the layout");
    add_layout_options(synth, cfg);
    synth->add_option("--script", cfg.script, "Scene script (JSON)")->required();
    synth->add_option("--name", cfg.synth_name, "Sequence name")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.finalize();
        if (*select) return cmd_select(cfg);
        if (*refine) return cmd_refine(cfg);
        if (*evaluate) return cmd_evaluate(cfg);
        if (*diag) return cmd_diagnose(cfg);
        if (*synth) return cmd_synth(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
