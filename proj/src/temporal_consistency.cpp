#include "vospp/temporal_consistency.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace vospp {

void TcConfig::validate() const {
    require(window >= 3 && window % 2 == 1, "tc: window must be odd and >= 3");
    require(occlusion_tau_min >= 0.0 && occlusion_tau_min <= occlusion_tau_max && occlusion_tau_max <= 1.0,
            "tc: require 0 <= tau_min <= tau_max <= 1");
    require(size_ref > 0.0, "tc: size_ref must be positive");
    require(zoom_centroid_tol >= 0.0, "tc: zoom_centroid_tol must be non-negative");
    require(min_component_frac >= 0.0 && min_component_frac < 1.0, "tc: min_component_frac must be in [0,1)");
    require(minor_add_frac >= 0.0, "tc: minor_add_frac must be non-negative");
    require(overseg_cover_frac > 0.0 && overseg_cover_frac <= 1.0, "tc: overseg_cover_frac must be in (0,1]");
    require(erosion_radius >= 0, "tc: erosion_radius must be non-negative");
    require(max_passes >= 0, "tc: max_passes must be >= 1 (or 0 for the frame count)");
    require(histogram_bins >= 1 && histogram_bins <= 256 && 256 % histogram_bins == 0,
            "tc: histogram_bins must divide 256");
    flow.validate();
}

std::string_view to_string(TcStatus status) {
    switch (status) {
        case TcStatus::detected: return "detected";
        case TcStatus::refined_away_zoom: return "refined_away_zoom";
        case TcStatus::refined_away_occlusion: return "refined_away_occlusion";
        case TcStatus::uncorrectable: return "uncorrectable";
        case TcStatus::corrected: return "corrected";
    }
    return "unknown";
}

std::optional<TcStatus> parse_status(std::string_view text) {
    for (TcStatus s : {TcStatus::detected, TcStatus::refined_away_zoom, TcStatus::refined_away_occlusion,
                       TcStatus::uncorrectable, TcStatus::corrected}) {
        if (to_string(s) == text) return s;
    }
    return std::nullopt;
}

std::size_t InconsistencyReport::count(TcStatus status) const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [status](const ReportEntry& e) { return e.status == status; }));
}

std::vector<ReportEntry> InconsistencyReport::find(ObjectId id, int frame) const {
    std::vector<ReportEntry> out;
    for (const auto& e : entries) {
        if (e.id == id && e.frame == frame) out.push_back(e);
    }
    return out;
}

bool InconsistencyReport::has(ObjectId id, int frame, TcStatus status) const {
    return std::any_of(entries.begin(), entries.end(),
                       [&](const ReportEntry& e) { return e.id == id && e.frame == frame && e.status == status; });
}

namespace {

std::vector<BinaryMask> object_track(const SequenceBundle& bundle, ObjectId id) {
    std::vector<BinaryMask> track;
    track.reserve(bundle.masks.size());
    for (const LabelMap& m : bundle.masks) track.push_back(extract_object(m, id));
    return track;
}

// Window length actually used for a sequence of n frames.
int effective_window(int window, int frames) { return std::min(window, frames); }

std::size_t window_union_area(const std::vector<BinaryMask>& track, int t_start, int window) {
    BinaryMask window_union = track[t_start];
    for (int i = t_start + 1; i < t_start + window; ++i) window_union = mask_union(window_union, track[i]);
    return area(window_union);
}

// Non-decreasing or non-increasing, with at least one change. Pixel
// quantisation makes slow zooms repeat areas between frames.
bool monotone(const std::vector<std::size_t>& values) {
    bool increasing = true;
    bool decreasing = true;
    for (std::size_t i = 1; i < values.size(); ++i) {
        increasing = increasing && values[i] >= values[i - 1];
        decreasing = decreasing && values[i] <= values[i - 1];
    }
    return values.size() >= 2 && values.front() != values.back() && (increasing || decreasing);
}

// A zoom changes the mask area steadily while the centre of mass barely moves.
bool looks_like_zoom(const std::vector<BinaryMask>& track, const std::vector<std::size_t>& areas, int t, int window,
                     double centroid_tol) {
    const int n = static_cast<int>(track.size());
    const int t_start = std::clamp(t - window / 2, 0, n - window);
    std::vector<std::size_t> window_areas(areas.begin() + t_start, areas.begin() + t_start + window);
    if (std::any_of(window_areas.begin(), window_areas.end(), [](std::size_t a) { return a == 0; })) return false;
    if (!monotone(window_areas)) return false;
    const double mean_area =
        static_cast<double>(std::accumulate(window_areas.begin(), window_areas.end(), std::size_t{0})) / window;
    const double limit = centroid_tol * std::sqrt(mean_area);
    Centroid prev = center_of_mass(track[t_start]);
    for (int i = t_start + 1; i < t_start + window; ++i) {
        const Centroid cur = center_of_mass(track[i]);
        if (std::hypot(cur.row - prev.row, cur.col - prev.col) >= limit) return false;
        prev = cur;
    }
    return true;
}

}  // namespace

std::optional<double> mou(const SequenceBundle& bundle, ObjectId id, int t, int t_start, int window) {
    const int n = static_cast<int>(bundle.size());
    require(window >= 1 && t_start >= 0 && t_start + window <= n, "mou: window outside the sequence");
    require(t >= t_start && t < t_start + window, "mou: frame outside the window");
    std::vector<BinaryMask> track;
    std::vector<std::size_t> areas(bundle.size(), 0);
    for (int i = 0; i < n; ++i) {
        track.push_back(i >= t_start && i < t_start + window ? extract_object(bundle.masks[i], id)
                                                             : BinaryMask(bundle.extent()));
        areas[i] = area(track.back());
    }
    const std::size_t union_area = window_union_area(track, t_start, window);
    if (union_area == 0) return std::nullopt;
    return static_cast<double>(areas[t]) / static_cast<double>(union_area);
}

Detection detect_inconsistent(const SequenceBundle& bundle, ObjectId id, const TcConfig& cfg) {
    cfg.validate();
    Detection result;
    const int n = static_cast<int>(bundle.size());
    if (n < 2) return result;
    const int window = effective_window(cfg.window, n);
    const auto track = object_track(bundle, id);
    std::vector<std::size_t> areas(track.size());
    std::transform(track.begin(), track.end(), areas.begin(), [](const BinaryMask& m) { return area(m); });

    std::vector<int> votes(n, 0);
    std::vector<int> windows(n, 0);
    for (int t_start = 0; t_start + window <= n; ++t_start) {
        for (int t = t_start; t < t_start + window; ++t) ++windows[t];
        const std::size_t union_area = window_union_area(track, t_start, window);
        if (union_area == 0) continue;  // object absent from the whole window: no votes
        std::vector<double> values;
        for (int t = t_start; t < t_start + window; ++t) {
            values.push_back(static_cast<double>(areas[t]) / static_cast<double>(union_area));
        }

        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / window;
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        const double sigma = std::sqrt(var / window);
        const double peak = *std::max_element(values.begin(), values.end());
        for (int k = 0; k < window; ++k) {
            if (peak - values[k] > sigma) ++votes[t_start + k];
        }
    }

    for (int t = 0; t < n; ++t) {
        if (2 * votes[t] <= windows[t]) continue;
        if (looks_like_zoom(track, areas, t, window, cfg.zoom_centroid_tol)) {
            result.zoom_excluded.push_back(t);
        } else {
            result.flagged.push_back(t);
        }
    }
    return result;
}

BinaryMask difference_region(const BinaryMask& first, const BinaryMask& second) {
    const bool first_larger = area(first) >= area(second);
    const BinaryMask& larger = first_larger ? first : second;
    const BinaryMask& smaller = first_larger ? second : first;
    return mask_subtract(larger, mask_intersect(larger, smaller));
}

double occlusion_threshold(std::size_t object_area, std::size_t frame_area, const TcConfig& cfg) {
    const double reference = cfg.size_ref * static_cast<double>(frame_area);
    const double relative = std::min(1.0, static_cast<double>(object_area) / reference);
    return cfg.occlusion_tau_max - (cfg.occlusion_tau_max - cfg.occlusion_tau_min) * relative;
}

OcclusionResult occlusion_check(const RgbFrame& frame_t, const RgbFrame& frame_adjacent, const BinaryMask& mask_t,
                                const BinaryMask& mask_adjacent, const TcConfig& cfg) {
    require(frame_t.extent() == frame_adjacent.extent() && frame_t.extent() == mask_t.extent() &&
                mask_t.extent() == mask_adjacent.extent(),
            "occlusion_check: dimension mismatch");
    const std::size_t area_t = area(mask_t);
    const std::size_t area_adj = area(mask_adjacent);
    require(area_t > 0 && area_adj > 0, "occlusion_check: masks must be non-empty");

    const bool t_larger = area_t >= area_adj;
    const BinaryMask& larger = t_larger ? mask_t : mask_adjacent;
    const BinaryMask& smaller = t_larger ? mask_adjacent : mask_t;
    const Centroid cl = center_of_mass(larger);
    const Centroid cs = center_of_mass(smaller);
    const BinaryMask aligned = shift_mask(smaller, static_cast<int>(std::lround(cl.row - cs.row)),
                                          static_cast<int>(std::lround(cl.col - cs.col)));

    OcclusionResult result;
    const BinaryMask region = difference_region(larger, aligned);
    result.region_area = area(region);
    result.threshold = occlusion_threshold(std::max(area_t, area_adj), frame_t.extent().area(), cfg);
    if (result.region_area == 0) return result;

    const RgbHistogram h_t = histogram_region(frame_t, region, cfg.histogram_bins);
    const RgbHistogram h_adj = histogram_region(frame_adjacent, region, cfg.histogram_bins);
    result.mdh = manhattan_distance(h_adj, h_t);
    result.mdh_norm = result.mdh / (6.0 * static_cast<double>(result.region_area));
    result.occluded = result.mdh_norm > result.threshold;
    return result;
}

const FlowEstimate& FlowCache::get(int from, int to) {
    const auto key = std::make_pair(from, to);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, estimate_flow(frames_[from], frames_[to], params_)).first;
    return it->second;
}

namespace {

// Adds `candidate` to `id` in `map`. Background pixels are always taken;
// pixels owned by another object are taken only if that brings the object's
// colour histogram in this frame closer to its histogram in the other frame.
struct Assignment {
    std::size_t added = 0;
    std::size_t relabelled = 0;
};

Assignment assign_pixels(LabelMap& map, ObjectId id, const BinaryMask& candidate, const RgbFrame& frame,
                         const RgbHistogram& other_hist, int bins) {
    Assignment out;
    BinaryMask foreign(map.extent());
    auto labels = map.labels();
    const auto cand = candidate.bits();
    auto foreign_bits = foreign.bits();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!cand[i] || labels[i] == id) continue;
        if (labels[i] == kBackground) {
            labels[i] = id;
            ++out.added;
        } else {
            foreign_bits[i] = 1;
        }
    }
    const std::size_t foreign_area = area(foreign);
    if (foreign_area == 0) return out;

    const BinaryMask current = extract_object(map, id);
    const double before = manhattan_distance(histogram_region(frame, current, bins), other_hist);
    const double after = manhattan_distance(histogram_region(frame, mask_union(current, foreign), bins), other_hist);
    if (after < before) {
        map.paint(foreign, id);
        out.relabelled = foreign_area;
    }
    return out;
}

}  // namespace

CorrectionResult correct_frame(const SequenceBundle& os, const SequenceBundle& raw, ObjectId id, int t, int t_adjacent,
                               const TcConfig& cfg, FlowCache* cache) {
    const int n = static_cast<int>(os.size());
    require(t >= 0 && t < n && t_adjacent >= 0 && t_adjacent < n && std::abs(t - t_adjacent) == 1,
            "correct_frame: frames must be adjacent and inside the sequence");
    require(raw.size() == os.size(), "correct_frame: proposal and selection bundles differ in length");

    CorrectionResult result;
    result.map_t = os.masks[t];
    result.map_adjacent = os.masks[t_adjacent];

    const BinaryMask mask_t = extract_object(os.masks[t], id);
    const BinaryMask mask_adj = extract_object(os.masks[t_adjacent], id);
    const std::size_t area_t = area(mask_t);
    const std::size_t area_adj = area(mask_adj);
    if (area_t == area_adj) return result;  // nothing to integrate (also covers absent in both)

    std::optional<FlowCache> local;
    if (cache == nullptr) cache = &local.emplace(os.frames, cfg.flow);
    const FlowEstimate& flow = cache->get(t, t_adjacent);
    if (flow.degenerate) {
        result.uncorrectable = true;
        result.details = "flow degenerate";
        return result;
    }

    // project each mask into the other frame and take the symmetric difference
    const BinaryMask projected_fwd = warp_mask(mask_t, flow.flow);
    const BinaryMask diff_fwd =
        mask_subtract(mask_union(mask_adj, projected_fwd), mask_intersect(mask_adj, projected_fwd));
    const BinaryMask projected_bwd = warp_mask(mask_adj, negate_flow(flow.flow));
    const BinaryMask diff_bwd = mask_subtract(mask_union(mask_t, projected_bwd), mask_intersect(mask_t, projected_bwd));

    const bool t_deficient = area_t < area_adj;
    const int deficient = t_deficient ? t : t_adjacent;
    const int donor = t_deficient ? t_adjacent : t;
    const BinaryMask& deficient_mask = t_deficient ? mask_t : mask_adj;
    const BinaryMask& donor_mask = t_deficient ? mask_adj : mask_t;
    const BinaryMask missing = mask_subtract(t_deficient ? diff_bwd : diff_fwd, deficient_mask);

    const std::size_t frame_area = os.extent().area();
    const auto min_pixels = static_cast<std::size_t>(std::ceil(cfg.min_component_frac * static_cast<double>(frame_area)));
    const BinaryMask cleaned = fill_small_holes(remove_small_components(missing, min_pixels), min_pixels);
    const BinaryMask core = erode(cleaned, cfg.erosion_radius);
    const ComponentSet components = connected_components(cleaned, Connectivity::eight);

    const double minor_limit = cfg.minor_add_frac * static_cast<double>(std::max(area_t, area_adj));
    LabelMap& target = t_deficient ? result.map_t : result.map_adjacent;
    const RgbFrame& target_frame = os.frames[deficient];
    const RgbHistogram donor_hist = histogram_region(os.frames[donor], donor_mask, cfg.histogram_bins);
    const LabelMap& raw_map = raw.masks[deficient];

    std::size_t skipped_thin = 0;
    std::size_t skipped_minor = 0;
    for (const BinaryMask& component : components.components) {
        if (area(mask_intersect(component, core)) == 0) {
            ++skipped_thin;
            continue;
        }
        const std::size_t component_area = area(component);
        if (static_cast<double>(component_area) < minor_limit) {
            ++skipped_minor;
            continue;
        }
        BinaryMask candidate = component;
        if (cfg.use_all_objects) {
            for (ObjectId other : raw_map.ids()) {
                if (other == id) continue;
                const BinaryMask proposal = extract_object(raw_map, other);
                const std::size_t covered = area(mask_intersect(component, proposal));
                if (covered > 0 && static_cast<double>(covered) >= cfg.overseg_cover_frac * static_cast<double>(area(proposal))) {
                    candidate = mask_union(candidate, proposal);
                    result.merged_ids.push_back(other);
                }
            }
        }
        const Assignment a = assign_pixels(target, id, candidate, target_frame, donor_hist, cfg.histogram_bins);
        result.pixels_added += a.added;
        result.pixels_relabelled += a.relabelled;
    }

    result.corrected = result.pixels_added + result.pixels_relabelled > 0;
    if (result.corrected) result.modified_frame = deficient;

    std::ostringstream details;
    details << "from=" << donor << " added=" << result.pixels_added << " relabelled=" << result.pixels_relabelled;
    if (!result.merged_ids.empty()) {
        details << " merged=";
        for (std::size_t i = 0; i < result.merged_ids.size(); ++i) details << (i ? "," : "") << result.merged_ids[i];
    }
    if (skipped_thin) details << " thin_skipped=" << skipped_thin;
    if (skipped_minor) details << " minor_skipped=" << skipped_minor;
    result.details = details.str();
    return result;
}

namespace {

int status_rank(TcStatus s) { return static_cast<int>(s); }

class PassLog {
public:
    void note(ObjectId id, int frame, TcStatus status, const std::string& details = {}) {
        auto [it, inserted] = entries_.try_emplace({id, frame}, ReportEntry{id, frame, 0, status, details});
        if (inserted) return;
        ReportEntry& e = it->second;
        if (!details.empty()) e.details += e.details.empty() ? details : "; " + details;
        if (status_rank(status) > status_rank(e.status)) e.status = status;
    }

    void flush(int pass, InconsistencyReport& report) {
        for (auto& [key, entry] : entries_) {
            entry.pass = pass;
            report.entries.push_back(std::move(entry));
        }
        entries_.clear();
    }

private:
    std::map<std::pair<ObjectId, int>, ReportEntry> entries_;
};

std::string describe(const OcclusionResult& occ, int adjacent) {
    std::ostringstream out;
    out.precision(4);
    out << "vs " << adjacent << " mdh_norm=" << occ.mdh_norm << " tau=" << occ.threshold;
    return out.str();
}

bool present_anywhere(const SequenceBundle& bundle, ObjectId id) {
    for (const LabelMap& m : bundle.masks) {
        const auto labels = m.labels();
        if (std::find(labels.begin(), labels.end(), id) != labels.end()) return true;
    }
    return false;
}

// One detect/refine(/correct) sweep over every object. Returns whether any
// label changed.
bool sweep(SequenceBundle& state, const SequenceBundle* raw, const TcConfig& cfg, FlowCache* cache, PassLog& log) {
    const int n = static_cast<int>(state.size());
    bool changed = false;
    for (ObjectId id : state.object_ids) {
        if (!present_anywhere(state, id)) continue;
        const Detection det = detect_inconsistent(state, id, cfg);
        for (int t : det.zoom_excluded) log.note(id, t, TcStatus::refined_away_zoom);
        for (int t : det.flagged) {
            log.note(id, t, TcStatus::detected);
            for (int adjacent : {t - 1, t + 1}) {
                if (adjacent < 0 || adjacent >= n) continue;
                const BinaryMask mask_t = extract_object(state.masks[t], id);
                const BinaryMask mask_adj = extract_object(state.masks[adjacent], id);
                const bool both_present = area(mask_t) > 0 && area(mask_adj) > 0;
                if (cfg.refine && both_present) {
                    const OcclusionResult occ =
                        occlusion_check(state.frames[t], state.frames[adjacent], mask_t, mask_adj, cfg);
                    if (occ.occluded) {
                        log.note(id, t, TcStatus::refined_away_occlusion, describe(occ, adjacent));
                        continue;
                    }
                }
                if (raw == nullptr) continue;
                CorrectionResult fix = correct_frame(state, *raw, id, t, adjacent, cfg, cache);
                if (fix.uncorrectable) log.note(id, t, TcStatus::uncorrectable, fix.details);
                if (!fix.corrected) continue;
                state.masks[t] = std::move(fix.map_t);
                state.masks[adjacent] = std::move(fix.map_adjacent);
                log.note(id, fix.modified_frame, TcStatus::corrected, fix.details);
                changed = true;
            }
        }
    }
    return changed;
}

}  // namespace

TcResult run_tc(const SequenceBundle& os, const SequenceBundle& raw, const TcConfig& cfg) {
    cfg.validate();
    os.validate();
    require(raw.size() == os.size() && raw.extent() == os.extent(), "run_tc: bundles are not aligned");

    TcResult result{os, {}};
    FlowCache cache(result.bundle.frames, cfg.flow);
    const int max_passes = cfg.max_passes > 0 ? cfg.max_passes : static_cast<int>(os.size());
    for (int pass = 1; pass <= max_passes; ++pass) {
        PassLog log;
        const bool changed = sweep(result.bundle, &raw, cfg, &cache, log);
        log.flush(pass, result.report);
        result.report.passes_run = pass;
        if (!changed) break;
        ++result.report.passes_with_changes;
    }
    return result;
}

InconsistencyReport diagnose(const SequenceBundle& os, const TcConfig& cfg) {
    cfg.validate();
    os.validate();
    SequenceBundle state = os;
    PassLog log;
    sweep(state, nullptr, cfg, nullptr, log);
    InconsistencyReport report;
    log.flush(1, report);
    report.passes_run = 1;
    return report;
}

}  // namespace vospp
