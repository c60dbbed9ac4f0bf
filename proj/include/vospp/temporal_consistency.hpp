#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vospp/mask_model.hpp"
#include "vospp/optical_flow.hpp"
#include "vospp/raster_ops.hpp"

namespace vospp {

struct TcConfig {
    int window = 5;
    double occlusion_tau_min = 0.4;
    double occlusion_tau_max = 0.7;
    /// Object area (as a fraction of the frame) at which the occlusion
    /// threshold reaches occlusion_tau_min.
    double size_ref = 0.01;
    double zoom_centroid_tol = 0.2;
    double min_component_frac = 0.0005;
    double minor_add_frac = 0.05;
    double overseg_cover_frac = 0.6;
    int erosion_radius = 1;
    /// 0 means "number of frames".
    int max_passes = 0;
    int histogram_bins = kDefaultHistogramBins;
    /// Occlusion filtering of detected frames.
    bool refine = true;
    /// Whole-mask merges from the unfiltered proposals.
    bool use_all_objects = true;
    FlowParams flow;

    void validate() const;
};

enum class TcStatus { detected, refined_away_zoom, refined_away_occlusion, uncorrectable, corrected };

std::string_view to_string(TcStatus status);
std::optional<TcStatus> parse_status(std::string_view text);

struct ReportEntry {
    ObjectId id = kBackground;
    int frame = 0;
    int pass = 0;
    TcStatus status = TcStatus::detected;
    std::string details;
};

struct InconsistencyReport {
    std::vector<ReportEntry> entries;
    int passes_run = 0;
    int passes_with_changes = 0;

    std::size_t count(TcStatus status) const;
    /// Entries for one object/frame across all passes.
    std::vector<ReportEntry> find(ObjectId id, int frame) const;
    bool has(ObjectId id, int frame, TcStatus status) const;
};

/// Ratio of the object's area at frame t to the area of its union over the
/// frames [t_start, t_start + window). Empty union yields nullopt.
std::optional<double> mou(const SequenceBundle& bundle, ObjectId id, int t, int t_start, int window);

struct Detection {
    std::vector<int> flagged;
    /// Frames that passed the vote but were dropped as zoom.
    std::vector<int> zoom_excluded;
};

Detection detect_inconsistent(const SequenceBundle& bundle, ObjectId id, const TcConfig& cfg);

/// Larger mask minus its overlap with the smaller one; on equal areas the
/// first argument is taken as the larger.
BinaryMask difference_region(const BinaryMask& first, const BinaryMask& second);

struct OcclusionResult {
    bool occluded = false;
    double mdh = 0.0;
    double mdh_norm = 0.0;
    double threshold = 0.0;
    std::size_t region_area = 0;
};

/// Occlusion threshold for an object of `object_area` pixels.
double occlusion_threshold(std::size_t object_area, std::size_t frame_area, const TcConfig& cfg);

OcclusionResult occlusion_check(const RgbFrame& frame_t, const RgbFrame& frame_adjacent, const BinaryMask& mask_t,
                                const BinaryMask& mask_adjacent, const TcConfig& cfg);

/// Memoises flow between frame pairs of one sequence.
class FlowCache {
public:
    FlowCache(const std::vector<RgbFrame>& frames, FlowParams params) : frames_(frames), params_(params) {}

    const FlowEstimate& get(int from, int to);
    std::size_t computed() const { return cache_.size(); }

private:
    const std::vector<RgbFrame>& frames_;
    FlowParams params_;
    std::map<std::pair<int, int>, FlowEstimate> cache_;
};

struct CorrectionResult {
    LabelMap map_t;
    LabelMap map_adjacent;
    bool corrected = false;
    bool uncorrectable = false;
    /// Frame that received pixels (t or the adjacent index), -1 if none.
    int modified_frame = -1;
    std::size_t pixels_added = 0;
    std::size_t pixels_relabelled = 0;
    std::vector<ObjectId> merged_ids;
    std::string details;
};

/// Integrates the parts of `id` missing from whichever of frames t and
/// t_adjacent holds the smaller mask. |t - t_adjacent| must be 1.
CorrectionResult correct_frame(const SequenceBundle& os, const SequenceBundle& raw, ObjectId id, int t, int t_adjacent,
                               const TcConfig& cfg, FlowCache* cache = nullptr);

struct TcResult {
    SequenceBundle bundle;
    InconsistencyReport report;
};

/// Detect, refine and correct repeatedly until a pass changes nothing or
/// the pass limit is reached.
TcResult run_tc(const SequenceBundle& os, const SequenceBundle& raw, const TcConfig& cfg);

/// Detection and refinement only; the input is not modified.
InconsistencyReport diagnose(const SequenceBundle& os, const TcConfig& cfg);

}  // namespace vospp
