#include "vospp/object_selection.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace vospp {

void SelectionConfig::validate() const {
    require(std::isfinite(alpha) && alpha >= 0.0, "selection: alpha must be a non-negative number");
    require(top_k >= 1, "selection: top_k must be >= 1");
}

namespace {

struct Tally {
    int frames = 0;
    std::uint64_t pixels = 0;
};

// Single sweep over every label map. All frames of a bundle share one
// extent, so pixel totals are divided by the frame area once at the end.
std::unordered_map<ObjectId, Tally> tally_objects(const SequenceBundle& bundle) {
    std::unordered_map<ObjectId, Tally> tallies;
    std::unordered_map<ObjectId, std::size_t> counts;
    for (const LabelMap& map : bundle.masks) {
        counts.clear();
        for (ObjectId id : map.labels()) {
            if (id != kBackground) ++counts[id];
        }
        for (const auto& [id, count] : counts) {
            Tally& t = tallies[id];
            ++t.frames;
            t.pixels += count;
        }
    }
    return tallies;
}

double frame_area(const SequenceBundle& bundle) {
    return bundle.masks.empty() ? 1.0 : static_cast<double>(bundle.masks.front().extent().area());
}

}  // namespace

double object_size(const SequenceBundle& bundle, ObjectId id) {
    std::uint64_t pixels = 0;
    for (const LabelMap& map : bundle.masks) {
        const auto labels = map.labels();
        pixels += static_cast<std::uint64_t>(std::count(labels.begin(), labels.end(), id));
    }
    return static_cast<double>(pixels) / frame_area(bundle);
}

int appearance_count(const SequenceBundle& bundle, ObjectId id) {
    int frames = 0;
    for (const LabelMap& map : bundle.masks) {
        const auto labels = map.labels();
        if (std::find(labels.begin(), labels.end(), id) != labels.end()) ++frames;
    }
    return frames;
}

std::vector<ObjectScore> score_objects(const SequenceBundle& bundle, const SelectionConfig& cfg) {
    cfg.validate();
    const auto tallies = tally_objects(bundle);
    std::vector<ObjectScore> scores;
    for (ObjectId id : bundle.object_ids) {
        const auto it = tallies.find(id);
        if (it == tallies.end() || it->second.frames == 0) continue;
        const Tally& t = it->second;
        const double size = static_cast<double>(t.pixels) / frame_area(bundle);
        scores.push_back({id, t.frames, size, static_cast<double>(t.frames) + cfg.alpha * size});
    }
    std::sort(scores.begin(), scores.end(), [](const ObjectScore& a, const ObjectScore& b) {
        if (a.combined != b.combined) return a.combined > b.combined;
        if (a.appearance_count != b.appearance_count) return a.appearance_count > b.appearance_count;
        return a.id < b.id;
    });
    return scores;
}

SequenceBundle select_top(const SequenceBundle& bundle, const SelectionConfig& cfg) {
    const auto scores = score_objects(bundle, cfg);
    std::unordered_set<ObjectId> keep;
    for (std::size_t i = 0; i < scores.size() && i < static_cast<std::size_t>(cfg.top_k); ++i) keep.insert(scores[i].id);

    SequenceBundle out;
    out.name = bundle.name;
    out.frames = bundle.frames;
    out.masks = bundle.masks;
    for (LabelMap& map : out.masks) {
        for (ObjectId& label : map.labels()) {
            if (label != kBackground && !keep.contains(label)) label = kBackground;
        }
    }
    for (ObjectId id : bundle.object_ids) {
        if (keep.contains(id)) out.object_ids.insert(id);
    }
    return out;
}

}  // namespace vospp
