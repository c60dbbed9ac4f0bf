#include "vospp/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace vospp {

double jaccard(const BinaryMask& pred, const BinaryMask& gt) {
    require(pred.extent() == gt.extent(), "jaccard: dimension mismatch");
    const std::size_t inter = area(mask_intersect(pred, gt));
    const std::size_t uni = area(mask_union(pred, gt));
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

int default_boundary_tolerance(const Extent& extent) {
    const double diagonal = std::hypot(static_cast<double>(extent.width), static_cast<double>(extent.height));
    return static_cast<int>(std::ceil(0.008 * diagonal));
}

BinaryMask contour(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    BinaryMask out(mask.extent());
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!mask.get(r, c)) continue;
            const bool edge = r == 0 || c == 0 || r == h - 1 || c == w - 1 || !mask.get(r - 1, c) ||
                              !mask.get(r + 1, c) || !mask.get(r, c - 1) || !mask.get(r, c + 1);
            if (edge) out.set(r, c);
        }
    }
    return out;
}

namespace {

// Square dilation; pixels beyond the raster are ignored.
BinaryMask dilate(const BinaryMask& mask, int radius) {
    if (radius <= 0) return mask;
    const int w = mask.width();
    const int h = mask.height();
    auto pass = [radius](const std::uint8_t* in, std::uint8_t* out, int lines, int length, std::size_t line_step,
                         std::size_t elem_step) {
        std::vector<int> prefix(static_cast<std::size_t>(length) + 1);
        for (int line = 0; line < lines; ++line) {
            const std::uint8_t* src = in + line * line_step;
            std::uint8_t* dst = out + line * line_step;
            prefix[0] = 0;
            for (int i = 0; i < length; ++i) prefix[i + 1] = prefix[i] + src[i * elem_step];
            for (int i = 0; i < length; ++i) {
                const int lo = std::max(i - radius, 0);
                const int hi = std::min(i + radius, length - 1);
                dst[i * elem_step] = prefix[hi + 1] - prefix[lo] > 0 ? 1 : 0;
            }
        }
    };
    BinaryMask tmp(mask.extent());
    pass(mask.bits().data(), tmp.bits().data(), h, w, static_cast<std::size_t>(w), 1);
    BinaryMask out(mask.extent());
    pass(tmp.bits().data(), out.bits().data(), w, h, 1, static_cast<std::size_t>(w));
    return out;
}

struct BoundaryCache {
    BinaryMask contour;
    BinaryMask reach;  // contour dilated by the tolerance
    std::size_t contour_area = 0;
};

BoundaryCache boundary_of(const BinaryMask& mask, int tol) {
    BoundaryCache b;
    b.contour = contour(mask);
    b.reach = dilate(b.contour, tol);
    b.contour_area = area(b.contour);
    return b;
}

double f_measure(const BoundaryCache& pred, const BoundaryCache& gt) {
    if (pred.contour_area == 0 && gt.contour_area == 0) return 1.0;
    if (pred.contour_area == 0 || gt.contour_area == 0) return 0.0;
    const double precision =
        static_cast<double>(area(mask_intersect(pred.contour, gt.reach))) / static_cast<double>(pred.contour_area);
    const double recall =
        static_cast<double>(area(mask_intersect(gt.contour, pred.reach))) / static_cast<double>(gt.contour_area);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

struct Track {
    std::vector<BinaryMask> masks;
    std::vector<BoundaryCache> boundaries;
};

Track track_of(const SequenceBundle& bundle, ObjectId id, int tol) {
    Track t;
    for (const LabelMap& m : bundle.masks) {
        t.masks.push_back(id == kBackground ? BinaryMask(m.extent()) : extract_object(m, id));
        t.boundaries.push_back(boundary_of(t.masks.back(), tol));
    }
    return t;
}

ObjectMetrics score_pair(const Track& pred, const Track& gt) {
    ObjectMetrics m;
    const std::size_t frames = gt.masks.size();
    for (std::size_t i = 0; i < frames; ++i) {
        m.j_mean += jaccard(pred.masks[i], gt.masks[i]);
        m.f_mean += f_measure(pred.boundaries[i], gt.boundaries[i]);
    }
    m.j_mean /= static_cast<double>(frames);
    m.f_mean /= static_cast<double>(frames);
    m.jf = (m.j_mean + m.f_mean) / 2.0;
    return m;
}

void finish(SequenceMetrics& s) {
    s.j_mean = s.f_mean = s.jf = 0.0;
    if (s.objects.empty()) return;
    for (const auto& o : s.objects) {
        s.j_mean += o.j_mean;
        s.f_mean += o.f_mean;
    }
    s.j_mean /= static_cast<double>(s.objects.size());
    s.f_mean /= static_cast<double>(s.objects.size());
    s.jf = (s.j_mean + s.f_mean) / 2.0;
}

}  // namespace

double boundary_f(const BinaryMask& pred, const BinaryMask& gt, int tol) {
    require(pred.extent() == gt.extent(), "boundary_f: dimension mismatch");
    require(tol >= 0, "boundary_f: tolerance must be non-negative");
    return f_measure(boundary_of(pred, tol), boundary_of(gt, tol));
}

SequenceMetrics evaluate_sequence(const SequenceBundle& pred, const SequenceBundle& gt, const EvaluationOptions& options) {
    require(pred.masks.size() == gt.masks.size(), "evaluate: frame counts differ for '" + gt.name + "'");
    require(!gt.masks.empty(), "evaluate: empty sequence '" + gt.name + "'");
    for (std::size_t i = 0; i < gt.masks.size(); ++i) {
        require(pred.masks[i].extent() == gt.masks[i].extent(),
                "evaluate: frame " + std::to_string(i) + " dimensions differ for '" + gt.name + "'");
    }
    const int tol = options.boundary_tol >= 0 ? options.boundary_tol : default_boundary_tolerance(gt.masks[0].extent());

    const std::vector<ObjectId> gt_ids(gt.object_ids.begin(), gt.object_ids.end());
    const std::vector<ObjectId> pred_ids(pred.object_ids.begin(), pred.object_ids.end());
    std::vector<Track> gt_tracks;
    for (ObjectId id : gt_ids) gt_tracks.push_back(track_of(gt, id, tol));
    const Track empty = track_of(gt, kBackground, tol);

    SequenceMetrics result;
    if (options.matching == Matching::identity) {
        for (std::size_t g = 0; g < gt_ids.size(); ++g) {
            const bool present = pred.object_ids.contains(gt_ids[g]);
            ObjectMetrics m = present ? score_pair(track_of(pred, gt_ids[g], tol), gt_tracks[g]) : score_pair(empty, gt_tracks[g]);
            m.id = gt_ids[g];
            m.matched = present ? gt_ids[g] : kBackground;
            result.objects.push_back(m);
        }
    } else {
        // fewer predictions than objects: pad with empty tracks so every
        // ground-truth object is scored against something
        std::vector<Track> pred_tracks;
        std::vector<ObjectId> column_ids = pred_ids;
        for (ObjectId id : pred_ids) pred_tracks.push_back(track_of(pred, id, tol));
        while (pred_tracks.size() < gt_ids.size()) {
            pred_tracks.push_back(empty);
            column_ids.push_back(kBackground);
        }
        std::vector<std::vector<ObjectMetrics>> pairs(gt_ids.size(), std::vector<ObjectMetrics>(pred_tracks.size()));
        std::vector<std::vector<double>> weights(gt_ids.size(), std::vector<double>(pred_tracks.size()));
        for (std::size_t g = 0; g < gt_ids.size(); ++g) {
            for (std::size_t p = 0; p < pred_tracks.size(); ++p) {
                pairs[g][p] = score_pair(pred_tracks[p], gt_tracks[g]);
                weights[g][p] = pairs[g][p].jf;
            }
        }
        const std::vector<int> assigned = max_weight_assignment(weights);
        for (std::size_t g = 0; g < gt_ids.size(); ++g) {
            ObjectMetrics m = assigned[g] >= 0 ? pairs[g][assigned[g]] : score_pair(empty, gt_tracks[g]);
            m.id = gt_ids[g];
            m.matched = assigned[g] >= 0 ? column_ids[assigned[g]] : kBackground;
            result.objects.push_back(m);
        }
    }
    finish(result);
    return result;
}

SequenceMetrics aggregate(const std::vector<SequenceMetrics>& sequences) {
    SequenceMetrics all;
    for (const auto& s : sequences) all.objects.insert(all.objects.end(), s.objects.begin(), s.objects.end());
    finish(all);
    return all;
}

}  // namespace vospp
