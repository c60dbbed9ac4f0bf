#include "vospp/raster_ops.hpp"

#include <array>
#include <numeric>

#include "vospp/kernels.hpp"

namespace vospp {

std::uint64_t RgbHistogram::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

ComponentLabels label_components(const BinaryMask& mask, Connectivity connectivity) {
    const int w = mask.width();
    const int h = mask.height();
    ComponentLabels out;
    out.labels.assign(mask.extent().area(), -1);

    static constexpr std::array<std::array<int, 2>, 8> kOffsets{
        {{-1, 0}, {1, 0}, {0, -1}, {0, 1}, {-1, -1}, {-1, 1}, {1, -1}, {1, 1}}};
    const int neighbours = connectivity == Connectivity::eight ? 8 : 4;

    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < out.labels.size(); ++start) {
        if (!mask.test(start) || out.labels[start] >= 0) continue;
        const int label = static_cast<int>(out.areas.size());
        std::size_t count = 0;
        out.labels[start] = label;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            ++count;
            const int r = static_cast<int>(p / w);
            const int c = static_cast<int>(p % w);
            for (int k = 0; k < neighbours; ++k) {
                const int nr = r + kOffsets[k][0];
                const int nc = c + kOffsets[k][1];
                if (nr < 0 || nc < 0 || nr >= h || nc >= w) continue;
                const std::size_t q = static_cast<std::size_t>(nr) * w + nc;
                if (mask.test(q) && out.labels[q] < 0) {
                    out.labels[q] = label;
                    stack.push_back(q);
                }
            }
        }
        out.areas.push_back(count);
    }
    return out;
}

ComponentSet connected_components(const BinaryMask& mask, Connectivity connectivity) {
    const ComponentLabels labelled = label_components(mask, connectivity);
    ComponentSet set;
    set.connectivity = connectivity;
    set.components.assign(labelled.areas.size(), BinaryMask(mask.extent()));
    for (std::size_t i = 0; i < labelled.labels.size(); ++i) {
        if (labelled.labels[i] >= 0) set.components[labelled.labels[i]].bits()[i] = 1;
    }
    return set;
}

namespace {

// One-dimensional erosion along rows (stride 1) or columns (stride w) using a
// running count of set pixels in the window.
void erode_lines(const std::uint8_t* in, std::uint8_t* out, int lines, int length, std::size_t line_step,
                 std::size_t elem_step, int radius) {
    const int span = 2 * radius + 1;
    std::vector<int> prefix(static_cast<std::size_t>(length) + 1);
    for (int line = 0; line < lines; ++line) {
        const std::uint8_t* src = in + line * line_step;
        std::uint8_t* dst = out + line * line_step;
        prefix[0] = 0;
        for (int i = 0; i < length; ++i) prefix[i + 1] = prefix[i] + src[i * elem_step];
        for (int i = 0; i < length; ++i) {
            const int lo = i - radius;
            const int hi = i + radius;
            const bool inside = lo >= 0 && hi < length;
            dst[i * elem_step] = inside && prefix[hi + 1] - prefix[lo] == span ? 1 : 0;
        }
    }
}

}  // namespace

BinaryMask erode(const BinaryMask& mask, int radius) {
    require(radius >= 0, "erode: radius must be non-negative");
    if (radius == 0) return mask;
    const int w = mask.width();
    const int h = mask.height();
    BinaryMask horizontal(mask.extent());
    erode_lines(mask.bits().data(), horizontal.bits().data(), h, w, static_cast<std::size_t>(w), 1, radius);
    BinaryMask out(mask.extent());
    erode_lines(horizontal.bits().data(), out.bits().data(), w, h, 1, static_cast<std::size_t>(w), radius);
    return out;
}

BinaryMask remove_small_components(const BinaryMask& mask, std::size_t min_area, Connectivity connectivity) {
    if (min_area == 0) return mask;
    const ComponentLabels labelled = label_components(mask, connectivity);
    BinaryMask out(mask.extent());
    auto bits = out.bits();
    for (std::size_t i = 0; i < labelled.labels.size(); ++i) {
        const int label = labelled.labels[i];
        if (label >= 0 && labelled.areas[label] >= min_area) bits[i] = 1;
    }
    return out;
}

BinaryMask fill_small_holes(const BinaryMask& mask, std::size_t max_hole_area) {
    const BinaryMask background = mask_complement(mask);
    const ComponentLabels labelled = label_components(background, Connectivity::four);
    std::vector<bool> touches_border(labelled.areas.size(), false);
    const int w = mask.width();
    const int h = mask.height();
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (r != 0 && c != 0 && r != h - 1 && c != w - 1) continue;
            const int label = labelled.labels[static_cast<std::size_t>(r) * w + c];
            if (label >= 0) touches_border[label] = true;
        }
    }
    BinaryMask out = mask;
    auto bits = out.bits();
    for (std::size_t i = 0; i < labelled.labels.size(); ++i) {
        const int label = labelled.labels[i];
        if (label >= 0 && !touches_border[label] && labelled.areas[label] <= max_hole_area) bits[i] = 1;
    }
    return out;
}

Centroid center_of_mass(const BinaryMask& mask) {
    double sum_row = 0.0;
    double sum_col = 0.0;
    std::size_t count = 0;
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            if (!mask.get(r, c)) continue;
            sum_row += r;
            sum_col += c;
            ++count;
        }
    }
    if (count == 0) throw UndefinedCentroid();
    return {sum_row / static_cast<double>(count), sum_col / static_cast<double>(count)};
}

RgbHistogram histogram_region(const RgbFrame& frame, const BinaryMask& region, int bins_per_channel) {
    require(frame.extent() == region.extent(), "histogram_region: dimension mismatch");
    require(bins_per_channel >= 1 && bins_per_channel <= 256 && 256 % bins_per_channel == 0,
            "histogram_region: bins_per_channel must divide 256");
    const int bin_width = 256 / bins_per_channel;
    RgbHistogram hist{bins_per_channel, std::vector<std::uint32_t>(3 * static_cast<std::size_t>(bins_per_channel), 0)};
    const auto px = frame.pixels();
    const auto bits = region.bits();
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (!bits[i]) continue;
        for (int ch = 0; ch < 3; ++ch) {
            ++hist.counts[static_cast<std::size_t>(ch) * bins_per_channel + px[3 * i + ch] / bin_width];
        }
    }
    return hist;
}

double manhattan_distance(const RgbHistogram& a, const RgbHistogram& b) {
    require(a.bins_per_channel == b.bins_per_channel && a.counts.size() == b.counts.size(),
            "manhattan_distance: histograms have different bin counts");
    return static_cast<double>(kernels::active().abs_diff_sum(a.counts.data(), b.counts.data(), a.counts.size()));
}

}  // namespace vospp
