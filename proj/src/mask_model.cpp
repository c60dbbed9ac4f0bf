#include "vospp/mask_model.hpp"

#include <algorithm>
#include <utility>

#include "vospp/kernels.hpp"

namespace vospp {

namespace {

void require_extent(int width, int height) {
    require(width >= 1 && height >= 1, "raster dimensions must be at least 1x1");
}

void require_same(const BinaryMask& a, const BinaryMask& b, const char* op) {
    require(a.extent() == b.extent(), std::string("mask ") + op + ": dimension mismatch");
}

}  // namespace

RgbFrame::RgbFrame(int width, int height) : extent_{width, height} {
    require_extent(width, height);
    pixels_.assign(extent_.area() * 3, 0);
}

RgbFrame::RgbFrame(int width, int height, std::vector<std::uint8_t> pixels)
    : extent_{width, height}, pixels_(std::move(pixels)) {
    require_extent(width, height);
    require(pixels_.size() == extent_.area() * 3, "RgbFrame: pixel buffer must hold width*height*3 bytes");
}

BinaryMask::BinaryMask(Extent extent, bool value) : extent_(extent) {
    require_extent(extent.width, extent.height);
    bits_.assign(extent_.area(), value ? 1 : 0);
}

BinaryMask::BinaryMask(Extent extent, std::vector<std::uint8_t> bits) : extent_(extent), bits_(std::move(bits)) {
    require_extent(extent.width, extent.height);
    require(bits_.size() == extent_.area(), "BinaryMask: bit buffer must hold width*height entries");
    for (auto& b : bits_) b = b != 0 ? 1 : 0;
}

bool BinaryMask::empty() const {
    return std::none_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; });
}

LabelMap::LabelMap(Extent extent, ObjectId fill) : extent_(extent) {
    require_extent(extent.width, extent.height);
    labels_.assign(extent_.area(), fill);
}

LabelMap::LabelMap(Extent extent, std::vector<ObjectId> labels) : extent_(extent), labels_(std::move(labels)) {
    require_extent(extent.width, extent.height);
    require(labels_.size() == extent_.area(), "LabelMap: label buffer must hold width*height entries");
}

std::set<ObjectId> LabelMap::ids() const {
    std::vector<bool> seen(65536, false);
    for (ObjectId id : labels_) seen[id] = true;
    std::set<ObjectId> out;
    for (std::size_t id = 1; id < seen.size(); ++id) {
        if (seen[id]) out.insert(static_cast<ObjectId>(id));
    }
    return out;
}

void LabelMap::paint(const BinaryMask& mask, ObjectId id) {
    require(mask.extent() == extent_, "LabelMap::paint: dimension mismatch");
    const auto bits = mask.bits();
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (bits[i]) labels_[i] = id;
    }
}

void SequenceBundle::validate() const {
    require(!frames.empty(), "sequence '" + name + "' has no frames");
    require(frames.size() == masks.size(), "sequence '" + name + "': frame and mask counts differ");
    const Extent e = frames.front().extent();
    for (std::size_t i = 0; i < frames.size(); ++i) {
        require(frames[i].extent() == e, "sequence '" + name + "': frame " + std::to_string(i) + " has different dimensions");
        require(masks[i].extent() == e, "sequence '" + name + "': mask " + std::to_string(i) + " has different dimensions");
        for (ObjectId id : masks[i].ids()) {
            require(object_ids.contains(id),
                    "sequence '" + name + "': label " + std::to_string(id) + " in frame " + std::to_string(i) + " is not registered");
        }
    }
    require(!object_ids.contains(kBackground), "sequence '" + name + "': background id registered as an object");
}

void SequenceBundle::rebuild_registry() {
    object_ids.clear();
    for (const auto& m : masks) object_ids.merge(m.ids());
}

SequenceBundle make_bundle(std::string name, std::vector<RgbFrame> frames, std::vector<LabelMap> masks) {
    SequenceBundle bundle{std::move(name), std::move(frames), std::move(masks), {}};
    bundle.rebuild_registry();
    bundle.validate();
    return bundle;
}

BinaryMask extract_object(const LabelMap& map, ObjectId id) {
    require(id != kBackground, "extract_object: id must be nonzero");
    BinaryMask out(map.extent());
    const auto labels = map.labels();
    auto bits = out.bits();
    for (std::size_t i = 0; i < labels.size(); ++i) bits[i] = labels[i] == id ? 1 : 0;
    return out;
}

std::size_t area(const BinaryMask& mask) {
    const auto bits = mask.bits();
    return kernels::active().count_nonzero(bits.data(), bits.size());
}

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
    require_same(a, b, "union");
    BinaryMask out(a.extent());
    kernels::active().mask_or(a.bits().data(), b.bits().data(), out.bits().data(), out.bits().size());
    return out;
}

BinaryMask mask_intersect(const BinaryMask& a, const BinaryMask& b) {
    require_same(a, b, "intersect");
    BinaryMask out(a.extent());
    kernels::active().mask_and(a.bits().data(), b.bits().data(), out.bits().data(), out.bits().size());
    return out;
}

BinaryMask mask_subtract(const BinaryMask& a, const BinaryMask& b) {
    require_same(a, b, "subtract");
    BinaryMask out(a.extent());
    kernels::active().mask_andnot(a.bits().data(), b.bits().data(), out.bits().data(), out.bits().size());
    return out;
}

BinaryMask mask_complement(const BinaryMask& a) {
    BinaryMask out(a.extent());
    const auto in = a.bits();
    auto bits = out.bits();
    for (std::size_t i = 0; i < in.size(); ++i) bits[i] = in[i] ^ 1u;
    return out;
}

BinaryMask shift_mask(const BinaryMask& mask, int drow, int dcol) {
    BinaryMask out(mask.extent());
    const int w = mask.width();
    const int h = mask.height();
    for (int r = 0; r < h; ++r) {
        const int tr = r + drow;
        if (tr < 0 || tr >= h) continue;
        for (int c = 0; c < w; ++c) {
            const int tc = c + dcol;
            if (tc < 0 || tc >= w) continue;
            if (mask.get(r, c)) out.set(tr, tc);
        }
    }
    return out;
}

}  // namespace vospp
