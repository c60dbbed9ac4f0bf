#pragma once

#include <vector>

#include "vospp/mask_model.hpp"

namespace vospp {

/// Dense displacement field: source pixel p maps to p + v(p) in the target.
class FlowField {
public:
    FlowField() = default;
    explicit FlowField(Extent extent);

    const Extent& extent() const { return extent_; }
    int width() const { return extent_.width; }
    int height() const { return extent_.height; }

    float drow(int row, int col) const { return drow_[index(row, col)]; }
    float dcol(int row, int col) const { return dcol_[index(row, col)]; }
    void set(int row, int col, float drow, float dcol) {
        drow_[index(row, col)] = drow;
        dcol_[index(row, col)] = dcol;
    }

    std::vector<float>& drow_plane() { return drow_; }
    std::vector<float>& dcol_plane() { return dcol_; }
    const std::vector<float>& drow_plane() const { return drow_; }
    const std::vector<float>& dcol_plane() const { return dcol_; }

    static FlowField uniform(Extent extent, float drow, float dcol);

    friend bool operator==(const FlowField&, const FlowField&) = default;

private:
    std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * extent_.width + col; }

    Extent extent_;
    std::vector<float> drow_;
    std::vector<float> dcol_;
};

struct FlowParams {
    int window_size = 15;
    int pyramid_levels = 3;
    int iterations_per_level = 5;
    /// Smallest structure-tensor eigenvalue (window-averaged, intensities in [0,1]).
    float eigen_floor = 1e-4f;

    void validate() const;
};

struct FlowEstimate {
    FlowField flow;
    /// Pixels whose last update at the finest level was skipped by the eigenvalue gate.
    BinaryMask low_confidence;
    /// True when no pixel passed the gate (e.g. constant frames); flow is zero.
    bool degenerate = false;
};

/// Pyramidal iterative Lucas-Kanade between two frames of identical size.
FlowEstimate estimate_flow(const RgbFrame& src, const RgbFrame& dst, const FlowParams& params = {});

/// Forward nearest-neighbour projection of a mask along a flow field.
BinaryMask warp_mask(const BinaryMask& mask, const FlowField& flow);

FlowField negate_flow(const FlowField& flow);

namespace flow_detail {

/// Single-channel float image used by the pyramid.
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<float> values;

    float at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
};

Plane luminance(const RgbFrame& frame);
/// Blur with the 5-tap binomial kernel (replicated border), keep even pixels.
Plane downsample(const Plane& plane);
/// Windowed sums of side `window`, replicated border, divided by window^2.
Plane box_mean(const Plane& plane, int window);
/// Bilinear sample with replicated border.
float sample_bilinear(const Plane& plane, float row, float col);

}  // namespace flow_detail

}  // namespace vospp
