#include "vospp/optical_flow.hpp"

#include <algorithm>
#include <cmath>

#include "vospp/kernels.hpp"

namespace vospp {

using flow_detail::Plane;

FlowField::FlowField(Extent extent) : extent_(extent), drow_(extent.area(), 0.0f), dcol_(extent.area(), 0.0f) {}

FlowField FlowField::uniform(Extent extent, float drow, float dcol) {
    FlowField f(extent);
    std::fill(f.drow_.begin(), f.drow_.end(), drow);
    std::fill(f.dcol_.begin(), f.dcol_.end(), dcol);
    return f;
}

void FlowParams::validate() const {
    require(window_size >= 3 && window_size % 2 == 1, "flow: window_size must be odd and >= 3");
    require(pyramid_levels >= 1, "flow: pyramid_levels must be >= 1");
    require(iterations_per_level >= 1, "flow: iterations_per_level must be >= 1");
    require(std::isfinite(eigen_floor) && eigen_floor >= 0.0f, "flow: eigen_floor must be finite and non-negative");
}

namespace flow_detail {

Plane luminance(const RgbFrame& frame) {
    Plane p{frame.width(), frame.height(), std::vector<float>(frame.extent().area())};
    kernels::active().rgb_to_luma(frame.pixels().data(), p.values.data(), p.values.size());
    return p;
}

Plane downsample(const Plane& plane) {
    static constexpr float kTaps[5] = {1.0f / 16, 4.0f / 16, 6.0f / 16, 4.0f / 16, 1.0f / 16};
    const int w = plane.width;
    const int h = plane.height;
    std::vector<float> horizontal(plane.values.size());
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            float acc = 0.0f;
            for (int k = -2; k <= 2; ++k) acc += kTaps[k + 2] * plane.at(r, std::clamp(c + k, 0, w - 1));
            horizontal[static_cast<std::size_t>(r) * w + c] = acc;
        }
    }
    Plane out{(w + 1) / 2, (h + 1) / 2, {}};
    out.values.resize(static_cast<std::size_t>(out.width) * out.height);
    for (int r = 0; r < out.height; ++r) {
        for (int c = 0; c < out.width; ++c) {
            float acc = 0.0f;
            for (int k = -2; k <= 2; ++k) {
                const int rr = std::clamp(2 * r + k, 0, h - 1);
                acc += kTaps[k + 2] * horizontal[static_cast<std::size_t>(rr) * w + 2 * c];
            }
            out.values[static_cast<std::size_t>(r) * out.width + c] = acc;
        }
    }
    return out;
}

Plane box_mean(const Plane& plane, int window) {
    const auto& k = kernels::active();
    const int w = plane.width;
    const int h = plane.height;
    const int radius = window / 2;

    // vertical pass: accumulate whole rows in a fixed order
    std::vector<float> vertical(plane.values.size(), 0.0f);
    for (int r = 0; r < h; ++r) {
        float* acc = vertical.data() + static_cast<std::size_t>(r) * w;
        for (int d = -radius; d <= radius; ++d) {
            const int rr = std::clamp(r + d, 0, h - 1);
            k.add_inplace(acc, plane.values.data() + static_cast<std::size_t>(rr) * w, static_cast<std::size_t>(w));
        }
    }

    // horizontal pass over a border-replicated copy of each row
    Plane out{w, h, std::vector<float>(plane.values.size(), 0.0f)};
    std::vector<float> padded(static_cast<std::size_t>(w) + 2 * radius);
    const float scale = 1.0f / static_cast<float>(window * window);
    for (int r = 0; r < h; ++r) {
        const float* row = vertical.data() + static_cast<std::size_t>(r) * w;
        for (int i = 0; i < radius; ++i) {
            padded[i] = row[0];
            padded[radius + w + i] = row[w - 1];
        }
        std::copy(row, row + w, padded.begin() + radius);
        float* dst = out.values.data() + static_cast<std::size_t>(r) * w;
        for (int d = 0; d < window; ++d) k.add_inplace(dst, padded.data() + d, static_cast<std::size_t>(w));
        for (int c = 0; c < w; ++c) dst[c] *= scale;
    }
    return out;
}

float sample_bilinear(const Plane& plane, float row, float col) {
    const float r = std::clamp(row, 0.0f, static_cast<float>(plane.height - 1));
    const float c = std::clamp(col, 0.0f, static_cast<float>(plane.width - 1));
    const int r0 = static_cast<int>(r);
    const int c0 = static_cast<int>(c);
    const int r1 = std::min(r0 + 1, plane.height - 1);
    const int c1 = std::min(c0 + 1, plane.width - 1);
    const float fr = r - static_cast<float>(r0);
    const float fc = c - static_cast<float>(c0);
    const float top = plane.at(r0, c0) + fc * (plane.at(r0, c1) - plane.at(r0, c0));
    const float bottom = plane.at(r1, c0) + fc * (plane.at(r1, c1) - plane.at(r1, c0));
    return top + fr * (bottom - top);
}

}  // namespace flow_detail

namespace {

struct Gradients {
    Plane ix;
    Plane iy;
};

Gradients central_gradients(const Plane& p) {
    Gradients g{{p.width, p.height, std::vector<float>(p.values.size())},
                {p.width, p.height, std::vector<float>(p.values.size())}};
    for (int r = 0; r < p.height; ++r) {
        const int up = std::max(r - 1, 0);
        const int down = std::min(r + 1, p.height - 1);
        for (int c = 0; c < p.width; ++c) {
            const int left = std::max(c - 1, 0);
            const int right = std::min(c + 1, p.width - 1);
            const std::size_t i = static_cast<std::size_t>(r) * p.width + c;
            g.ix.values[i] = 0.5f * (p.at(r, right) - p.at(r, left));
            g.iy.values[i] = 0.5f * (p.at(down, c) - p.at(up, c));
        }
    }
    return g;
}

Plane product(const Plane& a, const Plane& b) {
    Plane out{a.width, a.height, std::vector<float>(a.values.size())};
    kernels::active().mul(a.values.data(), b.values.data(), out.values.data(), out.values.size());
    return out;
}

// Window means of Ix * It and Iy * It at every pixel, where It compares the
// window in `s` with the same window in `d` displaced by that pixel's own
// flow. Coordinates outside the raster are replicated from the border, as in
// box_mean.
void window_mismatch(const Plane& s, const Plane& d, const Gradients& g, const std::vector<float>& flow_row,
                     const std::vector<float>& flow_col, int window, std::vector<float>& sxt, std::vector<float>& syt) {
    const int w = s.width;
    const int h = s.height;
    const int radius = window / 2;
    const float scale = 1.0f / static_cast<float>(window * window);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * w + c;
            const float ur = flow_row[i];
            const float uc = flow_col[i];
            const float fr = std::floor(ur);
            const float fc = std::floor(uc);
            const int oy = static_cast<int>(fr);
            const int ox = static_cast<int>(fc);
            const bool interior = r - radius >= 0 && r + radius < h && c - radius >= 0 && c + radius < w &&
                                  r - radius + oy >= 0 && r + radius + oy + 1 < h && c - radius + ox >= 0 &&
                                  c + radius + ox + 1 < w;
            float ax = 0.0f;
            float ay = 0.0f;
            if (interior) {
                const float wy = ur - fr;
                const float wx = uc - fc;
                for (int dr = -radius; dr <= radius; ++dr) {
                    const int q = r + dr;
                    const float* src = s.values.data() + static_cast<std::size_t>(q) * w;
                    const float* gx = g.ix.values.data() + static_cast<std::size_t>(q) * w;
                    const float* gy = g.iy.values.data() + static_cast<std::size_t>(q) * w;
                    const float* top = d.values.data() + static_cast<std::size_t>(q + oy) * w + ox;
                    const float* bottom = top + w;
                    for (int dc = -radius; dc <= radius; ++dc) {
                        const int x = c + dc;
                        const float upper = top[x] + wx * (top[x + 1] - top[x]);
                        const float lower = bottom[x] + wx * (bottom[x + 1] - bottom[x]);
                        const float diff = upper + wy * (lower - upper) - src[x];
                        ax += gx[x] * diff;
                        ay += gy[x] * diff;
                    }
                }
            } else {
                for (int dr = -radius; dr <= radius; ++dr) {
                    const int q = std::clamp(r + dr, 0, h - 1);
                    for (int dc = -radius; dc <= radius; ++dc) {
                        const int x = std::clamp(c + dc, 0, w - 1);
                        const std::size_t j = static_cast<std::size_t>(q) * w + x;
                        const float diff = flow_detail::sample_bilinear(d, static_cast<float>(q) + ur,
                                                                        static_cast<float>(x) + uc) -
                                           s.values[j];
                        ax += g.ix.values[j] * diff;
                        ay += g.iy.values[j] * diff;
                    }
                }
            }
            sxt[i] = ax * scale;
            syt[i] = ay * scale;
        }
    }
}

// Nearest-neighbour upsampling of a coarse flow level, doubling the vectors.
void upsample_flow(const std::vector<float>& coarse_row, const std::vector<float>& coarse_col, int coarse_width,
                   int coarse_height, int width, int height, std::vector<float>& row, std::vector<float>& col) {
    row.assign(static_cast<std::size_t>(width) * height, 0.0f);
    col.assign(row.size(), 0.0f);
    for (int r = 0; r < height; ++r) {
        const int cr = std::min(r / 2, coarse_height - 1);
        for (int c = 0; c < width; ++c) {
            const int cc = std::min(c / 2, coarse_width - 1);
            const std::size_t src = static_cast<std::size_t>(cr) * coarse_width + cc;
            const std::size_t dst = static_cast<std::size_t>(r) * width + c;
            row[dst] = 2.0f * coarse_row[src];
            col[dst] = 2.0f * coarse_col[src];
        }
    }
}

}  // namespace

FlowEstimate estimate_flow(const RgbFrame& src, const RgbFrame& dst, const FlowParams& params) {
    params.validate();
    require(src.extent() == dst.extent(), "estimate_flow: frames differ in size");
    const auto& k = kernels::active();

    std::vector<Plane> src_pyramid{flow_detail::luminance(src)};
    std::vector<Plane> dst_pyramid{flow_detail::luminance(dst)};
    while (static_cast<int>(src_pyramid.size()) < params.pyramid_levels && src_pyramid.back().width >= 8 &&
           src_pyramid.back().height >= 8) {
        src_pyramid.push_back(flow_detail::downsample(src_pyramid.back()));
        dst_pyramid.push_back(flow_detail::downsample(dst_pyramid.back()));
    }

    std::vector<float> flow_row;
    std::vector<float> flow_col;
    std::vector<std::uint8_t> gated;
    bool any_update = false;
    int prev_width = 0;
    int prev_height = 0;

    for (int level = static_cast<int>(src_pyramid.size()) - 1; level >= 0; --level) {
        const Plane& s = src_pyramid[level];
        const Plane& d = dst_pyramid[level];
        const std::size_t n = s.values.size();
        if (flow_row.empty()) {
            flow_row.assign(n, 0.0f);
            flow_col.assign(n, 0.0f);
        } else {
            const std::vector<float> coarse_row = std::move(flow_row);
            const std::vector<float> coarse_col = std::move(flow_col);
            upsample_flow(coarse_row, coarse_col, prev_width, prev_height, s.width, s.height, flow_row, flow_col);
        }
        gated.assign(n, 0);

        const Gradients g = central_gradients(s);
        const Plane sxx = flow_detail::box_mean(product(g.ix, g.ix), params.window_size);
        const Plane sxy = flow_detail::box_mean(product(g.ix, g.iy), params.window_size);
        const Plane syy = flow_detail::box_mean(product(g.iy, g.iy), params.window_size);

        std::vector<float> sxt(n);
        std::vector<float> syt(n);
        for (int it = 0; it < params.iterations_per_level; ++it) {
            window_mismatch(s, d, g, flow_row, flow_col, params.window_size, sxt, syt);
            k.lk_update(sxx.values.data(), sxy.values.data(), syy.values.data(), sxt.data(), syt.data(),
                        params.eigen_floor, flow_row.data(), flow_col.data(), gated.data(), n);
            if (!any_update) any_update = std::any_of(gated.begin(), gated.end(), [](std::uint8_t v) { return v == 0; });

            // a displacement larger than the level itself carries no information
            const float max_row = static_cast<float>(s.height);
            const float max_col = static_cast<float>(s.width);
            for (std::size_t i = 0; i < n; ++i) {
                flow_row[i] = std::isfinite(flow_row[i]) ? std::clamp(flow_row[i], -max_row, max_row) : 0.0f;
                flow_col[i] = std::isfinite(flow_col[i]) ? std::clamp(flow_col[i], -max_col, max_col) : 0.0f;
            }
        }
        prev_width = s.width;
        prev_height = s.height;
    }

    FlowEstimate result;
    result.flow = FlowField(src.extent());
    result.flow.drow_plane() = std::move(flow_row);
    result.flow.dcol_plane() = std::move(flow_col);
    result.low_confidence = BinaryMask(src.extent(), std::move(gated));
    result.degenerate = !any_update;
    return result;
}

BinaryMask warp_mask(const BinaryMask& mask, const FlowField& flow) {
    require(mask.extent() == flow.extent(), "warp_mask: dimension mismatch");
    BinaryMask out(mask.extent());
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            if (!mask.get(r, c)) continue;
            const double tr = std::round(static_cast<double>(r) + flow.drow(r, c));
            const double tc = std::round(static_cast<double>(c) + flow.dcol(r, c));
            if (!(tr >= 0.0 && tc >= 0.0 && tr < mask.height() && tc < mask.width())) continue;
            out.set(static_cast<int>(tr), static_cast<int>(tc));
        }
    }
    return out;
}

FlowField negate_flow(const FlowField& flow) {
    FlowField out(flow.extent());
    for (std::size_t i = 0; i < flow.drow_plane().size(); ++i) {
        out.drow_plane()[i] = -flow.drow_plane()[i];
        out.dcol_plane()[i] = -flow.dcol_plane()[i];
    }
    return out;
}

}  // namespace vospp
