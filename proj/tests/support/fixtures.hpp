#pragma once
// Scenes shared by the unit, property and acceptance suites.

#include "vospp/mask_model.hpp"
#include "vospp/synthetic.hpp"

namespace fixtures {

using namespace vospp;

// 11 frames of 10x10. Object 1 covers 30 px of frames 0-9 (N=10, S=3),
// object 2 covers 1 px of frames 0-9 (N=10, S=0.1), object 3 covers 90 px
// of frame 10 only (N=1, S=0.9).
inline SequenceBundle three_objects() {
    const Extent e{10, 10};
    std::vector<RgbFrame> frames;
    std::vector<LabelMap> masks;
    for (int f = 0; f < 11; ++f) {
        LabelMap m(e);
        if (f < 10) {
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 10; ++c) m.set(r, c, 1);
            m.set(9, 9, 2);
        } else {
            for (int r = 0; r < 9; ++r)
                for (int c = 0; c < 10; ++c) m.set(r, c, 3);
        }
        frames.emplace_back(10, 10);
        masks.push_back(m);
    }
    return make_bundle("three_objects", std::move(frames), std::move(masks));
}

// One textured 16x16 square on a textured 64x64 background, 10 frames.
inline SceneScript single_object(double vcol = 0.0, double scale_rate = 1.0) {
    SceneScript s;
    s.width = 64;
    s.height = 64;
    s.frames = 10;
    s.seed = 7;
    s.background = {{90, 110, 90}, 40, 4.0};
    ObjectScript o;
    o.id = 1;
    o.center = {32, 24};
    o.size = {16, 16};
    o.velocity = {0.0, vcol};
    o.scale_rate = scale_rate;
    o.texture = {{200, 60, 60}, 25, 4.0};
    s.objects.push_back(o);
    return s;
}

inline Defect drop(std::size_t frame, double fraction = 0.5, Side side = Side::right) {
    Defect d;
    d.id = 1;
    d.frame = frame;
    d.kind = DefectKind::drop_part;
    d.fraction = fraction;
    d.side = side;
    return d;
}

inline Defect occlude(std::size_t frame, double fraction = 0.5) {
    Defect d = drop(frame, fraction);
    d.kind = DefectKind::occlude;
    d.occluder = {{30, 200, 220}, 20, 3.0};
    return d;
}

inline Defect oversplit(std::size_t frame, ObjectId new_id, double fraction = 0.4) {
    Defect d = drop(frame, fraction);
    d.kind = DefectKind::oversplit;
    d.new_id = new_id;
    return d;
}

}  // namespace fixtures
