#include "vospp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace vospp {

namespace {

// Bilinear value noise on a square lattice filled from raw mt19937 output,
// so the field is identical on every standard library.
class ValueNoise {
public:
    ValueNoise(double rows, double cols, double spacing, std::uint64_t seed)
        : spacing_(spacing),
          rows_(static_cast<int>(std::ceil(rows / spacing)) + 2),
          cols_(static_cast<int>(std::ceil(cols / spacing)) + 2),
          values_(static_cast<std::size_t>(rows_) * cols_) {
        std::mt19937 gen(static_cast<std::mt19937::result_type>(seed ^ (seed >> 32)));
        for (double& v : values_) v = static_cast<double>(gen()) / 4294967295.0 * 2.0 - 1.0;
    }

    double at(double y, double x) const {
        const double gy = std::clamp(y / spacing_, 0.0, static_cast<double>(rows_ - 1));
        const double gx = std::clamp(x / spacing_, 0.0, static_cast<double>(cols_ - 1));
        const int y0 = std::min(static_cast<int>(gy), rows_ - 2);
        const int x0 = std::min(static_cast<int>(gx), cols_ - 2);
        const double fy = gy - y0;
        const double fx = gx - x0;
        const double a = value(y0, x0) * (1 - fx) + value(y0, x0 + 1) * fx;
        const double b = value(y0 + 1, x0) * (1 - fx) + value(y0 + 1, x0 + 1) * fx;
        return a * (1 - fy) + b * fy;
    }

private:
    double value(int r, int c) const { return values_[static_cast<std::size_t>(r) * cols_ + c]; }

    double spacing_;
    int rows_;
    int cols_;
    std::vector<double> values_;
};

void shade(std::uint8_t* px, const Texture& t, double v) {
    const long offset = std::lround(t.noise * v);
    for (int ch = 0; ch < 3; ++ch) px[ch] = static_cast<std::uint8_t>(std::clamp<long>(t.color[ch] + offset, 0, 255));
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct Pose {
    double row, col, scale;
};

Pose pose_at(const ObjectScript& o, int f) {
    return {o.center[0] + f * o.velocity[0], o.center[1] + f * o.velocity[1], std::pow(o.scale_rate, f)};
}

// Half extents of the object at scale 1: (rows, cols).
std::array<double, 2> half_extent(const ObjectScript& o) {
    if (o.shape == Shape::disk) return {o.radius, o.radius};
    return {o.size[0] / 2.0, o.size[1] / 2.0};
}

void validate_texture(const Texture& t, const std::string& what) {
    if (t.noise < 0 || t.noise > 255) throw ScriptError(what + ": noise must lie in [0, 255]");
    if (!(t.texture_scale > 0.0)) throw ScriptError(what + ": texture_scale must be positive");
}

}  // namespace

void SceneScript::validate() const {
    if (width <= 0 || height <= 0) throw ScriptError("scene: canvas size must be positive");
    if (frames <= 0) throw ScriptError("scene: frame count must be positive");
    validate_texture(background, "background");
    std::vector<ObjectId> seen;
    for (const ObjectScript& o : objects) {
        const std::string tag = "object " + std::to_string(o.id);
        if (o.id == kBackground) throw ScriptError("scene: object id 0 is reserved for background");
        if (std::find(seen.begin(), seen.end(), o.id) != seen.end()) throw ScriptError("scene: duplicate " + tag);
        seen.push_back(o.id);
        if (o.shape == Shape::rectangle && !(o.size[0] > 0 && o.size[1] > 0)) throw ScriptError(tag + ": size must be positive");
        if (o.shape == Shape::disk && !(o.radius > 0)) throw ScriptError(tag + ": radius must be positive");
        if (!(o.scale_rate > 0)) throw ScriptError(tag + ": scale_rate must be positive");
        validate_texture(o.texture, tag);
        const auto half = half_extent(o);
        for (int f = 0; f < frames; ++f) {
            const Pose p = pose_at(o, f);
            const double hr = half[0] * p.scale;
            const double hc = half[1] * p.scale;
            if (p.row - hr < 0 || p.col - hc < 0 || p.row + hr > height || p.col + hc > width) {
                throw ScriptError(tag + " leaves the canvas at frame " + std::to_string(f));
            }
        }
    }
}

RenderedScene render(const SceneScript& script, const std::string& name) {
    script.validate();
    const Extent extent{script.width, script.height};
    const ValueNoise background(script.height, script.width, script.background.texture_scale, mix(script.seed, 0));
    std::vector<ValueNoise> textures;
    for (const ObjectScript& o : script.objects) {
        const auto half = half_extent(o);
        textures.emplace_back(2 * half[0], 2 * half[1], o.texture.texture_scale, mix(script.seed, o.id));
    }

    std::vector<RgbFrame> frames;
    std::vector<LabelMap> masks;
    for (int f = 0; f < script.frames; ++f) {
        RgbFrame frame(script.width, script.height);
        LabelMap labels(extent);
        for (int r = 0; r < script.height; ++r) {
            for (int c = 0; c < script.width; ++c) shade(frame.at(r, c), script.background, background.at(r + 0.5, c + 0.5));
        }
        for (std::size_t k = 0; k < script.objects.size(); ++k) {
            const ObjectScript& o = script.objects[k];
            const Pose p = pose_at(o, f);
            const auto half = half_extent(o);
            const double hr = half[0] * p.scale;
            const double hc = half[1] * p.scale;
            const int r0 = std::max(0, static_cast<int>(std::floor(p.row - hr)));
            const int r1 = std::min(script.height - 1, static_cast<int>(std::ceil(p.row + hr)));
            const int c0 = std::max(0, static_cast<int>(std::floor(p.col - hc)));
            const int c1 = std::min(script.width - 1, static_cast<int>(std::ceil(p.col + hc)));
            for (int r = r0; r <= r1; ++r) {
                for (int c = c0; c <= c1; ++c) {
                    // object-local coordinates at scale 1, origin at the top-left of the shape
                    const double dy = (r + 0.5 - p.row) / p.scale;
                    const double dx = (c + 0.5 - p.col) / p.scale;
                    const bool inside = o.shape == Shape::disk
                                            ? dy * dy + dx * dx < o.radius * o.radius
                                            : dy >= -half[0] && dy < half[0] && dx >= -half[1] && dx < half[1];
                    if (!inside) continue;
                    shade(frame.at(r, c), o.texture, textures[k].at(dy + half[0], dx + half[1]));
                    labels.set(r, c, o.id);
                }
            }
        }
        frames.push_back(std::move(frame));
        masks.push_back(std::move(labels));
    }

    RenderedScene out;
    out.ground_truth.name = name;
    out.ground_truth.masks = masks;
    out.ground_truth.rebuild_registry();
    out.clean = make_bundle(name, std::move(frames), std::move(masks));
    return out;
}

BinaryMask select_part(const BinaryMask& mask, double fraction, Side side) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw ScriptError("defect fraction must lie strictly between 0 and 1");
    struct Px {
        int key1, key2;
        int r, c;
    };
    std::vector<Px> pixels;
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            if (!mask.get(r, c)) continue;
            switch (side) {
                case Side::left: pixels.push_back({c, r, r, c}); break;
                case Side::right: pixels.push_back({-c, r, r, c}); break;
                case Side::top: pixels.push_back({r, c, r, c}); break;
                case Side::bottom: pixels.push_back({-r, c, r, c}); break;
            }
        }
    }
    if (pixels.size() < 2) throw ScriptError("defect target has fewer than 2 pixels");
    std::sort(pixels.begin(), pixels.end(),
              [](const Px& a, const Px& b) { return a.key1 != b.key1 ? a.key1 < b.key1 : a.key2 < b.key2; });
    const long total = static_cast<long>(pixels.size());
    const long count = std::clamp(std::lround(fraction * static_cast<double>(total)), 1L, total - 1);
    BinaryMask part(mask.extent());
    for (long i = 0; i < count; ++i) part.set(pixels[i].r, pixels[i].c);
    return part;
}

InjectionResult inject_defects(const SequenceBundle& bundle, const std::vector<Defect>& defects, std::uint64_t seed) {
    InjectionResult out{bundle, {}};
    SequenceBundle& b = out.bundle;
    for (std::size_t k = 0; k < defects.size(); ++k) {
        const Defect& d = defects[k];
        const std::string tag = to_string(d.kind) + " on object " + std::to_string(d.id) + " frame " + std::to_string(d.frame);
        if (d.frame >= b.masks.size()) throw ScriptError(tag + ": frame out of range");
        if (d.id == kBackground || !b.object_ids.contains(d.id)) throw ScriptError(tag + ": unknown object");
        const BinaryMask target = extract_object(b.masks[d.frame], d.id);
        if (target.empty()) throw ScriptError(tag + ": object absent in that frame");
        const BinaryMask part = select_part(target, d.fraction, d.side);
        LabelMap& labels = b.masks[d.frame];
        switch (d.kind) {
            case DefectKind::drop_part:
                labels.paint(part, kBackground);
                break;
            case DefectKind::oversplit:
                if (d.new_id == kBackground || b.object_ids.contains(d.new_id)) {
                    throw ScriptError(tag + ": new_id must be a fresh nonzero id");
                }
                labels.paint(part, d.new_id);
                b.object_ids.insert(d.new_id);
                break;
            case DefectKind::occlude: {
                validate_texture(d.occluder, tag);
                if (b.frames.size() != b.masks.size()) throw ScriptError(tag + ": bundle has no frames");
                RgbFrame& frame = b.frames[d.frame];
                const ValueNoise field(frame.height(), frame.width(), d.occluder.texture_scale, mix(seed, 1000 + k));
                for (int r = 0; r < frame.height(); ++r) {
                    for (int c = 0; c < frame.width(); ++c) {
                        if (part.get(r, c)) shade(frame.at(r, c), d.occluder, field.at(r + 0.5, c + 0.5));
                    }
                }
                labels.paint(part, kBackground);
                break;
            }
        }
        out.regions.push_back({d.id, d.frame, part});
    }
    return out;
}

std::string to_string(DefectKind kind) {
    switch (kind) {
        case DefectKind::drop_part: return "drop_part";
        case DefectKind::oversplit: return "oversplit";
        case DefectKind::occlude: return "occlude";
    }
    return "?";
}

std::string to_string(Side side) {
    switch (side) {
        case Side::left: return "left";
        case Side::right: return "right";
        case Side::top: return "top";
        case Side::bottom: return "bottom";
    }
    return "?";
}

namespace {

using nlohmann::json;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

Rgb parse_rgb(const json& j) {
    const auto v = j.get<std::vector<int>>();
    if (v.size() != 3) throw ScriptError("colour must have three components");
    Rgb out{};
    for (int i = 0; i < 3; ++i) {
        if (v[i] < 0 || v[i] > 255) throw ScriptError("colour components must lie in [0, 255]");
        out[i] = static_cast<std::uint8_t>(v[i]);
    }
    return out;
}

std::array<double, 2> parse_pair(const json& j) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 2) throw ScriptError("expected a [row, col] pair");
    return {v[0], v[1]};
}

Texture parse_texture(const json& j, Texture fallback) {
    if (j.contains("color")) fallback.color = parse_rgb(j.at("color"));
    fallback.noise = get_or(j, "noise", fallback.noise);
    fallback.texture_scale = get_or(j, "texture_scale", fallback.texture_scale);
    return fallback;
}

Side parse_side(const std::string& s) {
    if (s == "left") return Side::left;
    if (s == "right") return Side::right;
    if (s == "top") return Side::top;
    if (s == "bottom") return Side::bottom;
    throw ScriptError("unknown side '" + s + "'");
}

DefectKind parse_kind(const std::string& s) {
    if (s == "drop_part") return DefectKind::drop_part;
    if (s == "oversplit") return DefectKind::oversplit;
    if (s == "occlude") return DefectKind::occlude;
    throw ScriptError("unknown defect type '" + s + "'");
}

}  // namespace

SceneDocument parse_scene(std::string_view json_text) {
    SceneDocument doc;
    try {
        const json j = json::parse(json_text);
        SceneScript& s = doc.scene;
        s.width = j.at("width").get<int>();
        s.height = j.at("height").get<int>();
        s.frames = j.at("frames").get<int>();
        s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
        if (j.contains("background")) s.background = parse_texture(j.at("background"), s.background);
        for (const json& jo : j.value("objects", json::array())) {
            ObjectScript o;
            o.id = jo.at("id").get<ObjectId>();
            const std::string shape = get_or<std::string>(jo, "shape", "rect");
            if (shape == "rect" || shape == "rectangle") {
                o.shape = Shape::rectangle;
                if (jo.contains("size")) o.size = parse_pair(jo.at("size"));
            } else if (shape == "disk") {
                o.shape = Shape::disk;
                o.radius = jo.at("radius").get<double>();
            } else {
                throw ScriptError("unknown shape '" + shape + "'");
            }
            o.center = parse_pair(jo.at("center"));
            if (jo.contains("velocity")) o.velocity = parse_pair(jo.at("velocity"));
            o.scale_rate = get_or(jo, "scale_rate", o.scale_rate);
            o.texture = parse_texture(jo, o.texture);
            s.objects.push_back(o);
        }
        for (const json& jd : j.value("defects", json::array())) {
            Defect d;
            d.id = jd.at("id").get<ObjectId>();
            d.frame = jd.at("frame").get<std::size_t>();
            d.kind = parse_kind(jd.at("type").get<std::string>());
            d.fraction = get_or(jd, "fraction", d.fraction);
            d.side = parse_side(get_or<std::string>(jd, "side", "right"));
            d.new_id = get_or<ObjectId>(jd, "new_id", d.new_id);
            if (jd.contains("occluder")) d.occluder = parse_texture(jd.at("occluder"), d.occluder);
            doc.defects.push_back(d);
        }
    } catch (const json::exception& e) {
        throw ScriptError(std::string("scene script: ") + e.what());
    }
    doc.scene.validate();
    return doc;
}

SceneDocument load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScriptError("cannot read scene script " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scene(text.str());
}

}  // namespace vospp
