#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vospp/error.hpp"
#include "vospp/mask_model.hpp"

namespace vospp {

/// Malformed scene script or defect list.
class ScriptError : public ContractError {
public:
    using ContractError::ContractError;
};

using Rgb = std::array<std::uint8_t, 3>;

enum class Shape { rectangle, disk };

/// Texture: base colour plus `noise` times a smooth value-noise field in
/// [-1, 1], added equally to all channels. Lattice spacing is `texture_scale`.
struct Texture {
    Rgb color{128, 128, 128};
    int noise = 25;
    double texture_scale = 4.0;
};

/// Pose at frame f: center + f * velocity, scale = scale_rate^f.
/// Rectangles use `size` (height, width); disks use `radius`.
struct ObjectScript {
    ObjectId id = 1;
    Shape shape = Shape::rectangle;
    std::array<double, 2> center{0.0, 0.0};  // (row, col)
    std::array<double, 2> size{8.0, 8.0};    // (height, width)
    double radius = 4.0;
    std::array<double, 2> velocity{0.0, 0.0};
    double scale_rate = 1.0;
    Texture texture{{200, 60, 60}, 25, 4.0};
};

struct SceneScript {
    int width = 64;
    int height = 64;
    int frames = 5;
    std::uint64_t seed = 1;
    Texture background{{90, 110, 90}, 40, 4.0};
    /// Painted in order; later objects cover earlier ones.
    std::vector<ObjectScript> objects;

    void validate() const;
};

struct RenderedScene {
    /// Frames with the exact label maps.
    SequenceBundle clean;
    /// Same label maps, no frames.
    SequenceBundle ground_truth;
};

/// Throws ScriptError when an object leaves the canvas at any frame.
RenderedScene render(const SceneScript& script, const std::string& name = "synthetic");

enum class DefectKind { drop_part, oversplit, occlude };
enum class Side { left, right, top, bottom };

/// The affected part is the `fraction` of the object's pixels lying furthest
/// toward `side`.
struct Defect {
    ObjectId id = 1;
    std::size_t frame = 0;
    DefectKind kind = DefectKind::drop_part;
    double fraction = 0.5;
    Side side = Side::right;
    ObjectId new_id = 0;                       // oversplit only
    Texture occluder{{30, 200, 220}, 20, 3.0};  // occlude only
};

struct AffectedRegion {
    ObjectId id;
    std::size_t frame;
    BinaryMask mask;
};

struct InjectionResult {
    SequenceBundle bundle;
    /// Pixels removed from each target (relabelled ones for oversplit).
    std::vector<AffectedRegion> regions;
};

InjectionResult inject_defects(const SequenceBundle& bundle, const std::vector<Defect>& defects, std::uint64_t seed = 1);

/// The `fraction` of the mask's pixels furthest toward `side`.
BinaryMask select_part(const BinaryMask& mask, double fraction, Side side);

/// JSON scene file: see README for the schema. `defects` may be absent.
struct SceneDocument {
    SceneScript scene;
    std::vector<Defect> defects;
};

SceneDocument parse_scene(std::string_view json_text);
SceneDocument load_scene(const std::filesystem::path& path);

std::string to_string(DefectKind kind);
std::string to_string(Side side);

}  // namespace vospp
