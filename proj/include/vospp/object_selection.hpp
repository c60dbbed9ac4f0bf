#pragma once

#include <vector>

#include "vospp/mask_model.hpp"

namespace vospp {

struct ObjectScore {
    ObjectId id = kBackground;
    /// Frames containing at least one pixel of the object.
    int appearance_count = 0;
    /// Sum over frames of the object's share of the frame area.
    double relative_size = 0.0;
    double combined = 0.0;
};

struct SelectionConfig {
    double alpha = 5.0;
    int top_k = 20;

    void validate() const;
};

double object_size(const SequenceBundle& bundle, ObjectId id);
int appearance_count(const SequenceBundle& bundle, ObjectId id);

/// Scores for every registered id that appears in at least one frame, best
/// first: higher combined score, then more appearances, then smaller id.
std::vector<ObjectScore> score_objects(const SequenceBundle& bundle, const SelectionConfig& cfg);

/// Keeps the top_k objects; every other label becomes background. Ids are not
/// renumbered and frames are untouched.
SequenceBundle select_top(const SequenceBundle& bundle, const SelectionConfig& cfg);

}  // namespace vospp
