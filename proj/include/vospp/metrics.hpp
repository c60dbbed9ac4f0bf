#pragma once

#include <vector>

#include "vospp/mask_model.hpp"

namespace vospp {

/// |pred ∩ gt| / |pred ∪ gt|; two empty masks score 1.
double jaccard(const BinaryMask& pred, const BinaryMask& gt);

/// DAVIS boundary tolerance for a raster: ceil(0.008 * diagonal).
int default_boundary_tolerance(const Extent& extent);

/// Foreground pixels with a 4-neighbour in the background or on the raster edge.
BinaryMask contour(const BinaryMask& mask);

/// Contour F-measure with Chebyshev matching tolerance `tol`.
double boundary_f(const BinaryMask& pred, const BinaryMask& gt, int tol);

struct ObjectMetrics {
    ObjectId id = kBackground;          // ground-truth id
    ObjectId matched = kBackground;     // predicted id scored against it, 0 if none
    double j_mean = 0.0;
    double f_mean = 0.0;
    double jf = 0.0;
};

struct SequenceMetrics {
    std::vector<ObjectMetrics> objects;
    double j_mean = 0.0;
    double f_mean = 0.0;
    double jf = 0.0;
};

enum class Matching { identity, hungarian };

struct EvaluationOptions {
    Matching matching = Matching::identity;
    /// Negative selects default_boundary_tolerance.
    int boundary_tol = -1;
};

/// Per ground-truth object means of J and F over all frames.
SequenceMetrics evaluate_sequence(const SequenceBundle& pred, const SequenceBundle& gt, const EvaluationOptions& options = {});

/// Mean over every object of every sequence.
SequenceMetrics aggregate(const std::vector<SequenceMetrics>& sequences);

/// Maximum-weight assignment of rows to columns (rectangular allowed).
/// Returns, per row, the assigned column or -1.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights);

}  // namespace vospp
