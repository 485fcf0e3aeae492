#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scrn/geometry.hpp"

namespace scrn {

// Points with integer class labels.  Labels are nonnegative; the number of
// classes is max(label) + 1, so empty label values in between are allowed but
// the per-class accessors will hand back empty sets for them.
struct LabeledDataset {
    PointSet points;
    std::vector<int> labels;

    int size() const { return points.size(); }
    int dim() const { return points.dim(); }
    int num_classes() const;
    PointSet class_points(int k) const;
    PointSet complement_points(int k) const; // everything except class k
    std::vector<PointSet> split_by_class() const;
};

// The 2-D parity instance: class 0 = {(0,0), (1,1)}, class 1 = {(0,1), (1,0)}.
LabeledDataset gen_xor();

// Class 0 on the inner circle, class 1 on the outer circle plus (optionally)
// the center point.  Points start equally spaced and are perturbed by at most
// `jitter` in angle and radius; jitter 0 gives exact polygons regardless of
// the seed.  With the center included, neither class's hull avoids the other
// class, which is the canonical two-layer test case.
LabeledDataset gen_rings(int n_inner, int n_outer, double r_inner, double r_outer,
                         bool include_center, uint64_t seed, double jitter = 0.0);

// m unit-radius blobs in R^n with centers at pairwise distance at least
// `separation`; the result is checked to be pairwise mutually convexly
// separable and regenerated (new derived seed) up to ten times if not.
LabeledDataset gen_polytope_blobs(int m, int n, int points_per_class, double separation,
                                  uint64_t seed);

// CSV with header x1,...,xn,label.  Floats are written in the shortest
// decimal form that parses back to the same bits.
LabeledDataset load_csv(const std::string& path);
void save_csv(const LabeledDataset& data, const std::string& path);

std::string format_double(double v);

} // namespace scrn
