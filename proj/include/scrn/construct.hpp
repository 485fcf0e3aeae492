#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "scrn/geometry.hpp"
#include "scrn/network.hpp"

namespace scrn {

struct ConstructOptions {
    double tol = kDefaultTol;
    // Drop a hidden node when another node already puts its negative point on
    // the positive side by more than tol.  Off by default: one node per
    // negative point keeps the construction transparent.
    bool merge_nodes = false;
};

// One hidden node per negative point: the hyperplane through the midpoint of
// the point and its projection onto the positive hull, normal pointing at the
// point.  Output weights -2/gamma_min drive every negative point to -1 or
// below while the positives sit exactly at +1.  Fails unless every negative
// point is strictly outside the positive hull.
Scrn1Model build_shl_separator(const PointSet& xpos, const PointSet& xneg,
                               const ConstructOptions& options = {});

// One-vs-rest stack of single-class separators: block-diagonal output weights,
// output k is +1 on class k and <= -1 elsewhere.  Requires every class pair
// to be mutually convexly separable.
Scrn1Model build_shl_multiclass(const std::vector<PointSet>& classes,
                                const ConstructOptions& options = {});

// Greedy partition of x into clusters whose hulls keep every point of
// `against` strictly outside.  First-fit in index order (or a seeded shuffle
// for robustness experiments); each singleton seed is valid because the sets
// are disjoint, so the loop always terminates with full coverage.
struct ConvexClusterCover {
    std::vector<std::vector<int>> clusters; // indices into x
    std::vector<SeparabilityVerdict> verdicts;
};

ConvexClusterCover greedy_convex_cover(const PointSet& x, const PointSet& against,
                                       double tol = kDefaultTol,
                                       std::optional<uint64_t> permute_seed = std::nullopt);

// Two hidden layers separate any two disjoint finite sets: cluster the
// negatives with greedy_convex_cover, build one single-hidden-layer unit per
// cluster (cluster as the positive side), and let a second layer with
// nonpositive weights pick the maximum cluster response.
Scrn2Model build_thl_separator(const PointSet& xpos, const PointSet& xneg,
                               const ConstructOptions& options = {});

Scrn2Model build_thl_multiclass(const std::vector<PointSet>& classes,
                                const ConstructOptions& options = {});

} // namespace scrn
