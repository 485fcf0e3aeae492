#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "scrn/geometry.hpp"

namespace scrn {

// Independent oracle: enumerate convex coefficients on a simplex grid and
// take the best distance.  Deliberately brute force (no reuse of the
// projection code) so the two can check each other; limited to small hulls.
double bruteforce_hull_distance(const Eigen::VectorXd& q, const PointSet& s, int resolution = 200);

struct BinaryInstance {
    PointSet xpos;
    PointSet xneg;
};

// Every negative point sits at least margin outside the positive hull
// (verified against the projection oracle before returning).
BinaryInstance random_convexly_separable_instance(std::mt19937_64& rng, int dim,
                                                  int max_per_class, double margin = 1e-3);

// Like the above, but one extra negative point is an explicit convex
// combination of the positives, so any construction must refuse.
BinaryInstance random_interior_negative_instance(std::mt19937_64& rng, int dim,
                                                 int max_per_class);

// Disjoint point sets (pairwise distance bounded below) that fail mutual
// convex separability, the regime where only two hidden layers suffice.
BinaryInstance random_entangled_instance(std::mt19937_64& rng, int dim, int per_class);

struct PropertyResult {
    std::string name;
    bool pass = false;
    double worst = 0.0; // property-specific worst-case gap, 0 when vacuous
    std::string detail;
};

struct GeometrySuiteOptions {
    uint64_t seed = 0;
    int bruteforce_instances = 100;
    int random_instances = 100;
    // Corrupts a constructed model before checking it; the suite must then
    // fail, which is how the harness proves these checks have teeth.
    bool inject_fault = false;
};

struct SurrogateSuiteOptions {
    uint64_t seed = 0;
    int anchors = 100;
    int probes = 100;
    int sandwich_trials = 1000;
    int concavity_segments = 1000;
};

struct DescentSuiteOptions {
    uint64_t seed = 0;
};

std::vector<PropertyResult> geometry_suite(const GeometrySuiteOptions& options);
std::vector<PropertyResult> surrogate_suite(const SurrogateSuiteOptions& options);
std::vector<PropertyResult> descent_suite(const DescentSuiteOptions& options);

} // namespace scrn
