#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "scrn/errors.hpp"

namespace scrn {

// Distances below this are treated as "touching": a point this close to a
// hull counts as a member, so separability checks err on the side of "no".
inline constexpr double kDefaultTol = 1e-7;

// A finite point set in R^n.  All points must share the same dimension; the
// hull operations below never enumerate facets, they only project onto the
// implicit convex hull.
struct PointSet {
    std::vector<Eigen::VectorXd> points;

    PointSet() = default;
    explicit PointSet(std::vector<Eigen::VectorXd> pts);

    int size() const { return static_cast<int>(points.size()); }
    bool empty() const { return points.empty(); }
    int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
    const Eigen::VectorXd& operator[](int i) const { return points[static_cast<size_t>(i)]; }

    void add(const Eigen::VectorXd& p);
    // Points as columns of an n x N matrix.
    Eigen::MatrixXd as_matrix() const;
};

// Projection of a query point onto a convex hull: the attained distance, the
// nearest hull point, and the convex coefficients that realize it (indexed
// against the deduplicated vertex list actually used).
struct HullProjection {
    double distance = 0.0;
    Eigen::VectorXd nearest;
    Eigen::VectorXd coefficients;
};

HullProjection hull_distance(const Eigen::VectorXd& q, const PointSet& s);

// Closest pair of points between two hulls, found on the Minkowski
// difference.  distance == 0 means the hulls intersect.
struct HullsDistance {
    double distance = 0.0;
    Eigen::VectorXd nearest_a;
    Eigen::VectorXd nearest_b;
};

HullsDistance hulls_distance(const PointSet& a, const PointSet& b);

struct SeparabilityVerdict {
    bool separable = false;
    double distance = 0.0;
    double tolerance_used = kDefaultTol;
    // Present only for linear separability: w'x + b > 0 on A, < 0 on B.
    std::optional<Eigen::VectorXd> witness_w;
    std::optional<double> witness_b;
};

// CH(A) and CH(B) disjoint (single hyperplane exists).
SeparabilityVerdict is_linearly_separable(const PointSet& a, const PointSet& b,
                                          double tol = kDefaultTol);

// No point of from_b lies in CH(a); distance reported is the closest such
// point's hull distance.  Note the asymmetry: "a is convexly separable from b".
SeparabilityVerdict is_convexly_separable(const PointSet& a, const PointSet& from_b,
                                          double tol = kDefaultTol);

struct MutualVerdict {
    bool separable = false;
    SeparabilityVerdict a_from_b;
    SeparabilityVerdict b_from_a;
};

MutualVerdict is_mutually_convexly_separable(const PointSet& a, const PointSet& b,
                                             double tol = kDefaultTol);

enum class PairwiseMode { linear, mutual_convex };

// Symmetric matrix of verdicts over all unordered class pairs.  Diagonal
// entries are vacuously separable with infinite distance.
std::vector<std::vector<SeparabilityVerdict>>
pairwise_verdicts(const std::vector<PointSet>& classes, PairwiseMode mode,
                  double tol = kDefaultTol);

} // namespace scrn
