#pragma once

#include <vector>

#include "scrn/geometry.hpp"
#include "scrn/network.hpp"

namespace scrn {

// Activation patterns with more occupied sets than this get truncated rather
// than enumerated; reports carry a flag so coverage claims stay honest.
inline constexpr int kMaxActiveSets = 4096;

// f restricted to one activation pattern of a single-hidden-layer separator
// is affine, dominates f everywhere (nonpositive output weights), and hence
// strictly separates the whole positive set from the pattern's negatives.
struct AffineSeparator {
    Eigen::VectorXd w;
    double b = 0.0;

    double value(const Eigen::VectorXd& x) const { return w.dot(x) + b; }
};

struct ShlSubset {
    ActiveSet active_set;
    std::vector<int> members; // indices into xneg
    AffineSeparator separator;
    double min_positive_margin = 0.0; // min over xpos of separator value
    double max_negative_margin = 0.0; // max over members of separator value
    bool verified = false;            // margins strictly on the right sides
};

struct ShlDecomposition {
    std::vector<ShlSubset> subsets;
    bool coverage_ok = false; // every negative point landed in some subset
    bool truncated = false;
};

// Partition the negatives of a verified single-hidden-layer separator by
// their active hidden node sets.  model must have one output and score
// every positive point > 0 and every negative point < 0.
ShlDecomposition shl_decompose(const Scrn1Model& model, const PointSet& xpos,
                               const PointSet& xneg);

// For two hidden layers the same partition over the *second* layer's active
// sets gives, per pattern, a single-hidden-layer function of the input whose
// negation is a sign-constrained separator of the subset; consequently each
// subset's hull avoids the positive set, which is re-checked geometrically.
struct ThlSubset {
    ActiveSet active_set;
    std::vector<int> members;
    // f restricted to the pattern: a_hat' max(0, W1'x + b1) + c_hat, with
    // a_hat entrywise nonnegative.
    Eigen::VectorXd a_hat;
    double c_hat = 0.0;
    double min_positive_margin = 0.0;
    double max_negative_margin = 0.0;
    bool verified = false;
    SeparabilityVerdict hull_clear; // subset hull vs positive points
};

struct ThlDecomposition {
    std::vector<ThlSubset> subsets;
    bool coverage_ok = false;
    bool truncated = false;
};

ThlDecomposition thl_decompose(const Scrn2Model& model, const PointSet& xpos,
                               const PointSet& xneg, double tol = kDefaultTol);

// Two-stage refinement: split the negatives by the two-layer model's patterns,
// then build a fresh one-layer separator per subset (subset as the positive
// side) and split the original positives by its patterns.  Leaves pair a
// negative subset with a positive subset under a plain affine separator.
struct DrillLeaf {
    ActiveSet active_set;          // pattern of the per-subset separator
    std::vector<int> pos_members;  // indices into xpos
    AffineSeparator separator;     // > 0 on the negative subset side
    bool verified = false;
};

struct DrillBranch {
    ActiveSet active_set;         // second-layer pattern from stage one
    std::vector<int> neg_members; // indices into xneg
    std::vector<DrillLeaf> leaves;
};

struct DrillDownReport {
    std::vector<DrillBranch> branches;
    bool coverage_ok = false;
};

DrillDownReport full_drill_down(const Scrn2Model& model, const PointSet& xpos,
                                const PointSet& xneg, double tol = kDefaultTol);

} // namespace scrn
