#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "scrn/geometry.hpp"
#include "scrn/mm.hpp"
#include "scrn/network.hpp"

namespace scrn {

// Two-hidden-layer counterpart of CanonicalShl, with the output weights fixed
// at -1: f(x) = b0 - sum max(0, W2' max(0, W1'x + b1) + b2), W2 nonpositive.
struct CanonicalThl {
    double b0 = 0.0;
    Eigen::MatrixXd W1;
    Eigen::VectorXd b1;
    Eigen::MatrixXd W2; // nonpositive
    Eigen::VectorXd b2;

    int input_dim() const { return static_cast<int>(W1.rows()); }
    int hidden1_dim() const { return static_cast<int>(W1.cols()); }
    int hidden2_dim() const { return static_cast<int>(W2.cols()); }
};

void validate(const CanonicalThl& m);
double forward_canonical_thl(const CanonicalThl& m, const Eigen::VectorXd& x);
Scrn2Model to_scrn2(const CanonicalThl& m);
// Folds a single-output constructed two-layer separator into the canonical
// trainable form (exact: output magnitudes move inside the second rectifier).
CanonicalThl to_canonical_thl(const Scrn2Model& m);

enum class Arch { shl, thl };
enum class InitKind { random, constructive, warm };

struct TrainConfig {
    Arch arch = Arch::shl;
    int hidden = 8;   // single-hidden-layer width
    int hidden1 = 8;  // two-layer widths
    int hidden2 = 4;
    double lambda = 1e-6; // weight penalty; biases and b0 are never penalized
    InitKind init = InitKind::random;
    uint64_t seed = 0;
    double ftol = 1e-8;
    int max_outer = 100;
    int inner_budget = 2000;
    std::optional<CanonicalShl> warm_shl;
    std::optional<CanonicalThl> warm_thl;
};

// Hinge losses at margin 1: positives should score >= 1, negatives <= -1.
// accuracy counts a zero score as a negative prediction.
struct LossReport {
    double j_pos = 0.0;
    double j_neg = 0.0;
    double reg = 0.0;
    double total = 0.0;
    double accuracy = 0.0;
    std::vector<double> margins; // label-signed scores, positives then negatives
};

LossReport hinge_objective(const CanonicalShl& m, const PointSet& xpos, const PointSet& xneg,
                           double lambda);
LossReport hinge_objective(const CanonicalThl& m, const PointSet& xpos, const PointSet& xneg,
                           double lambda);

// Flat parameter layout [b0; W column-major; b] used by the optimizers.
int shl_param_count(int n, int l);
Eigen::VectorXd pack_shl(const CanonicalShl& m);
CanonicalShl unpack_shl(const Eigen::VectorXd& theta, int n, int l);

// Full training objective over packed parameters, and its convex upper bound
// anchored at a previous iterate.  The bound keeps the positive hinge exactly
// (it is already convex) and freezes each negative point's active node set,
// which linearizes the score from above.
ObjectiveFn shl_objective(const PointSet& xpos, const PointSet& xneg, double lambda, int n, int l);
SurrogateOracle shl_surrogate(const PointSet& xpos, const PointSet& xneg, double lambda, int n,
                              int l);

std::pair<CanonicalShl, MmTrace> train_shl(const PointSet& xpos, const PointSet& xneg,
                                           const TrainConfig& config);

// Concave lower and convex upper bounds on the two-layer score as a function
// of the first layer's parameters, given binary activation patterns a1/a2.
// Both collapse to the true score when the patterns match the point's actual
// activations, which is what makes them usable as MM anchors.
struct ThlBounds {
    double lower = 0.0; // concave in (W1, b1)
    double upper = 0.0; // convex in (W1, b1)
};

ThlBounds thl_bounds(const CanonicalThl& m, const Eigen::VectorXd& x, const ActiveSet& a1,
                     const ActiveSet& a2);

// Per-layer problems for the alternating trainer, over packed sub-vectors:
// second layer uses [b0; W2; b2] with the W2 block clamped nonpositive,
// first layer uses [W1; b1].  `fixed` supplies the complementary layer.
ObjectiveFn thl_second_layer_objective(const PointSet& xpos, const PointSet& xneg,
                                       const CanonicalThl& fixed, double lambda);
SurrogateOracle thl_second_layer_surrogate(const PointSet& xpos, const PointSet& xneg,
                                           const CanonicalThl& fixed, double lambda);
ProjectionFn nonpositive_w2_projection(int l1, int l2);

ObjectiveFn thl_first_layer_objective(const PointSet& xpos, const PointSet& xneg,
                                      const CanonicalThl& fixed, double lambda);
SurrogateOracle thl_first_layer_surrogate(const PointSet& xpos, const PointSet& xneg,
                                          const CanonicalThl& fixed, double lambda);

std::pair<CanonicalThl, MmTrace> train_thl(const PointSet& xpos, const PointSet& xneg,
                                           const TrainConfig& config);

// One-vs-rest reduction; prediction is the argmax score, ties to the lowest
// class index.
struct MulticlassModel {
    Arch arch = Arch::shl;
    std::vector<CanonicalShl> shl_models;
    std::vector<CanonicalThl> thl_models;
    std::vector<MmTrace> traces;

    int num_classes() const;
    double score(int k, const Eigen::VectorXd& x) const;
    int predict(const Eigen::VectorXd& x) const;
};

MulticlassModel multiclass_train(const std::vector<PointSet>& classes, const TrainConfig& config);

} // namespace scrn
