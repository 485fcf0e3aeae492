#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "scrn/errors.hpp"

namespace scrn {

enum class SignConstraint { none, nonpositive };

// One rectified layer: z = max(0, W'x + b).  W is n_in x n_out, so hidden
// unit k is column k.  The constraint, when set, applies to every W entry.
struct ReluLayer {
    Eigen::MatrixXd W;
    Eigen::VectorXd b;
    SignConstraint constraint = SignConstraint::none;

    int in_dim() const { return static_cast<int>(W.rows()); }
    int out_dim() const { return static_cast<int>(W.cols()); }
};

// y = A' max(0, W'x + b) + c with A entrywise nonpositive, which makes every
// output coordinate a concave function of x.
struct Scrn1Model {
    ReluLayer hidden;
    Eigen::MatrixXd A; // hidden x outputs, nonpositive
    Eigen::VectorXd c;

    int input_dim() const { return hidden.in_dim(); }
    int hidden_dim() const { return hidden.out_dim(); }
    int output_dim() const { return static_cast<int>(A.cols()); }
};

// Two rectified layers; the second layer's weights and A are nonpositive, so
// outputs are concave in the first hidden activation.
struct Scrn2Model {
    ReluLayer layer1;
    ReluLayer layer2; // constraint nonpositive
    Eigen::MatrixXd A; // hidden2 x outputs, nonpositive
    Eigen::VectorXd c;

    int input_dim() const { return layer1.in_dim(); }
    int hidden1_dim() const { return layer1.out_dim(); }
    int hidden2_dim() const { return layer2.out_dim(); }
    int output_dim() const { return static_cast<int>(A.cols()); }
};

// Single-output one-hidden-layer form with the output weights fixed at -1:
// f(x) = b0 - sum_k max(0, w_k'x + b_k).  Any nonpositive output weighting
// can be folded into W and b, so this loses no generality and leaves the
// trainable parameters as (b0, W, b) only.
struct CanonicalShl {
    double b0 = 0.0;
    Eigen::MatrixXd W;
    Eigen::VectorXd b;

    int input_dim() const { return static_cast<int>(W.rows()); }
    int hidden_dim() const { return static_cast<int>(W.cols()); }
};

Eigen::VectorXd relu(const Eigen::VectorXd& z);

Eigen::VectorXd forward_scrn1(const Scrn1Model& m, const Eigen::VectorXd& x);
Eigen::VectorXd forward_scrn2(const Scrn2Model& m, const Eigen::VectorXd& x);
double forward_canonical_shl(const CanonicalShl& m, const Eigen::VectorXd& x);

// Structure checks (dims coherent, constrained entries nonpositive).
void validate(const Scrn1Model& m);
void validate(const Scrn2Model& m);
void validate(const CanonicalShl& m);

struct SignViolation {
    std::string where; // "A", "W2", ...
    int row = 0;
    int col = 0;
    double value = 0.0;
};

std::vector<SignViolation> check_sign_constraints(const Scrn1Model& m);
std::vector<SignViolation> check_sign_constraints(const Scrn2Model& m);

// Hidden units strictly active at x; a pre-activation of exactly zero counts
// as inactive, matching the subgradient convention used in training.
using ActiveSet = std::vector<int>;
ActiveSet active_set(const Eigen::MatrixXd& W, const Eigen::VectorXd& b, const Eigen::VectorXd& x);

// Worst violation of concavity along the segment [x0, x1], sampled at
// `samples` interior points: max over lambda of the chord value minus the
// function value.  Nonpositive (up to roundoff) certifies concavity on the
// probed segment; convex functions report positive violations.
double concavity_probe(const std::function<double(const Eigen::VectorXd&)>& f,
                       const Eigen::VectorXd& x0, const Eigen::VectorXd& x1, int samples);

// Structural conversions (exact, no approximation).
Scrn1Model to_scrn1(const CanonicalShl& m);
// Requires a single output; folds |A| into the hidden layer.
CanonicalShl to_canonical(const Scrn1Model& m);

using Model = std::variant<Scrn1Model, Scrn2Model, CanonicalShl>;

// JSON documents: {"schema": 1, "kind": ..., "dims": ..., row-major weight
// arrays, "sign_constraints": ...}.  Floats survive a round trip bit-exactly.
nlohmann::ordered_json serialize(const Model& m);
Model deserialize(const nlohmann::json& doc);

Model load_model(const std::string& path);
void save_model(const Model& m, const std::string& path);

int model_input_dim(const Model& m);
int model_output_dim(const Model& m);
double model_output(const Model& m, const Eigen::VectorXd& x, int output);
Eigen::VectorXd model_outputs(const Model& m, const Eigen::VectorXd& x);

} // namespace scrn
