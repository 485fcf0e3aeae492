#include "scrn/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "scrn/construct.hpp"

namespace scrn {

namespace {

constexpr double kDescentSlack = 1e-9;

void check_training_sets(const PointSet& xpos, const PointSet& xneg) {
    if (xpos.empty() || xneg.empty())
        fail(ErrorCode::empty_class, "training needs points on both sides");
    if (xpos.dim() != xneg.dim())
        fail(ErrorCode::dimension_mismatch, "training sets disagree on input dimension");
}

void check_config_common(const TrainConfig& config) {
    if (config.lambda < 0.0)
        fail(ErrorCode::config_error, "weight penalty must be nonnegative");
    if (config.max_outer < 1 || config.inner_budget < 1)
        fail(ErrorCode::config_error, "iteration budgets must be positive");
}

double hinge(double t) { return t > 0.0 ? t : 0.0; }

// Shared core for every single-hidden-layer-shaped convex subproblem: the
// plain trainer works on raw inputs, the two-layer trainer's second-layer
// step on frozen first-layer features.  const_reg carries the penalty of
// whatever parameters are held fixed so values stay comparable to the full
// objective.
struct ShlCore {
    Eigen::MatrixXd fpos; // d x Npos, feature columns
    Eigen::MatrixXd fneg;
    double lambda = 0.0;
    double const_reg = 0.0;
    int d = 0;
    int l = 0;

    double value(const Eigen::VectorXd& theta) const {
        const CanonicalShl m = unpack_shl(theta, d, l);
        double total = const_reg + lambda * m.W.squaredNorm();
        for (int i = 0; i < fpos.cols(); ++i)
            total += hinge(1.0 - (m.b0 - relu(m.W.transpose() * fpos.col(i) + m.b).sum()));
        for (int j = 0; j < fneg.cols(); ++j)
            total += hinge(1.0 + (m.b0 - relu(m.W.transpose() * fneg.col(j) + m.b).sum()));
        return total;
    }

    // Convex upper bound anchored at theta0: negative scores drop the
    // rectifier on the anchor's strictly active nodes, which can only raise
    // the score, and agree with it exactly at the anchor.
    ConvexProblem surrogate(const Eigen::VectorXd& theta0) const {
        const CanonicalShl anchor = unpack_shl(theta0, d, l);
        std::vector<ActiveSet> frozen(static_cast<size_t>(fneg.cols()));
        for (int j = 0; j < fneg.cols(); ++j)
            frozen[static_cast<size_t>(j)] = active_set(anchor.W, anchor.b, fneg.col(j));

        const ShlCore* core = this;
        ConvexProblem p;
        p.value = [core, frozen](const Eigen::VectorXd& theta) {
            const CanonicalShl m = unpack_shl(theta, core->d, core->l);
            double total = core->const_reg + core->lambda * m.W.squaredNorm();
            for (int i = 0; i < core->fpos.cols(); ++i)
                total += hinge(1.0 -
                               (m.b0 - relu(m.W.transpose() * core->fpos.col(i) + m.b).sum()));
            for (int j = 0; j < core->fneg.cols(); ++j) {
                double linear = m.b0;
                for (int k : frozen[static_cast<size_t>(j)])
                    linear -= m.W.col(k).dot(core->fneg.col(j)) + m.b[k];
                total += hinge(1.0 + linear);
            }
            return total;
        };
        p.subgradient = [core, frozen](const Eigen::VectorXd& theta) {
            const CanonicalShl m = unpack_shl(theta, core->d, core->l);
            double gb0 = 0.0;
            Eigen::MatrixXd gW = 2.0 * core->lambda * m.W;
            Eigen::VectorXd gb = Eigen::VectorXd::Zero(core->l);

            for (int i = 0; i < core->fpos.cols(); ++i) {
                const Eigen::VectorXd pre = m.W.transpose() * core->fpos.col(i) + m.b;
                const double f = m.b0 - relu(pre).sum();
                if (1.0 - f > 0.0) {
                    gb0 -= 1.0;
                    for (int k = 0; k < core->l; ++k)
                        if (pre[k] > 0.0) {
                            gW.col(k) += core->fpos.col(i);
                            gb[k] += 1.0;
                        }
                }
            }
            for (int j = 0; j < core->fneg.cols(); ++j) {
                double linear = m.b0;
                for (int k : frozen[static_cast<size_t>(j)])
                    linear -= m.W.col(k).dot(core->fneg.col(j)) + m.b[k];
                if (1.0 + linear > 0.0) {
                    gb0 += 1.0;
                    for (int k : frozen[static_cast<size_t>(j)]) {
                        gW.col(k) -= core->fneg.col(j);
                        gb[k] -= 1.0;
                    }
                }
            }

            Eigen::VectorXd g(theta.size());
            g[0] = gb0;
            g.segment(1, core->d * core->l) =
                Eigen::Map<const Eigen::VectorXd>(gW.data(), core->d * core->l);
            g.tail(core->l) = gb;
            return g;
        };
        return p;
    }
};

ShlCore make_core(const Eigen::MatrixXd& fpos, const Eigen::MatrixXd& fneg, double lambda,
                  double const_reg, int l) {
    ShlCore core;
    core.fpos = fpos;
    core.fneg = fneg;
    core.lambda = lambda;
    core.const_reg = const_reg;
    core.d = static_cast<int>(fpos.rows());
    core.l = l;
    return core;
}

Eigen::MatrixXd features_through(const CanonicalThl& m, const PointSet& pts) {
    Eigen::MatrixXd out(m.hidden1_dim(), pts.size());
    for (int i = 0; i < pts.size(); ++i)
        out.col(i) = relu(m.W1.transpose() * pts[i] + m.b1);
    return out;
}

LossReport finish_report(std::vector<double> pos_scores, std::vector<double> neg_scores,
                         double reg) {
    LossReport r;
    r.reg = reg;
    int correct = 0;
    for (double f : pos_scores) {
        r.j_pos += hinge(1.0 - f);
        if (f > 0.0)
            ++correct;
        r.margins.push_back(f);
    }
    for (double f : neg_scores) {
        r.j_neg += hinge(1.0 + f);
        if (!(f > 0.0))
            ++correct;
        r.margins.push_back(-f);
    }
    r.total = r.j_pos + r.j_neg + r.reg;
    const size_t count = pos_scores.size() + neg_scores.size();
    r.accuracy = count == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(count);
    return r;
}

// Warm the engine up: mt19937 streams from small consecutive integer seeds
// start out correlated, and the first few draws land in a poor basin for the
// pinned subgradient budget.
std::mt19937_64 seeded_rng(uint64_t seed) {
    std::mt19937_64 rng(seed);
    rng.discard(8);
    return rng;
}

Eigen::MatrixXd random_weights(int rows, int cols, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
    Eigen::MatrixXd w(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i)
            w(i, j) = unit(rng) * scale;
    return w;
}

} // namespace

void validate(const CanonicalThl& m) {
    if (m.b1.size() != m.W1.cols() || m.W2.rows() != m.W1.cols() || m.b2.size() != m.W2.cols())
        fail(ErrorCode::dimension_mismatch, "two-layer parameter shapes are inconsistent");
    for (int i = 0; i < m.W2.rows(); ++i)
        for (int j = 0; j < m.W2.cols(); ++j)
            if (m.W2(i, j) > 0.0)
                fail(ErrorCode::sign_constraint_violated,
                     "W2(" + std::to_string(i) + "," + std::to_string(j) + ") = " +
                         std::to_string(m.W2(i, j)) + " must be nonpositive");
}

double forward_canonical_thl(const CanonicalThl& m, const Eigen::VectorXd& x) {
    if (x.size() != m.W1.rows())
        fail(ErrorCode::dimension_mismatch, "input dimension does not match the model");
    const Eigen::VectorXd z1 = relu(m.W1.transpose() * x + m.b1);
    return m.b0 - relu(m.W2.transpose() * z1 + m.b2).sum();
}

Scrn2Model to_scrn2(const CanonicalThl& m) {
    validate(m);
    Scrn2Model out;
    out.layer1.W = m.W1;
    out.layer1.b = m.b1;
    out.layer2.W = m.W2;
    out.layer2.b = m.b2;
    out.layer2.constraint = SignConstraint::nonpositive;
    out.A = Eigen::MatrixXd::Constant(m.hidden2_dim(), 1, -1.0);
    out.c = Eigen::VectorXd::Constant(1, m.b0);
    return out;
}

CanonicalThl to_canonical_thl(const Scrn2Model& m) {
    validate(m);
    if (m.output_dim() != 1)
        fail(ErrorCode::dimension_mismatch,
             "only single-output models fold into the canonical form");
    CanonicalThl out;
    out.b0 = m.c[0];
    out.W1 = m.layer1.W;
    out.b1 = m.layer1.b;
    out.W2 = m.layer2.W;
    out.b2 = m.layer2.b;
    for (int j = 0; j < out.W2.cols(); ++j) {
        const double scale = -m.A(j, 0);
        out.W2.col(j) *= scale;
        out.b2[j] *= scale;
    }
    validate(out);
    return out;
}

LossReport hinge_objective(const CanonicalShl& m, const PointSet& xpos, const PointSet& xneg,
                           double lambda) {
    check_training_sets(xpos, xneg);
    std::vector<double> pos, neg;
    for (const auto& x : xpos.points)
        pos.push_back(forward_canonical_shl(m, x));
    for (const auto& x : xneg.points)
        neg.push_back(forward_canonical_shl(m, x));
    return finish_report(std::move(pos), std::move(neg), lambda * m.W.squaredNorm());
}

LossReport hinge_objective(const CanonicalThl& m, const PointSet& xpos, const PointSet& xneg,
                           double lambda) {
    check_training_sets(xpos, xneg);
    std::vector<double> pos, neg;
    for (const auto& x : xpos.points)
        pos.push_back(forward_canonical_thl(m, x));
    for (const auto& x : xneg.points)
        neg.push_back(forward_canonical_thl(m, x));
    return finish_report(std::move(pos), std::move(neg),
                         lambda * (m.W1.squaredNorm() + m.W2.squaredNorm()));
}

int shl_param_count(int n, int l) { return 1 + n * l + l; }

Eigen::VectorXd pack_shl(const CanonicalShl& m) {
    const int n = m.input_dim();
    const int l = m.hidden_dim();
    Eigen::VectorXd theta(shl_param_count(n, l));
    theta[0] = m.b0;
    theta.segment(1, n * l) = Eigen::Map<const Eigen::VectorXd>(m.W.data(), n * l);
    theta.tail(l) = m.b;
    return theta;
}

CanonicalShl unpack_shl(const Eigen::VectorXd& theta, int n, int l) {
    if (theta.size() != shl_param_count(n, l))
        fail(ErrorCode::dimension_mismatch, "parameter vector has the wrong length");
    CanonicalShl m;
    m.b0 = theta[0];
    m.W = Eigen::Map<const Eigen::MatrixXd>(theta.data() + 1, n, l);
    m.b = theta.tail(l);
    return m;
}

ObjectiveFn shl_objective(const PointSet& xpos, const PointSet& xneg, double lambda, int n,
                          int l) {
    check_training_sets(xpos, xneg);
    const auto core =
        std::make_shared<ShlCore>(make_core(xpos.as_matrix(), xneg.as_matrix(), lambda, 0.0, l));
    (void)n;
    return [core](const Eigen::VectorXd& theta) { return core->value(theta); };
}

SurrogateOracle shl_surrogate(const PointSet& xpos, const PointSet& xneg, double lambda, int n,
                              int l) {
    check_training_sets(xpos, xneg);
    const auto core =
        std::make_shared<ShlCore>(make_core(xpos.as_matrix(), xneg.as_matrix(), lambda, 0.0, l));
    (void)n;
    return [core](const Eigen::VectorXd& anchor) { return core->surrogate(anchor); };
}

std::pair<CanonicalShl, MmTrace> train_shl(const PointSet& xpos, const PointSet& xneg,
                                           const TrainConfig& config) {
    check_training_sets(xpos, xneg);
    check_config_common(config);
    const int n = xpos.dim();

    CanonicalShl start;
    switch (config.init) {
    case InitKind::random: {
        if (config.hidden < 1)
            fail(ErrorCode::config_error, "hidden width must be at least 1");
        std::mt19937_64 rng = seeded_rng(config.seed);
        start.b0 = 0.0;
        start.W = random_weights(n, config.hidden, rng);
        start.b = Eigen::VectorXd::Zero(config.hidden);
        break;
    }
    case InitKind::constructive:
        start = to_canonical(build_shl_separator(xpos, xneg));
        break;
    case InitKind::warm:
        if (!config.warm_shl)
            fail(ErrorCode::config_error, "warm init requires a starting model");
        start = *config.warm_shl;
        if (start.input_dim() != n)
            fail(ErrorCode::dimension_mismatch, "warm model input dimension mismatch");
        break;
    }
    const int l = start.hidden_dim();

    MmConfig mm;
    mm.ftol = config.ftol;
    mm.max_outer = config.max_outer;
    mm.inner_budget = config.inner_budget;
    const MmResult res = mm_minimize(shl_objective(xpos, xneg, config.lambda, n, l),
                                     shl_surrogate(xpos, xneg, config.lambda, n, l),
                                     pack_shl(start), mm);
    return {unpack_shl(res.x, n, l), res.trace};
}

ThlBounds thl_bounds(const CanonicalThl& m, const Eigen::VectorXd& x, const ActiveSet& a1,
                     const ActiveSet& a2) {
    validate(m);
    if (x.size() != m.W1.rows())
        fail(ErrorCode::dimension_mismatch, "input dimension does not match the model");
    for (int i : a1)
        if (i < 0 || i >= m.hidden1_dim())
            fail(ErrorCode::dimension_mismatch, "first-layer pattern index out of range");
    for (int j : a2)
        if (j < 0 || j >= m.hidden2_dim())
            fail(ErrorCode::dimension_mismatch, "second-layer pattern index out of range");

    const Eigen::VectorXd z1 = m.W1.transpose() * x + m.b1;

    // Lower bound: replace the first rectifier by the a1-masked identity.
    // Each masked entry is <= max(0, z1_i); W2 <= 0 flips the inequality, and
    // the outer -sum(relu) flips it back.
    Eigen::VectorXd masked = Eigen::VectorXd::Zero(m.hidden1_dim());
    for (int i : a1)
        masked[i] = z1[i];
    ThlBounds out;
    out.lower = m.b0 - relu(m.W2.transpose() * masked + m.b2).sum();

    // Upper bound: drop the second rectifier on the a2 nodes only; every
    // kept term is <= its rectified value, and the sum is subtracted.
    const Eigen::VectorXd z2 = m.W2.transpose() * relu(z1) + m.b2;
    double picked = 0.0;
    for (int j : a2)
        picked += z2[j];
    out.upper = m.b0 - picked;
    return out;
}

ObjectiveFn thl_second_layer_objective(const PointSet& xpos, const PointSet& xneg,
                                       const CanonicalThl& fixed, double lambda) {
    check_training_sets(xpos, xneg);
    const auto core = std::make_shared<ShlCore>(
        make_core(features_through(fixed, xpos), features_through(fixed, xneg), lambda,
                  lambda * fixed.W1.squaredNorm(), fixed.hidden2_dim()));
    return [core](const Eigen::VectorXd& theta) { return core->value(theta); };
}

SurrogateOracle thl_second_layer_surrogate(const PointSet& xpos, const PointSet& xneg,
                                           const CanonicalThl& fixed, double lambda) {
    check_training_sets(xpos, xneg);
    const auto core = std::make_shared<ShlCore>(
        make_core(features_through(fixed, xpos), features_through(fixed, xneg), lambda,
                  lambda * fixed.W1.squaredNorm(), fixed.hidden2_dim()));
    return [core](const Eigen::VectorXd& anchor) { return core->surrogate(anchor); };
}

ProjectionFn nonpositive_w2_projection(int l1, int l2) {
    return [l1, l2](const Eigen::VectorXd& theta) {
        Eigen::VectorXd out = theta;
        out.segment(1, l1 * l2) = out.segment(1, l1 * l2).cwiseMin(0.0);
        return out;
    };
}

namespace {

// First-layer subproblem internals, over theta = [vec(W1); b1] with the rest
// of the network fixed.
struct FirstLayerCore {
    Eigen::MatrixXd xpos, xneg; // raw inputs as columns
    double b0;
    Eigen::MatrixXd W2;
    Eigen::VectorXd b2;
    double lambda;
    double const_reg; // lambda * |W2|^2
    int n, l1;

    CanonicalThl assemble(const Eigen::VectorXd& theta) const {
        CanonicalThl m;
        m.b0 = b0;
        m.W1 = Eigen::Map<const Eigen::MatrixXd>(theta.data(), n, l1);
        m.b1 = theta.tail(l1);
        m.W2 = W2;
        m.b2 = b2;
        return m;
    }

    double true_value(const Eigen::VectorXd& theta) const {
        const CanonicalThl m = assemble(theta);
        double total = const_reg + lambda * m.W1.squaredNorm();
        for (int i = 0; i < xpos.cols(); ++i)
            total += hinge(1.0 - forward_canonical_thl(m, xpos.col(i)));
        for (int j = 0; j < xneg.cols(); ++j)
            total += hinge(1.0 + forward_canonical_thl(m, xneg.col(j)));
        return total;
    }

    ConvexProblem surrogate(const Eigen::VectorXd& theta0) const {
        const CanonicalThl anchor = assemble(theta0);
        // Freeze each point's activation patterns at the anchor.  Positives
        // get the concave lower bound (low score hurts them), negatives the
        // convex upper bound (high score hurts them); both touch at theta0.
        std::vector<ActiveSet> pos_a1(static_cast<size_t>(xpos.cols()));
        for (int i = 0; i < xpos.cols(); ++i)
            pos_a1[static_cast<size_t>(i)] = active_set(anchor.W1, anchor.b1, xpos.col(i));
        std::vector<Eigen::VectorXd> neg_h(static_cast<size_t>(xneg.cols()));
        for (int j = 0; j < xneg.cols(); ++j) {
            const Eigen::VectorXd z1 = relu(anchor.W1.transpose() * xneg.col(j) + anchor.b1);
            const ActiveSet a2 = active_set(W2, b2, z1);
            // Collapsed second layer for the upper bound: f2 = b0 - sum_{j in
            // a2} b2_j - h' relu(W1'x + b1) with h = sum of the a2 columns.
            Eigen::VectorXd h = Eigen::VectorXd::Zero(l1);
            double bias = 0.0;
            for (int a : a2) {
                h += W2.col(a);
                bias += b2[a];
            }
            Eigen::VectorXd packed(l1 + 1);
            packed.head(l1) = h;
            packed[l1] = bias;
            neg_h[static_cast<size_t>(j)] = packed;
        }

        const FirstLayerCore* core = this;
        ConvexProblem p;
        p.value = [core, pos_a1, neg_h](const Eigen::VectorXd& theta) {
            const CanonicalThl m = core->assemble(theta);
            double total = core->const_reg + core->lambda * m.W1.squaredNorm();
            for (int i = 0; i < core->xpos.cols(); ++i) {
                const Eigen::VectorXd z1 = m.W1.transpose() * core->xpos.col(i) + m.b1;
                Eigen::VectorXd masked = Eigen::VectorXd::Zero(core->l1);
                for (int a : pos_a1[static_cast<size_t>(i)])
                    masked[a] = z1[a];
                const double f1 =
                    core->b0 - relu(core->W2.transpose() * masked + core->b2).sum();
                total += hinge(1.0 - f1);
            }
            for (int j = 0; j < core->xneg.cols(); ++j) {
                const Eigen::VectorXd& packed = neg_h[static_cast<size_t>(j)];
                const Eigen::VectorXd z1 =
                    relu(m.W1.transpose() * core->xneg.col(j) + m.b1);
                const double f2 =
                    core->b0 - packed[core->l1] - packed.head(core->l1).dot(z1);
                total += hinge(1.0 + f2);
            }
            return total;
        };
        p.subgradient = [core, pos_a1, neg_h](const Eigen::VectorXd& theta) {
            const CanonicalThl m = core->assemble(theta);
            Eigen::MatrixXd gW1 = 2.0 * core->lambda * m.W1;
            Eigen::VectorXd gb1 = Eigen::VectorXd::Zero(core->l1);

            for (int i = 0; i < core->xpos.cols(); ++i) {
                const Eigen::VectorXd z1 = m.W1.transpose() * core->xpos.col(i) + m.b1;
                Eigen::VectorXd masked = Eigen::VectorXd::Zero(core->l1);
                for (int a : pos_a1[static_cast<size_t>(i)])
                    masked[a] = z1[a];
                const Eigen::VectorXd z2 = core->W2.transpose() * masked + core->b2;
                const double f1 = core->b0 - relu(z2).sum();
                if (1.0 - f1 > 0.0) {
                    // d f1 / d w1_i = -sum_j [z2_j > 0] W2_ij x for i in a1.
                    Eigen::VectorXd coef = Eigen::VectorXd::Zero(core->l1);
                    for (int jj = 0; jj < z2.size(); ++jj)
                        if (z2[jj] > 0.0)
                            coef += core->W2.col(jj);
                    for (int a : pos_a1[static_cast<size_t>(i)]) {
                        gW1.col(a) += coef[a] * core->xpos.col(i);
                        gb1[a] += coef[a];
                    }
                }
            }
            for (int j = 0; j < core->xneg.cols(); ++j) {
                const Eigen::VectorXd& packed = neg_h[static_cast<size_t>(j)];
                const Eigen::VectorXd pre = m.W1.transpose() * core->xneg.col(j) + m.b1;
                const double f2 =
                    core->b0 - packed[core->l1] - packed.head(core->l1).dot(relu(pre));
                if (1.0 + f2 > 0.0) {
                    for (int i = 0; i < core->l1; ++i) {
                        if (pre[i] > 0.0) {
                            const double coef = -packed[i]; // nonnegative
                            gW1.col(i) += coef * core->xneg.col(j);
                            gb1[i] += coef;
                        }
                    }
                }
            }

            Eigen::VectorXd g(theta.size());
            g.head(core->n * core->l1) =
                Eigen::Map<const Eigen::VectorXd>(gW1.data(), core->n * core->l1);
            g.tail(core->l1) = gb1;
            return g;
        };
        return p;
    }
};

FirstLayerCore make_first_layer_core(const PointSet& xpos, const PointSet& xneg,
                                     const CanonicalThl& fixed, double lambda) {
    FirstLayerCore core;
    core.xpos = xpos.as_matrix();
    core.xneg = xneg.as_matrix();
    core.b0 = fixed.b0;
    core.W2 = fixed.W2;
    core.b2 = fixed.b2;
    core.lambda = lambda;
    core.const_reg = lambda * fixed.W2.squaredNorm();
    core.n = xpos.dim();
    core.l1 = fixed.hidden1_dim();
    return core;
}

} // namespace

ObjectiveFn thl_first_layer_objective(const PointSet& xpos, const PointSet& xneg,
                                      const CanonicalThl& fixed, double lambda) {
    check_training_sets(xpos, xneg);
    validate(fixed);
    const auto core =
        std::make_shared<FirstLayerCore>(make_first_layer_core(xpos, xneg, fixed, lambda));
    return [core](const Eigen::VectorXd& theta) { return core->true_value(theta); };
}

SurrogateOracle thl_first_layer_surrogate(const PointSet& xpos, const PointSet& xneg,
                                          const CanonicalThl& fixed, double lambda) {
    check_training_sets(xpos, xneg);
    validate(fixed);
    const auto core =
        std::make_shared<FirstLayerCore>(make_first_layer_core(xpos, xneg, fixed, lambda));
    return [core](const Eigen::VectorXd& anchor) { return core->surrogate(anchor); };
}

std::pair<CanonicalThl, MmTrace> train_thl(const PointSet& xpos, const PointSet& xneg,
                                           const TrainConfig& config) {
    check_training_sets(xpos, xneg);
    check_config_common(config);
    const int n = xpos.dim();

    CanonicalThl m;
    switch (config.init) {
    case InitKind::random: {
        if (config.hidden1 < 1 || config.hidden2 < 1)
            fail(ErrorCode::config_error, "hidden widths must be at least 1");
        std::mt19937_64 rng = seeded_rng(config.seed);
        m.b0 = 0.0;
        m.W1 = random_weights(n, config.hidden1, rng);
        m.b1 = Eigen::VectorXd::Zero(config.hidden1);
        // Nonpositive second layer from the start, so the lower bound in the
        // first-layer step applies from round one.
        m.W2 = -random_weights(config.hidden1, config.hidden2, rng).cwiseAbs();
        m.b2 = Eigen::VectorXd::Zero(config.hidden2);
        break;
    }
    case InitKind::constructive:
        m = to_canonical_thl(build_thl_separator(xpos, xneg));
        break;
    case InitKind::warm:
        if (!config.warm_thl)
            fail(ErrorCode::config_error, "warm init requires a starting model");
        m = *config.warm_thl;
        if (m.input_dim() != n)
            fail(ErrorCode::dimension_mismatch, "warm model input dimension mismatch");
        break;
    }
    validate(m);

    const auto start = std::chrono::steady_clock::now();
    const auto elapsed_ms = [&] {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    };
    const auto objective = [&](const CanonicalThl& model) {
        return hinge_objective(model, xpos, xneg, config.lambda).total;
    };

    MmTrace trace;
    trace.stop_reason = "max_outer";
    double current = objective(m);

    // One second-layer pass then one first-layer pass per round; each pass is
    // a single surrogate minimization warm-started at the current iterate, so
    // the full objective can only go down.
    for (int round = 0; round < config.max_outer; ++round) {
        const double before_round = current;

        {
            const auto oracle = thl_second_layer_surrogate(xpos, xneg, m, config.lambda);
            CanonicalShl view;
            view.b0 = m.b0;
            view.W = m.W2;
            view.b = m.b2;
            const ConvexProblem prob = oracle(pack_shl(view));
            const Eigen::VectorXd theta =
                solve_convex(prob, pack_shl(view),
                             nonpositive_w2_projection(m.hidden1_dim(), m.hidden2_dim()),
                             config.inner_budget);
            const CanonicalShl next = unpack_shl(theta, m.hidden1_dim(), m.hidden2_dim());
            m.b0 = next.b0;
            m.W2 = next.W;
            m.b2 = next.b;
            const double after = objective(m);
            if (after > current + kDescentSlack)
                fail(ErrorCode::descent_violation, "second-layer pass increased the objective");
            trace.iterations.push_back({current, prob.value(theta), elapsed_ms()});
            current = after;
        }

        {
            const auto oracle = thl_first_layer_surrogate(xpos, xneg, m, config.lambda);
            Eigen::VectorXd warm(n * m.hidden1_dim() + m.hidden1_dim());
            warm.head(n * m.hidden1_dim()) =
                Eigen::Map<const Eigen::VectorXd>(m.W1.data(), n * m.hidden1_dim());
            warm.tail(m.hidden1_dim()) = m.b1;
            const ConvexProblem prob = oracle(warm);
            const Eigen::VectorXd theta = solve_convex(prob, warm, {}, config.inner_budget);
            m.W1 = Eigen::Map<const Eigen::MatrixXd>(theta.data(), n, m.hidden1_dim());
            m.b1 = theta.tail(m.hidden1_dim());
            const double after = objective(m);
            if (after > current + kDescentSlack)
                fail(ErrorCode::descent_violation, "first-layer pass increased the objective");
            trace.iterations.push_back({current, prob.value(theta), elapsed_ms()});
            current = after;
        }

        if (before_round - current < config.ftol) {
            trace.converged = true;
            trace.stop_reason = "ftol";
            break;
        }
    }
    trace.iterations.push_back({current, std::numeric_limits<double>::quiet_NaN(), elapsed_ms()});
    return {m, trace};
}

int MulticlassModel::num_classes() const {
    const int trained = arch == Arch::shl ? static_cast<int>(shl_models.size())
                                          : static_cast<int>(thl_models.size());
    // Two classes share one trained model (the second score is its negation).
    return trained == 1 ? 2 : trained;
}

double MulticlassModel::score(int k, const Eigen::VectorXd& x) const {
    const int trained = arch == Arch::shl ? static_cast<int>(shl_models.size())
                                          : static_cast<int>(thl_models.size());
    const double sign = (trained == 1 && k == 1) ? -1.0 : 1.0;
    const int at = (trained == 1) ? 0 : k;
    return sign * (arch == Arch::shl
                       ? forward_canonical_shl(shl_models[static_cast<size_t>(at)], x)
                       : forward_canonical_thl(thl_models[static_cast<size_t>(at)], x));
}

int MulticlassModel::predict(const Eigen::VectorXd& x) const {
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < num_classes(); ++k) {
        const double s = score(k, x);
        if (s > best_score) {
            best_score = s;
            best = k;
        }
    }
    return best;
}

MulticlassModel multiclass_train(const std::vector<PointSet>& classes,
                                 const TrainConfig& config) {
    if (classes.size() < 2)
        fail(ErrorCode::config_error, "multiclass training needs at least two classes");
    for (size_t k = 0; k < classes.size(); ++k)
        if (classes[k].empty())
            fail(ErrorCode::empty_class, "class " + std::to_string(k) + " has no points");

    MulticlassModel out;
    out.arch = config.arch;
    // With two classes one binary model decides both scores, so only one
    // trainer run is needed; see score().
    const size_t runs = classes.size() == 2 ? 1 : classes.size();
    for (size_t k = 0; k < runs; ++k) {
        PointSet rest;
        for (size_t j = 0; j < classes.size(); ++j) {
            if (j == k)
                continue;
            for (const auto& p : classes[j].points)
                rest.add(p);
        }
        if (config.arch == Arch::shl) {
            auto [model, trace] = train_shl(classes[k], rest, config);
            out.shl_models.push_back(std::move(model));
            out.traces.push_back(std::move(trace));
        } else {
            auto [model, trace] = train_thl(classes[k], rest, config);
            out.thl_models.push_back(std::move(model));
            out.traces.push_back(std::move(trace));
        }
    }
    return out;
}

} // namespace scrn
