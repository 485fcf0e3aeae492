#include "scrn/construct.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace scrn {

namespace {

constexpr double kVerifySlack = 1e-9;
constexpr double kGammaFloor = 1e-9;

std::string fmt_double(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void check_binary_inputs(const PointSet& xpos, const PointSet& xneg) {
    if (xpos.empty() || xneg.empty())
        fail(ErrorCode::empty_set, "separator construction needs nonempty positive and negative sets");
    if (xpos.dim() != xneg.dim())
        fail(ErrorCode::dimension_mismatch,
             "positive points have dimension " + std::to_string(xpos.dim()) + ", negative " +
                 std::to_string(xneg.dim()));
}

struct ShlParts {
    Eigen::MatrixXd W; // n x l
    Eigen::VectorXd b;
    double gamma_min = 0.0;
};

// Hyperplane nodes for every negative point, followed by the optional greedy
// merge and the margin normalization constant.
ShlParts shl_parts(const PointSet& xpos, const PointSet& xneg, const ConstructOptions& options) {
    check_binary_inputs(xpos, xneg);
    const int n = xpos.dim();
    const int raw = xneg.size();

    Eigen::MatrixXd W(n, raw);
    Eigen::VectorXd b(raw);
    for (int i = 0; i < raw; ++i) {
        const HullProjection proj = hull_distance(xneg[i], xpos);
        if (proj.distance <= options.tol)
            fail(ErrorCode::not_convexly_separable,
                 "negative point " + std::to_string(i) + " lies within " +
                     fmt_double(proj.distance) + " of the positive hull (tol " +
                     fmt_double(options.tol) + ")");
        const Eigen::VectorXd w = (xneg[i] - proj.nearest) / proj.distance;
        W.col(i) = w;
        b[i] = -w.dot(xneg[i] + proj.nearest) / 2.0;
    }

    std::vector<int> kept(static_cast<size_t>(raw));
    std::iota(kept.begin(), kept.end(), 0);
    if (options.merge_nodes) {
        std::vector<bool> dropped(static_cast<size_t>(raw), false);
        for (int i = 0; i < raw; ++i) {
            for (int j = 0; j < raw; ++j) {
                if (j == i || dropped[static_cast<size_t>(j)])
                    continue;
                if (W.col(j).dot(xneg[i]) + b[j] > options.tol) {
                    dropped[static_cast<size_t>(i)] = true;
                    break;
                }
            }
        }
        kept.clear();
        for (int i = 0; i < raw; ++i)
            if (!dropped[static_cast<size_t>(i)])
                kept.push_back(i);
    }

    ShlParts parts;
    parts.W.resize(n, static_cast<int>(kept.size()));
    parts.b.resize(static_cast<int>(kept.size()));
    for (size_t k = 0; k < kept.size(); ++k) {
        parts.W.col(static_cast<int>(k)) = W.col(kept[k]);
        parts.b[static_cast<int>(k)] = b[kept[k]];
    }

    parts.gamma_min = std::numeric_limits<double>::infinity();
    for (const auto& x : xneg.points)
        parts.gamma_min =
            std::min(parts.gamma_min, relu(parts.W.transpose() * x + parts.b).sum());
    if (parts.gamma_min <= std::max(options.tol, kGammaFloor))
        fail(ErrorCode::degenerate_gamma,
             "margin normalizer " + fmt_double(parts.gamma_min) + " is too small to scale");
    return parts;
}

void verify_binary_outputs(const std::function<double(const Eigen::VectorXd&)>& f,
                           const PointSet& xpos, const PointSet& xneg) {
    for (int i = 0; i < xpos.size(); ++i) {
        const double v = f(xpos[i]);
        if (!(v >= 1.0 - kVerifySlack))
            fail(ErrorCode::not_convexly_separable,
                 "built separator scores positive point " + std::to_string(i) + " at " +
                     fmt_double(v) + "; the instance is too close to inseparable");
    }
    for (int i = 0; i < xneg.size(); ++i) {
        const double v = f(xneg[i]);
        if (!(v <= -1.0 + kVerifySlack))
            fail(ErrorCode::internal_error,
                 "built separator scores negative point " + std::to_string(i) + " at " +
                     fmt_double(v));
    }
}

void check_classes(const std::vector<PointSet>& classes) {
    if (classes.size() < 2)
        fail(ErrorCode::config_error, "multiclass construction needs at least two classes");
    for (size_t k = 0; k < classes.size(); ++k) {
        if (classes[k].empty())
            fail(ErrorCode::empty_class, "class " + std::to_string(k) + " has no points");
        if (classes[k].dim() != classes[0].dim())
            fail(ErrorCode::dimension_mismatch, "classes disagree on input dimension");
    }
}

PointSet union_of_rest(const std::vector<PointSet>& classes, size_t skip) {
    PointSet rest;
    for (size_t k = 0; k < classes.size(); ++k) {
        if (k == skip)
            continue;
        for (const auto& p : classes[k].points)
            rest.add(p);
    }
    return rest;
}

void check_pairwise_disjoint(const PointSet& a, const PointSet& b, double tol,
                             const std::string& what) {
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < b.size(); ++j)
            if ((a[i] - b[j]).norm() <= tol)
                fail(ErrorCode::not_disjoint, what + ": point " + std::to_string(i) +
                                                  " coincides with point " + std::to_string(j) +
                                                  " within tol");
}

} // namespace

Scrn1Model build_shl_separator(const PointSet& xpos, const PointSet& xneg,
                               const ConstructOptions& options) {
    const ShlParts parts = shl_parts(xpos, xneg, options);
    const int l = static_cast<int>(parts.W.cols());

    Scrn1Model model;
    model.hidden.W = parts.W;
    model.hidden.b = parts.b;
    model.A = Eigen::MatrixXd::Constant(l, 1, -2.0 / parts.gamma_min);
    model.c = Eigen::VectorXd::Ones(1);
    validate(model);

    verify_binary_outputs([&](const Eigen::VectorXd& x) { return forward_scrn1(model, x)[0]; },
                          xpos, xneg);
    return model;
}

Scrn1Model build_shl_multiclass(const std::vector<PointSet>& classes,
                                const ConstructOptions& options) {
    check_classes(classes);
    const int m = static_cast<int>(classes.size());
    const int n = classes[0].dim();

    const auto grid = pairwise_verdicts(classes, PairwiseMode::mutual_convex, options.tol);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (!grid[static_cast<size_t>(i)][static_cast<size_t>(j)].separable)
                fail(ErrorCode::not_pairwise_separable,
                     "classes " + std::to_string(i) + " and " + std::to_string(j) +
                         " are not mutually convexly separable");

    std::vector<Scrn1Model> per_class;
    per_class.reserve(static_cast<size_t>(m));
    int total_hidden = 0;
    for (int k = 0; k < m; ++k) {
        per_class.push_back(build_shl_separator(classes[static_cast<size_t>(k)],
                                                union_of_rest(classes, static_cast<size_t>(k)),
                                                options));
        total_hidden += per_class.back().hidden_dim();
    }

    Scrn1Model model;
    model.hidden.W.resize(n, total_hidden);
    model.hidden.b.resize(total_hidden);
    model.A = Eigen::MatrixXd::Zero(total_hidden, m);
    model.c = Eigen::VectorXd::Ones(m);
    int row = 0;
    for (int k = 0; k < m; ++k) {
        const Scrn1Model& part = per_class[static_cast<size_t>(k)];
        const int lk = part.hidden_dim();
        model.hidden.W.middleCols(row, lk) = part.hidden.W;
        model.hidden.b.segment(row, lk) = part.hidden.b;
        model.A.block(row, k, lk, 1) = part.A;
        row += lk;
    }
    validate(model);
    return model;
}

ConvexClusterCover greedy_convex_cover(const PointSet& x, const PointSet& against, double tol,
                                       std::optional<uint64_t> permute_seed) {
    if (x.empty() || against.empty())
        fail(ErrorCode::empty_set, "cover needs nonempty sets");
    if (x.dim() != against.dim())
        fail(ErrorCode::dimension_mismatch, "cover sets disagree on dimension");
    check_pairwise_disjoint(x, against, tol, "cover input");

    std::vector<int> order(static_cast<size_t>(x.size()));
    std::iota(order.begin(), order.end(), 0);
    if (permute_seed) {
        std::mt19937_64 rng(*permute_seed);
        std::shuffle(order.begin(), order.end(), rng);
    }

    const auto hull_clear_of_against = [&](const PointSet& cluster) {
        for (const auto& p : against.points)
            if (hull_distance(p, cluster).distance <= tol)
                return false;
        return true;
    };

    ConvexClusterCover cover;
    std::vector<bool> assigned(static_cast<size_t>(x.size()), false);
    for (size_t s = 0; s < order.size(); ++s) {
        const int seed = order[s];
        if (assigned[static_cast<size_t>(seed)])
            continue;
        std::vector<int> members{seed};
        PointSet cluster;
        cluster.add(x[seed]);
        assigned[static_cast<size_t>(seed)] = true;

        for (size_t t = s + 1; t < order.size(); ++t) {
            const int cand = order[t];
            if (assigned[static_cast<size_t>(cand)])
                continue;
            PointSet trial = cluster;
            trial.add(x[cand]);
            if (hull_clear_of_against(trial)) {
                cluster = std::move(trial);
                members.push_back(cand);
                assigned[static_cast<size_t>(cand)] = true;
            }
        }
        cover.verdicts.push_back(is_convexly_separable(cluster, against, tol));
        cover.clusters.push_back(std::move(members));
    }
    return cover;
}

Scrn2Model build_thl_separator(const PointSet& xpos, const PointSet& xneg,
                               const ConstructOptions& options) {
    check_binary_inputs(xpos, xneg);
    const int n = xpos.dim();

    const ConvexClusterCover cover = greedy_convex_cover(xneg, xpos, options.tol);
    const int num_clusters = static_cast<int>(cover.clusters.size());

    // Each cluster gets a single-hidden-layer unit that is +1 on the cluster
    // and <= -1 on xpos; its output weights become one nonpositive column of
    // the second layer.
    std::vector<Scrn1Model> units;
    units.reserve(static_cast<size_t>(num_clusters));
    int total_l1 = 0;
    for (const auto& members : cover.clusters) {
        PointSet cluster;
        for (int idx : members)
            cluster.add(xneg[idx]);
        units.push_back(build_shl_separator(cluster, xpos, options));
        total_l1 += units.back().hidden_dim();
    }

    Scrn2Model model;
    model.layer1.W.resize(n, total_l1);
    model.layer1.b.resize(total_l1);
    model.layer2.W = Eigen::MatrixXd::Zero(total_l1, num_clusters);
    model.layer2.b.resize(num_clusters);
    model.layer2.constraint = SignConstraint::nonpositive;
    int row = 0;
    for (int k = 0; k < num_clusters; ++k) {
        const Scrn1Model& unit = units[static_cast<size_t>(k)];
        const int lk = unit.hidden_dim();
        model.layer1.W.middleCols(row, lk) = unit.hidden.W;
        model.layer1.b.segment(row, lk) = unit.hidden.b;
        model.layer2.W.block(row, k, lk, 1) = unit.A;
        model.layer2.b[k] = unit.c[0];
        row += lk;
    }

    double gamma = std::numeric_limits<double>::infinity();
    for (const auto& xn : xneg.points) {
        const Eigen::VectorXd z1 = relu(model.layer1.W.transpose() * xn + model.layer1.b);
        gamma = std::min(gamma, relu(model.layer2.W.transpose() * z1 + model.layer2.b).sum());
    }
    if (gamma <= std::max(options.tol, kGammaFloor))
        fail(ErrorCode::degenerate_gamma,
             "margin normalizer " + fmt_double(gamma) + " is too small to scale");

    model.A = Eigen::MatrixXd::Constant(num_clusters, 1, -2.0 / gamma);
    model.c = Eigen::VectorXd::Ones(1);
    validate(model);

    verify_binary_outputs([&](const Eigen::VectorXd& x) { return forward_scrn2(model, x)[0]; },
                          xpos, xneg);
    return model;
}

Scrn2Model build_thl_multiclass(const std::vector<PointSet>& classes,
                                const ConstructOptions& options) {
    check_classes(classes);
    const int m = static_cast<int>(classes.size());
    const int n = classes[0].dim();

    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            check_pairwise_disjoint(classes[static_cast<size_t>(i)],
                                    classes[static_cast<size_t>(j)], options.tol,
                                    "classes " + std::to_string(i) + "/" + std::to_string(j));

    std::vector<Scrn2Model> per_class;
    per_class.reserve(static_cast<size_t>(m));
    int total_l1 = 0;
    int total_l2 = 0;
    for (int k = 0; k < m; ++k) {
        per_class.push_back(build_thl_separator(classes[static_cast<size_t>(k)],
                                                union_of_rest(classes, static_cast<size_t>(k)),
                                                options));
        total_l1 += per_class.back().hidden1_dim();
        total_l2 += per_class.back().hidden2_dim();
    }

    Scrn2Model model;
    model.layer1.W.resize(n, total_l1);
    model.layer1.b.resize(total_l1);
    model.layer2.W = Eigen::MatrixXd::Zero(total_l1, total_l2);
    model.layer2.b.resize(total_l2);
    model.layer2.constraint = SignConstraint::nonpositive;
    model.A = Eigen::MatrixXd::Zero(total_l2, m);
    model.c = Eigen::VectorXd::Ones(m);

    int row1 = 0;
    int row2 = 0;
    for (int k = 0; k < m; ++k) {
        const Scrn2Model& part = per_class[static_cast<size_t>(k)];
        const int l1k = part.hidden1_dim();
        const int l2k = part.hidden2_dim();
        model.layer1.W.middleCols(row1, l1k) = part.layer1.W;
        model.layer1.b.segment(row1, l1k) = part.layer1.b;
        model.layer2.W.block(row1, row2, l1k, l2k) = part.layer2.W;
        model.layer2.b.segment(row2, l2k) = part.layer2.b;
        model.A.block(row2, k, l2k, 1) = part.A;
        row1 += l1k;
        row2 += l2k;
    }
    validate(model);
    return model;
}

} // namespace scrn
