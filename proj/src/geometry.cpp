#include "scrn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scrn {

namespace {

void check_finite(const Eigen::VectorXd& p, const char* what) {
    if (!p.allFinite())
        fail(ErrorCode::non_finite, std::string(what) + " contains a non-finite coordinate");
}

// Exact duplicates only; the tolerance story lives in the verdicts, not here.
std::vector<Eigen::VectorXd> dedup(const std::vector<Eigen::VectorXd>& pts) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
        bool seen = false;
        for (const auto& q : out) {
            if (p == q) {
                seen = true;
                break;
            }
        }
        if (!seen)
            out.push_back(p);
    }
    return out;
}

// Once Frank-Wolfe has identified a face, solve the projection restricted to
// that face exactly: minimize |q - P*mu| over affine combinations summing to
// one.  Accepted only when the solution stays (numerically) inside the
// simplex and does not worsen the objective, so the caller keeps the
// monotone-descent guarantee either way.
bool refine_on_active_face(const Eigen::MatrixXd& P, const Eigen::VectorXd& q,
                           Eigen::VectorXd& lambda) {
    std::vector<int> active;
    for (int i = 0; i < lambda.size(); ++i)
        if (lambda[i] > 1e-12)
            active.push_back(i);
    const int k = static_cast<int>(active.size());
    if (k == 0)
        return false;

    Eigen::MatrixXd pa(P.rows(), k);
    for (int j = 0; j < k; ++j)
        pa.col(j) = P.col(active[static_cast<size_t>(j)]);

    // KKT system for min |q - pa*mu|^2 subject to sum(mu) = 1.
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
    kkt.topLeftCorner(k, k) = pa.transpose() * pa;
    kkt.topRightCorner(k, 1).setOnes();
    kkt.bottomLeftCorner(1, k).setOnes();
    Eigen::VectorXd rhs(k + 1);
    rhs.head(k) = pa.transpose() * q;
    rhs[k] = 1.0;

    Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    Eigen::VectorXd mu = sol.head(k);
    if ((mu.array() < -1e-10).any())
        return false;

    mu = mu.cwiseMax(0.0);
    const double total = mu.sum();
    if (total <= 0.0)
        return false;
    mu /= total;

    const double before = (q - P * lambda).squaredNorm();
    const double after = (q - pa * mu).squaredNorm();
    if (after > before)
        return false;

    lambda.setZero();
    for (int j = 0; j < k; ++j)
        lambda[active[static_cast<size_t>(j)]] = mu[j];
    return true;
}

// Away-step Frank-Wolfe for min 0.5*|q - P*lambda|^2 over the simplex.
// Exact line search per step; stops on a duality gap below 1e-10 or after
// 10000 iterations, then polishes on the identified face.
Eigen::VectorXd project_onto_hull(const Eigen::MatrixXd& P, const Eigen::VectorXd& q) {
    const int N = static_cast<int>(P.cols());
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(N);

    // Start from the vertex nearest to q.
    int start = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < N; ++i) {
        const double d = (P.col(i) - q).squaredNorm();
        if (d < best) {
            best = d;
            start = i;
        }
    }
    lambda[start] = 1.0;

    constexpr double kGapTol = 1e-10;
    constexpr int kMaxIter = 10000;

    for (int iter = 0; iter < kMaxIter; ++iter) {
        const Eigen::VectorXd residual = P * lambda - q;
        const Eigen::VectorXd grad = P.transpose() * residual;

        int fw = 0;
        grad.minCoeff(&fw);
        int away = -1;
        double away_val = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < N; ++i) {
            if (lambda[i] > 0.0 && grad[i] > away_val) {
                away_val = grad[i];
                away = i;
            }
        }

        const double grad_dot_lambda = grad.dot(lambda);
        const double gap_fw = grad_dot_lambda - grad[fw];
        if (gap_fw < kGapTol)
            break;
        const double gap_away = away_val - grad_dot_lambda;

        Eigen::VectorXd dir;
        double step_max;
        if (gap_fw >= gap_away) {
            dir = -lambda;
            dir[fw] += 1.0;
            step_max = 1.0;
        } else {
            dir = lambda;
            dir[away] -= 1.0;
            const double la = lambda[away];
            if (la >= 1.0)
                break; // single-vertex iterate, nothing to move away from
            step_max = la / (1.0 - la);
        }

        const Eigen::VectorXd pdir = P * dir;
        const double denom = pdir.squaredNorm();
        double step;
        if (denom <= 0.0) {
            step = (grad.dot(dir) < 0.0) ? step_max : 0.0;
        } else {
            step = std::clamp(-residual.dot(pdir) / denom, 0.0, step_max);
        }
        if (step <= 0.0)
            break;
        lambda += step * dir;
        // Clip drift so the iterate stays a convex combination.
        lambda = lambda.cwiseMax(0.0);
        lambda /= lambda.sum();
    }

    refine_on_active_face(P, q, lambda);
    return lambda;
}

SeparabilityVerdict linear_verdict_from_pair(const HullsDistance& hd, double tol) {
    SeparabilityVerdict v;
    v.distance = hd.distance;
    v.tolerance_used = tol;
    v.separable = hd.distance > tol;
    if (v.separable) {
        Eigen::VectorXd w = hd.nearest_a - hd.nearest_b;
        w /= w.norm();
        v.witness_w = w;
        v.witness_b = -w.dot(hd.nearest_a + hd.nearest_b) / 2.0;
    }
    return v;
}

void check_nonempty_same_dim(const PointSet& a, const PointSet& b) {
    if (a.empty() || b.empty())
        fail(ErrorCode::empty_set, "separability queries need two nonempty point sets");
    if (a.dim() != b.dim())
        fail(ErrorCode::dimension_mismatch,
             "point sets have dimensions " + std::to_string(a.dim()) + " and " +
                 std::to_string(b.dim()));
}

} // namespace

PointSet::PointSet(std::vector<Eigen::VectorXd> pts) : points(std::move(pts)) {
    for (const auto& p : points) {
        check_finite(p, "point");
        if (p.size() != points.front().size())
            fail(ErrorCode::dimension_mismatch, "points in a set must share one dimension");
    }
}

void PointSet::add(const Eigen::VectorXd& p) {
    check_finite(p, "point");
    if (!points.empty() && p.size() != points.front().size())
        fail(ErrorCode::dimension_mismatch,
             "cannot add a " + std::to_string(p.size()) + "-dim point to a " +
                 std::to_string(dim()) + "-dim set");
    points.push_back(p);
}

Eigen::MatrixXd PointSet::as_matrix() const {
    Eigen::MatrixXd m(dim(), size());
    for (int i = 0; i < size(); ++i)
        m.col(i) = points[static_cast<size_t>(i)];
    return m;
}

HullProjection hull_distance(const Eigen::VectorXd& q, const PointSet& s) {
    if (s.empty())
        fail(ErrorCode::empty_set, "hull distance needs a nonempty point set");
    check_finite(q, "query point");
    if (q.size() != s.dim())
        fail(ErrorCode::dimension_mismatch,
             "query has dimension " + std::to_string(q.size()) + ", set has " +
                 std::to_string(s.dim()));

    const std::vector<Eigen::VectorXd> verts = dedup(s.points);
    Eigen::MatrixXd P(q.size(), static_cast<int>(verts.size()));
    for (size_t i = 0; i < verts.size(); ++i)
        P.col(static_cast<int>(i)) = verts[i];

    HullProjection out;
    out.coefficients = project_onto_hull(P, q);
    out.nearest = P * out.coefficients;
    out.distance = (q - out.nearest).norm();
    return out;
}

HullsDistance hulls_distance(const PointSet& a, const PointSet& b) {
    check_nonempty_same_dim(a, b);

    const std::vector<Eigen::VectorXd> va = dedup(a.points);
    const std::vector<Eigen::VectorXd> vb = dedup(b.points);
    const int na = static_cast<int>(va.size());
    const int nb = static_cast<int>(vb.size());

    // Vertices of the Minkowski difference, pair (i, j) at column i*nb + j.
    Eigen::MatrixXd D(a.dim(), na * nb);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j)
            D.col(i * nb + j) = va[static_cast<size_t>(i)] - vb[static_cast<size_t>(j)];

    const Eigen::VectorXd lambda = project_onto_hull(D, Eigen::VectorXd::Zero(a.dim()));

    HullsDistance out;
    out.nearest_a = Eigen::VectorXd::Zero(a.dim());
    out.nearest_b = Eigen::VectorXd::Zero(a.dim());
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j) {
            const double l = lambda[i * nb + j];
            if (l > 0.0) {
                out.nearest_a += l * va[static_cast<size_t>(i)];
                out.nearest_b += l * vb[static_cast<size_t>(j)];
            }
        }
    out.distance = (out.nearest_a - out.nearest_b).norm();
    return out;
}

SeparabilityVerdict is_linearly_separable(const PointSet& a, const PointSet& b, double tol) {
    check_nonempty_same_dim(a, b);
    return linear_verdict_from_pair(hulls_distance(a, b), tol);
}

SeparabilityVerdict is_convexly_separable(const PointSet& a, const PointSet& from_b, double tol) {
    check_nonempty_same_dim(a, from_b);
    SeparabilityVerdict v;
    v.tolerance_used = tol;
    v.distance = std::numeric_limits<double>::infinity();
    for (const auto& p : from_b.points)
        v.distance = std::min(v.distance, hull_distance(p, a).distance);
    v.separable = v.distance > tol;
    return v;
}

MutualVerdict is_mutually_convexly_separable(const PointSet& a, const PointSet& b, double tol) {
    MutualVerdict m;
    m.a_from_b = is_convexly_separable(a, b, tol);
    m.b_from_a = is_convexly_separable(b, a, tol);
    m.separable = m.a_from_b.separable && m.b_from_a.separable;
    return m;
}

std::vector<std::vector<SeparabilityVerdict>>
pairwise_verdicts(const std::vector<PointSet>& classes, PairwiseMode mode, double tol) {
    const int m = static_cast<int>(classes.size());
    if (m < 2)
        fail(ErrorCode::config_error, "pairwise verdicts need at least two classes");

    SeparabilityVerdict diag;
    diag.separable = true;
    diag.distance = std::numeric_limits<double>::infinity();
    diag.tolerance_used = tol;
    std::vector<std::vector<SeparabilityVerdict>> grid(
        static_cast<size_t>(m), std::vector<SeparabilityVerdict>(static_cast<size_t>(m), diag));

    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            SeparabilityVerdict v;
            if (mode == PairwiseMode::linear) {
                v = is_linearly_separable(classes[static_cast<size_t>(i)],
                                          classes[static_cast<size_t>(j)], tol);
            } else {
                const MutualVerdict mv = is_mutually_convexly_separable(
                    classes[static_cast<size_t>(i)], classes[static_cast<size_t>(j)], tol);
                v.separable = mv.separable;
                v.distance = std::min(mv.a_from_b.distance, mv.b_from_a.distance);
                v.tolerance_used = tol;
            }
            grid[static_cast<size_t>(i)][static_cast<size_t>(j)] = v;
            grid[static_cast<size_t>(j)][static_cast<size_t>(i)] = v;
        }
    }
    return grid;
}

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::empty_set: return "empty_set";
    case ErrorCode::empty_class: return "empty_class";
    case ErrorCode::not_convexly_separable: return "not_convexly_separable";
    case ErrorCode::not_pairwise_separable: return "not_pairwise_separable";
    case ErrorCode::not_disjoint: return "not_disjoint";
    case ErrorCode::degenerate_gamma: return "degenerate_gamma";
    case ErrorCode::model_does_not_separate: return "model_does_not_separate";
    case ErrorCode::sign_constraint_violated: return "sign_constraint_violated";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::config_error: return "config_error";
    case ErrorCode::generation_failed: return "generation_failed";
    case ErrorCode::descent_violation: return "descent_violation";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::internal_error: return "internal_error";
    }
    return "unknown_error";
}

} // namespace scrn
