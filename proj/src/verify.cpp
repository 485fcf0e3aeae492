#include "scrn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "scrn/construct.hpp"
#include "scrn/data.hpp"
#include "scrn/mm.hpp"
#include "scrn/network.hpp"
#include "scrn/train.hpp"

namespace scrn {

namespace {

Eigen::VectorXd unit_direction(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd u(n);
    do {
        for (int i = 0; i < n; ++i)
            u[i] = gauss(rng);
    } while (u.norm() == 0.0);
    return u / u.norm();
}

Eigen::VectorXd point_in_ball(int n, double radius, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    return unit_direction(n, rng) * radius * std::pow(unit(rng), 1.0 / n);
}

Eigen::MatrixXd random_rotation(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    if (q.determinant() < 0.0)
        q.col(0) = -q.col(0);
    return q;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

struct Tally {
    double worst = 0.0;   // largest violation seen (0 = clean)
    bool pass = true;
    std::string detail;

    void gap(double violation) { worst = std::max(worst, violation); }
    void require(bool ok, const std::string& why) {
        if (!ok && pass) {
            pass = false;
            detail = why;
        }
    }
    PropertyResult result(const std::string& name, double threshold) {
        require(worst <= threshold, "worst gap " + format_double(worst) + " exceeds " +
                                        format_double(threshold));
        return {name, pass, worst, detail};
    }
};

} // namespace

double bruteforce_hull_distance(const Eigen::VectorXd& q, const PointSet& s, int resolution) {
    if (s.empty())
        fail(ErrorCode::empty_set, "brute force oracle needs points");
    if (s.size() > 4)
        fail(ErrorCode::config_error, "brute force oracle is limited to 4 hull points");
    if (resolution < 1)
        fail(ErrorCode::config_error, "brute force resolution must be positive");

    const int N = s.size();
    std::vector<Eigen::VectorXd> step(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i)
        step[static_cast<size_t>(i)] = s[i] / static_cast<double>(resolution);

    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(q.size());
    // Walk every integer composition of `resolution` over the N coefficients.
    std::function<void(int, int)> rec = [&](int idx, int remaining) {
        if (idx == N - 1) {
            best = std::min(best,
                            (q - acc - remaining * step[static_cast<size_t>(idx)]).norm());
            return;
        }
        rec(idx + 1, remaining);
        for (int k = 1; k <= remaining; ++k) {
            acc += step[static_cast<size_t>(idx)];
            rec(idx + 1, remaining - k);
        }
        acc -= remaining * step[static_cast<size_t>(idx)];
    };
    rec(0, resolution);
    return best;
}

BinaryInstance random_convexly_separable_instance(std::mt19937_64& rng, int dim,
                                                  int max_per_class, double margin) {
    BinaryInstance inst;
    const int kpos = uniform_int(rng, 2, std::max(2, max_per_class));
    const int kneg = uniform_int(rng, 1, std::max(1, max_per_class));
    for (int i = 0; i < kpos; ++i)
        inst.xpos.add(point_in_ball(dim, 1.0, rng));
    while (inst.xneg.size() < kneg) {
        // Radius > 1 puts the candidate outside the ball holding the hull;
        // the projection check below still gates acceptance.
        const Eigen::VectorXd q = unit_direction(dim, rng) * uniform(rng, 1.2, 3.0);
        if (hull_distance(q, inst.xpos).distance > margin)
            inst.xneg.add(q);
    }
    return inst;
}

BinaryInstance random_interior_negative_instance(std::mt19937_64& rng, int dim,
                                                 int max_per_class) {
    for (;;) {
        BinaryInstance inst = random_convexly_separable_instance(rng, dim, max_per_class);
        std::exponential_distribution<double> expo(1.0);
        Eigen::VectorXd weights(inst.xpos.size());
        for (int i = 0; i < inst.xpos.size(); ++i)
            weights[i] = expo(rng);
        weights /= weights.sum();
        Eigen::VectorXd interior = Eigen::VectorXd::Zero(dim);
        for (int i = 0; i < inst.xpos.size(); ++i)
            interior += weights[i] * inst.xpos[i];
        if (hull_distance(interior, inst.xpos).distance > kDefaultTol)
            continue; // projection not sharp enough on this draw; try again
        inst.xneg.add(interior);
        return inst;
    }
}

BinaryInstance random_entangled_instance(std::mt19937_64& rng, int dim, int per_class) {
    constexpr double kMinGap = 5e-2;
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<Eigen::VectorXd> raw_a, raw_b;
        for (int i = 0; i + 1 < per_class; ++i) {
            raw_a.push_back(point_in_ball(dim, 2.0, rng));
            raw_b.push_back(point_in_ball(dim, 2.0, rng));
        }
        // Plant each side's centroid inside the other side, so neither hull
        // can avoid the opposite class no matter how the rest lands.
        Eigen::VectorXd b_star = Eigen::VectorXd::Zero(dim);
        for (const auto& p : raw_a)
            b_star += p;
        b_star /= static_cast<double>(raw_a.size());
        raw_b.push_back(b_star);
        Eigen::VectorXd a_star = Eigen::VectorXd::Zero(dim);
        for (const auto& p : raw_b)
            a_star += p;
        a_star /= static_cast<double>(raw_b.size());
        raw_a.push_back(a_star);

        bool clean = true;
        for (const auto& pa : raw_a)
            for (const auto& pb : raw_b)
                if ((pa - pb).norm() < kMinGap)
                    clean = false;
        if (!clean)
            continue;

        BinaryInstance inst;
        for (const auto& p : raw_a)
            inst.xpos.add(p);
        for (const auto& p : raw_b)
            inst.xneg.add(p);
        if (!is_mutually_convexly_separable(inst.xpos, inst.xneg).separable)
            return inst;
    }
    fail(ErrorCode::generation_failed, "could not build an entangled instance");
}

std::vector<PropertyResult> geometry_suite(const GeometrySuiteOptions& options) {
    std::mt19937_64 rng(options.seed);
    std::vector<PropertyResult> results;

    {
        // Projections with pencil-and-paper answers.
        Tally t;
        PointSet diamond;
        for (auto [x, y] : {std::pair{2.0, 0.0}, {0.0, 2.0}, {-2.0, 0.0}, {0.0, -2.0}})
            diamond.add((Eigen::VectorXd(2) << x, y).finished());
        const Eigen::VectorXd q1 = (Eigen::VectorXd(2) << 3.0, 0.0).finished();
        const HullProjection p1 = hull_distance(q1, diamond);
        t.gap(std::abs(p1.distance - 1.0));
        t.gap((p1.nearest - (Eigen::VectorXd(2) << 2.0, 0.0).finished()).norm());
        t.gap(hull_distance(Eigen::VectorXd::Zero(2), diamond).distance);
        t.gap(hull_distance((Eigen::VectorXd(2) << 2.0, 0.0).finished(), diamond).distance);

        PointSet segment;
        segment.add(Eigen::VectorXd::Zero(2));
        segment.add((Eigen::VectorXd(2) << 1.0, 1.0).finished());
        const HullProjection p2 =
            hull_distance((Eigen::VectorXd(2) << 0.0, 1.0).finished(), segment);
        t.gap(std::abs(p2.distance - std::sqrt(0.5)));
        t.gap((p2.nearest - (Eigen::VectorXd(2) << 0.5, 0.5).finished()).norm());
        results.push_back(t.result("frozen_projections", 1e-9));
    }

    {
        // Projection against the simplex-grid oracle, on instances whose
        // optima land exactly on the grid (interior combinations, support
        // vertices, midpoints), so the oracle value is exact.
        Tally t;
        for (int i = 0; i < options.bruteforce_instances; ++i) {
            const int N = uniform_int(rng, 2, 4);
            PointSet s;
            for (int k = 0; k < N; ++k)
                s.add(point_in_ball(2, 1.0, rng));

            Eigen::VectorXd q;
            switch (i % 3) {
            case 0: { // grid-exact interior combination
                Eigen::VectorXd lambda = Eigen::VectorXd::Zero(N);
                int remaining = 200;
                for (int k = 0; k + 1 < N; ++k) {
                    const int pick = uniform_int(rng, 0, remaining);
                    lambda[k] = pick / 200.0;
                    remaining -= pick;
                }
                lambda[N - 1] = remaining / 200.0;
                q = Eigen::VectorXd::Zero(2);
                for (int k = 0; k < N; ++k)
                    q += lambda[k] * s[k];
                break;
            }
            case 1: { // beyond a support vertex, projection is that vertex
                const Eigen::VectorXd u = unit_direction(2, rng);
                int best = 0;
                double best_dot = -std::numeric_limits<double>::infinity();
                for (int k = 0; k < N; ++k)
                    if (u.dot(s[k]) > best_dot) {
                        best_dot = u.dot(s[k]);
                        best = k;
                    }
                q = s[best] + uniform(rng, 0.1, 2.0) * u;
                break;
            }
            default: { // midpoint of two hull points, grid-exact at 100/200
                const int a = uniform_int(rng, 0, N - 1);
                const int b = uniform_int(rng, 0, N - 1);
                q = 0.5 * (s[a] + s[b]);
                break;
            }
            }

            const double fw = hull_distance(q, s).distance;
            const double grid = bruteforce_hull_distance(q, s);
            t.gap(std::abs(fw - grid));
            t.require((fw <= kDefaultTol) == (grid < 1e-3),
                      "membership disagreement between projection and grid oracle");
        }
        results.push_back(t.result("bruteforce_agreement", 1e-3));
    }

    {
        // Distances are invariant under rotation + translation.
        Tally t;
        const int reps = std::max(5, options.random_instances / 10);
        for (int i = 0; i < reps; ++i) {
            const int dim = uniform_int(rng, 2, 3);
            const BinaryInstance inst = random_convexly_separable_instance(rng, dim, 8);
            const Eigen::MatrixXd rot = random_rotation(dim, rng);
            Eigen::VectorXd shift(dim);
            for (int k = 0; k < dim; ++k)
                shift[k] = uniform(rng, -5.0, 5.0);

            PointSet moved;
            for (const auto& p : inst.xpos.points)
                moved.add(rot * p + shift);
            for (const auto& q : inst.xneg.points) {
                const double before = hull_distance(q, inst.xpos).distance;
                const double after = hull_distance(rot * q + shift, moved).distance;
                t.gap(std::abs(before - after));
            }
        }
        results.push_back(t.result("rigid_invariance", 1e-7));
    }

    {
        // Instances split by a known hyperplane: the linear verdict must hold
        // with a half-distance witness margin, and mutual convex separability
        // must follow.
        Tally t;
        for (int i = 0; i < options.random_instances; ++i) {
            const int dim = uniform_int(rng, 2, 4);
            const Eigen::VectorXd w = unit_direction(dim, rng);
            const double b = uniform(rng, -0.5, 0.5);
            PointSet a, bset;
            while (a.size() < 4 || bset.size() < 4) {
                const Eigen::VectorXd p = point_in_ball(dim, 2.0, rng);
                const double side = w.dot(p) + b;
                if (side > 0.05)
                    a.add(p);
                else if (side < -0.05)
                    bset.add(p);
            }
            const SeparabilityVerdict v = is_linearly_separable(a, bset);
            t.require(v.separable, "hyperplane-split instance judged inseparable");
            if (!v.separable)
                continue;
            const double floor = v.distance / 2.0 - v.tolerance_used;
            for (const auto& p : a.points)
                t.gap(floor - (v.witness_w->dot(p) + *v.witness_b));
            for (const auto& p : bset.points)
                t.gap(floor - -(v.witness_w->dot(p) + *v.witness_b));
            t.require(is_mutually_convexly_separable(a, bset).separable,
                      "linear separability did not imply mutual convex separability");
        }
        results.push_back(t.result("linear_split_witness", 1e-12));
    }

    {
        // Greedy cover: partitions its input, every cluster's hull stays
        // clear of the opposing set, and a shuffled insertion order is
        // equally valid.
        Tally t;
        for (int i = 0; i < 10; ++i) {
            const BinaryInstance inst = random_entangled_instance(rng, 2, 8);
            for (const auto seed : {std::optional<uint64_t>{}, std::optional<uint64_t>{i + 1}}) {
                const ConvexClusterCover cover =
                    greedy_convex_cover(inst.xneg, inst.xpos, kDefaultTol, seed);
                std::vector<int> seen(static_cast<size_t>(inst.xneg.size()), 0);
                for (const auto& cluster : cover.clusters)
                    for (int idx : cluster)
                        seen[static_cast<size_t>(idx)]++;
                t.require(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }),
                          "cover is not a partition");
                for (const auto& v : cover.verdicts)
                    t.require(v.separable, "cover cluster hull touches the opposing set");
            }
        }
        results.push_back(t.result("greedy_cover_validity", 0.0));
    }

    {
        // Constructed one-layer separators hit the +-1 margins exactly.  The
        // fault switch corrupts one output weight and must flip this red.
        Tally t;
        const int dims[] = {2, 3, 5};
        for (int i = 0; i < 20; ++i) {
            const BinaryInstance inst =
                random_convexly_separable_instance(rng, dims[i % 3], 10);
            Scrn1Model model = build_shl_separator(inst.xpos, inst.xneg);
            if (options.inject_fault && i == 0)
                model.A(0, 0) = std::abs(model.A(0, 0));
            for (const auto& p : inst.xpos.points)
                t.gap(std::abs(forward_scrn1(model, p)[0] - 1.0));
            for (const auto& q : inst.xneg.points)
                t.gap(forward_scrn1(model, q)[0] - -1.0);
        }
        results.push_back(t.result("construction_margins", 1e-9));
    }

    {
        // A negative point inside the positive hull must abort construction.
        Tally t;
        for (int i = 0; i < 20; ++i) {
            const BinaryInstance inst = random_interior_negative_instance(rng, 2 + (i % 2), 8);
            bool refused = false;
            try {
                build_shl_separator(inst.xpos, inst.xneg);
            } catch (const Error& e) {
                refused = e.code() == ErrorCode::not_convexly_separable;
            }
            t.require(refused, "construction accepted a hull-interior negative point");
        }
        results.push_back(t.result("interior_refusal", 0.0));
    }

    return results;
}

std::vector<PropertyResult> surrogate_suite(const SurrogateSuiteOptions& options) {
    std::mt19937_64 rng(options.seed);
    std::vector<PropertyResult> results;

    const auto random_dataset = [&](int dim, int per_side) {
        BinaryInstance inst;
        for (int i = 0; i < per_side; ++i) {
            inst.xpos.add(point_in_ball(dim, 2.0, rng));
            inst.xneg.add(point_in_ball(dim, 2.0, rng));
        }
        return inst;
    };

    {
        // One-layer training bound: dominates the true objective at random
        // probes and touches it at the anchor.
        Tally touch;
        Tally bound;
        const int n = 2, l = 3;
        const BinaryInstance inst = random_dataset(n, 6);
        const ObjectiveFn f = shl_objective(inst.xpos, inst.xneg, 1e-6, n, l);
        const SurrogateOracle oracle = shl_surrogate(inst.xpos, inst.xneg, 1e-6, n, l);
        const int count = shl_param_count(n, l);
        for (int a = 0; a < options.anchors; ++a) {
            Eigen::VectorXd theta0(count);
            for (int i = 0; i < count; ++i)
                theta0[i] = uniform(rng, -2.0, 2.0);
            const ConvexProblem g = oracle(theta0);
            touch.gap(std::abs(g.value(theta0) - f(theta0)) / (1.0 + std::abs(f(theta0))));
            for (int p = 0; p < options.probes; ++p) {
                Eigen::VectorXd probe = theta0;
                for (int i = 0; i < count; ++i)
                    probe[i] += uniform(rng, -2.0, 2.0);
                bound.gap(f(probe) - g.value(probe));
            }
        }
        results.push_back(touch.result("shl_surrogate_touch", 1e-12));
        results.push_back(bound.result("shl_surrogate_bound", 1e-9));
    }

    {
        // Same contract for the first-layer bound of the two-layer trainer.
        Tally touch;
        Tally bound;
        const int n = 2, l1 = 3, l2 = 2;
        const BinaryInstance inst = random_dataset(n, 5);
        CanonicalThl fixed;
        fixed.b0 = uniform(rng, -1.0, 1.0);
        fixed.W1 = Eigen::MatrixXd::Zero(n, l1); // shapes only; theta carries the values
        fixed.b1 = Eigen::VectorXd::Zero(l1);
        fixed.W2 = Eigen::MatrixXd(l1, l2);
        for (int i = 0; i < l1; ++i)
            for (int j = 0; j < l2; ++j)
                fixed.W2(i, j) = -std::abs(uniform(rng, 0.0, 1.5));
        fixed.b2 = Eigen::VectorXd(l2);
        for (int j = 0; j < l2; ++j)
            fixed.b2[j] = uniform(rng, -1.0, 1.0);

        const ObjectiveFn f = thl_first_layer_objective(inst.xpos, inst.xneg, fixed, 1e-6);
        const SurrogateOracle oracle =
            thl_first_layer_surrogate(inst.xpos, inst.xneg, fixed, 1e-6);
        const int count = n * l1 + l1;
        for (int a = 0; a < std::max(10, options.anchors / 5); ++a) {
            Eigen::VectorXd theta0(count);
            for (int i = 0; i < count; ++i)
                theta0[i] = uniform(rng, -2.0, 2.0);
            const ConvexProblem g = oracle(theta0);
            touch.gap(std::abs(g.value(theta0) - f(theta0)) / (1.0 + std::abs(f(theta0))));
            for (int p = 0; p < std::max(10, options.probes / 5); ++p) {
                Eigen::VectorXd probe = theta0;
                for (int i = 0; i < count; ++i)
                    probe[i] += uniform(rng, -2.0, 2.0);
                bound.gap(f(probe) - g.value(probe));
            }
        }
        results.push_back(touch.result("first_layer_surrogate_touch", 1e-12));
        results.push_back(bound.result("first_layer_surrogate_bound", 1e-9));
    }

    {
        // Pattern-frozen score bounds bracket the true score for arbitrary
        // binary patterns and collapse to it at the point's own patterns.
        Tally t;
        for (int trial = 0; trial < options.sandwich_trials; ++trial) {
            const int n = uniform_int(rng, 2, 3);
            const int l1 = uniform_int(rng, 2, 4);
            const int l2 = uniform_int(rng, 1, 3);
            CanonicalThl m;
            m.b0 = uniform(rng, -1.0, 1.0);
            m.W1 = Eigen::MatrixXd(n, l1);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < l1; ++j)
                    m.W1(i, j) = uniform(rng, -1.5, 1.5);
            m.b1 = Eigen::VectorXd(l1);
            for (int j = 0; j < l1; ++j)
                m.b1[j] = uniform(rng, -1.0, 1.0);
            m.W2 = Eigen::MatrixXd(l1, l2);
            for (int i = 0; i < l1; ++i)
                for (int j = 0; j < l2; ++j)
                    m.W2(i, j) = -std::abs(uniform(rng, 0.0, 1.5));
            m.b2 = Eigen::VectorXd(l2);
            for (int j = 0; j < l2; ++j)
                m.b2[j] = uniform(rng, -1.0, 1.0);

            const Eigen::VectorXd x = point_in_ball(n, 2.0, rng);
            ActiveSet a1, a2;
            for (int i = 0; i < l1; ++i)
                if (uniform(rng, 0.0, 1.0) < 0.5)
                    a1.push_back(i);
            for (int j = 0; j < l2; ++j)
                if (uniform(rng, 0.0, 1.0) < 0.5)
                    a2.push_back(j);

            const double f = forward_canonical_thl(m, x);
            const double scale = 1.0 + std::abs(f);
            const ThlBounds b = thl_bounds(m, x, a1, a2);
            t.gap((b.lower - f) / scale);
            t.gap((f - b.upper) / scale);

            const ActiveSet own1 = active_set(m.W1, m.b1, x);
            const ActiveSet own2 =
                active_set(m.W2, m.b2, relu(m.W1.transpose() * x + m.b1));
            const ThlBounds tight = thl_bounds(m, x, own1, own2);
            t.gap(std::abs(tight.lower - f) / scale);
            t.gap(std::abs(tight.upper - f) / scale);
        }
        results.push_back(t.result("score_bounds_sandwich", 1e-12));
    }

    {
        // Chord tests: outputs concave in the input, in the first hidden
        // activation, and in the hidden parameters.
        Tally t;
        for (int trial = 0; trial < options.concavity_segments; ++trial) {
            const int n = uniform_int(rng, 2, 3);
            const int l = uniform_int(rng, 2, 4);
            const int outs = uniform_int(rng, 1, 2);
            Scrn1Model m;
            m.hidden.W = Eigen::MatrixXd(n, l);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < l; ++j)
                    m.hidden.W(i, j) = uniform(rng, -1.5, 1.5);
            m.hidden.b = Eigen::VectorXd(l);
            for (int j = 0; j < l; ++j)
                m.hidden.b[j] = uniform(rng, -1.0, 1.0);
            m.A = Eigen::MatrixXd(l, outs);
            for (int i = 0; i < l; ++i)
                for (int j = 0; j < outs; ++j)
                    m.A(i, j) = -std::abs(uniform(rng, 0.0, 1.5));
            m.c = Eigen::VectorXd(outs);
            for (int j = 0; j < outs; ++j)
                m.c[j] = uniform(rng, -1.0, 1.0);

            const int out = uniform_int(rng, 0, outs - 1);
            const int mode = trial % 3;
            if (mode == 0) {
                const Eigen::VectorXd x0 = point_in_ball(n, 2.0, rng);
                const Eigen::VectorXd x1 = point_in_ball(n, 2.0, rng);
                const auto f = [&](const Eigen::VectorXd& x) {
                    return forward_scrn1(m, x)[out];
                };
                const double scale =
                    1.0 + std::max(std::abs(f(x0)), std::abs(f(x1)));
                t.gap(concavity_probe(f, x0, x1, 7) / scale);
            } else if (mode == 1) {
                // Second stage of a two-layer net as a function of the first
                // hidden activation; reuse the generated shapes as layer two.
                const auto f = [&](const Eigen::VectorXd& z1) {
                    return (m.A.transpose() * relu(m.hidden.W.transpose() * z1 + m.hidden.b) +
                            m.c)(out);
                };
                const Eigen::VectorXd z0 = point_in_ball(n, 2.0, rng);
                const Eigen::VectorXd z1 = point_in_ball(n, 2.0, rng);
                const double scale =
                    1.0 + std::max(std::abs(f(z0)), std::abs(f(z1)));
                t.gap(concavity_probe(f, z0, z1, 7) / scale);
            } else {
                // Concavity in (W, b) for a fixed input.
                const Eigen::VectorXd x = point_in_ball(n, 2.0, rng);
                const auto f = [&](const Eigen::VectorXd& theta) {
                    const Eigen::MatrixXd W =
                        Eigen::Map<const Eigen::MatrixXd>(theta.data(), n, l);
                    const Eigen::VectorXd b = theta.tail(l);
                    return (m.A.col(out).transpose() * relu(W.transpose() * x + b))(0) +
                           m.c[out];
                };
                Eigen::VectorXd t0(n * l + l), t1(n * l + l);
                for (int i = 0; i < t0.size(); ++i) {
                    t0[i] = uniform(rng, -1.5, 1.5);
                    t1[i] = uniform(rng, -1.5, 1.5);
                }
                const double scale =
                    1.0 + std::max(std::abs(f(t0)), std::abs(f(t1)));
                t.gap(concavity_probe(f, t0, t1, 7) / scale);
            }
        }
        results.push_back(t.result("concavity_probes", 1e-9));
    }

    return results;
}

std::vector<PropertyResult> descent_suite(const DescentSuiteOptions& options) {
    std::mt19937_64 rng(options.seed);
    std::vector<PropertyResult> results;

    const auto self_oracle = [](const ObjectiveFn& f, const SubgradientFn& g) {
        return [f, g](const Eigen::VectorXd&) { return ConvexProblem{f, g}; };
    };
    const auto check_monotone = [](const MmTrace& trace, Tally& t) {
        for (size_t i = 1; i < trace.iterations.size(); ++i)
            t.gap(trace.iterations[i].objective - trace.iterations[i - 1].objective);
    };

    {
        // A convex objective used as its own surrogate must find its minimum.
        Tally t;
        const ObjectiveFn f = [](const Eigen::VectorXd& x) {
            return (x[0] - 3.0) * (x[0] - 3.0);
        };
        const SubgradientFn g = [](const Eigen::VectorXd& x) {
            return Eigen::VectorXd::Constant(1, 2.0 * (x[0] - 3.0));
        };
        const MmResult res = mm_minimize(f, self_oracle(f, g), Eigen::VectorXd::Zero(1));
        t.require(res.trace.converged, "quadratic run did not converge");
        t.gap(std::abs(res.x[0] - 3.0));
        check_monotone(res.trace, t);
        results.push_back(t.result("quadratic_self_surrogate", 1e-3));
    }

    {
        Tally t;
        const ObjectiveFn f = [](const Eigen::VectorXd& x) { return std::abs(x[0]); };
        const SubgradientFn g = [](const Eigen::VectorXd& x) {
            return Eigen::VectorXd::Constant(1, x[0] > 0.0 ? 1.0 : (x[0] < 0.0 ? -1.0 : 0.0));
        };
        const MmResult res =
            mm_minimize(f, self_oracle(f, g), Eigen::VectorXd::Constant(1, 2.0));
        t.gap(std::abs(res.x[0]));
        check_monotone(res.trace, t);
        results.push_back(t.result("absolute_value_self_surrogate", 1e-2));
    }

    {
        // Constrained minimum on the boundary: distance-to-1 over x <= 0.
        Tally t;
        const ConvexProblem p{
            [](const Eigen::VectorXd& x) { return std::abs(x[0] - 1.0); },
            [](const Eigen::VectorXd& x) {
                return Eigen::VectorXd::Constant(1, x[0] > 1.0 ? 1.0 : -1.0);
            }};
        const ProjectionFn proj = [](const Eigen::VectorXd& x) {
            return Eigen::VectorXd(x.cwiseMin(0.0));
        };
        const Eigen::VectorXd x = solve_convex(p, Eigen::VectorXd::Constant(1, -1.0), proj);
        t.gap(std::abs(x[0]));
        results.push_back(t.result("projected_boundary_minimum", 1e-12));
    }

    {
        // The inner solver never hands back something worse than its warm
        // start, however bad the conditioning.
        Tally t;
        for (int i = 0; i < 50; ++i) {
            const int n = 5;
            Eigen::MatrixXd g(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c)
                    g(r, c) = uniform(rng, -2.0, 2.0);
            const Eigen::MatrixXd M = g.transpose() * g;
            Eigen::VectorXd center(n), warm(n);
            for (int k = 0; k < n; ++k) {
                center[k] = uniform(rng, -3.0, 3.0);
                warm[k] = uniform(rng, -3.0, 3.0);
            }
            const ConvexProblem p{
                [M, center](const Eigen::VectorXd& x) {
                    return ((x - center).transpose() * M * (x - center))(0);
                },
                [M, center](const Eigen::VectorXd& x) {
                    return Eigen::VectorXd(2.0 * M * (x - center));
                }};
            const Eigen::VectorXd out = solve_convex(p, warm);
            t.gap(p.value(out) - p.value(warm));
        }
        results.push_back(t.result("warm_start_never_worse", 0.0));
    }

    {
        Tally t;
        const ProjectionFn proj = nonpositive_w2_projection(3, 2);
        for (int i = 0; i < 100; ++i) {
            Eigen::VectorXd v(1 + 3 * 2 + 2);
            for (int k = 0; k < v.size(); ++k)
                v[k] = uniform(rng, -2.0, 2.0);
            const Eigen::VectorXd once = proj(v);
            t.gap((proj(once) - once).norm());
            t.gap(once.segment(1, 6).maxCoeff());
        }
        results.push_back(t.result("projection_idempotent", 0.0));
    }

    {
        // End-to-end single-layer training on the parity instance.
        Tally t;
        const LabeledDataset xr = gen_xor();
        TrainConfig config;
        config.hidden = 2;
        config.seed = 0;
        const auto [model, trace] = train_shl(xr.class_points(0), xr.class_points(1), config);
        check_monotone(trace, t);
        const LossReport report =
            hinge_objective(model, xr.class_points(0), xr.class_points(1), config.lambda);
        t.require(report.accuracy == 1.0, "parity instance not fit exactly");
        results.push_back(t.result("parity_training_descent", 1e-9));
    }

    {
        // Two-layer training from the constructed separator stays monotone
        // and keeps the rings split.
        Tally t;
        const LabeledDataset rings = gen_rings(8, 8, 1.0, 3.0, true, 0);
        TrainConfig config;
        config.init = InitKind::constructive;
        config.max_outer = 10;
        const auto [model, trace] =
            train_thl(rings.class_points(0), rings.class_points(1), config);
        check_monotone(trace, t);
        t.gap(trace.iterations.back().objective - trace.iterations.front().objective);
        const LossReport report = hinge_objective(model, rings.class_points(0),
                                                  rings.class_points(1), config.lambda);
        t.require(report.accuracy == 1.0, "rings no longer split after training");
        results.push_back(t.result("rings_training_descent", 1e-9));
    }

    return results;
}

} // namespace scrn
