#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "scrn/verify.hpp"

using namespace scrn;

namespace {

const PropertyResult* find(const std::vector<PropertyResult>& rs, const std::string& name) {
    for (const auto& r : rs)
        if (r.name == name)
            return &r;
    return nullptr;
}

} // namespace

TEST_CASE("brute-force hull distance agrees with closed forms") {
    PointSet diamond;
    diamond.add(vec2(2, 0));
    diamond.add(vec2(0, 2));
    diamond.add(vec2(-2, 0));
    diamond.add(vec2(0, -2));
    // The grid walk accumulates a little backtracking roundoff, so exact
    // answers come back with ~1e-11 of noise; its contract is only 1e-3.
    CHECK(std::abs(bruteforce_hull_distance(vec2(3, 0), diamond) - 1.0) <= 1e-9);
    CHECK(bruteforce_hull_distance(vec2(0, 0), diamond) <= 1e-9); // interior point on the grid

    PointSet segment;
    segment.add(vec2(0, 0));
    segment.add(vec2(1, 1));
    // The optimal coefficient 1/2 lies exactly on the default grid.
    CHECK(bruteforce_hull_distance(vec2(0, 1), segment) ==
          doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));

    PointSet big;
    for (int i = 0; i < 5; ++i)
        big.add(vec2(i, 0));
    CHECK(error_code_of([&] { bruteforce_hull_distance(vec2(0, 0), big); }) ==
          ErrorCode::config_error);
}

TEST_CASE("finer grids can only improve the brute-force distance") {
    PointSet tri;
    tri.add(vec2(0, 0));
    tri.add(vec2(2, 0.3));
    tri.add(vec2(1, 1.7));
    const Eigen::VectorXd q = vec2(2.5, 2.5);
    const double coarse = bruteforce_hull_distance(q, tri, 20);
    const double fine = bruteforce_hull_distance(q, tri, 200);
    CHECK(fine <= coarse + 1e-9);
    CHECK(fine >= hull_distance(q, tri).distance - 1e-9);
}

TEST_CASE("generated separable instances honour their margin promise") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 15; ++trial) {
        const int dim = 2 + trial % 3;
        const BinaryInstance inst = random_convexly_separable_instance(rng, dim, 10);
        REQUIRE(inst.xpos.size() >= 2);
        REQUIRE(inst.xneg.size() >= 1);
        CHECK(inst.xpos.dim() == dim);
        CHECK(inst.xneg.dim() == dim);
        CHECK(inst.xpos.size() <= 10);
        CHECK(inst.xneg.size() <= 10);
        for (const auto& x : inst.xneg.points)
            CHECK(hull_distance(x, inst.xpos).distance > 1e-3);
    }
}

TEST_CASE("interior-negative instances really contain an interior negative") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 15; ++trial) {
        const BinaryInstance inst = random_interior_negative_instance(rng, 2 + trial % 3, 10);
        double closest = std::numeric_limits<double>::infinity();
        for (const auto& x : inst.xneg.points)
            closest = std::min(closest, hull_distance(x, inst.xpos).distance);
        CHECK(closest <= kDefaultTol);
    }
}

TEST_CASE("entangled instances are disjoint but not mutually separable") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const BinaryInstance inst = random_entangled_instance(rng, 2, 6);
        CHECK_FALSE(is_mutually_convexly_separable(inst.xpos, inst.xneg).separable);
        for (const auto& a : inst.xpos.points)
            for (const auto& b : inst.xneg.points)
                CHECK((a - b).norm() > 1e-3);
    }
}

TEST_CASE("the geometry suite passes and covers its property list") {
    GeometrySuiteOptions options;
    options.bruteforce_instances = 25;
    options.random_instances = 25;
    const auto results = geometry_suite(options);

    for (const char* name :
         {"frozen_projections", "bruteforce_agreement", "rigid_invariance",
          "linear_split_witness", "greedy_cover_validity", "construction_margins",
          "interior_refusal"}) {
        const PropertyResult* r = find(results, name);
        REQUIRE_MESSAGE(r != nullptr, name);
        CHECK_MESSAGE(r->pass, name << ": " << r->detail);
    }
}

TEST_CASE("an injected fault trips the construction check") {
    GeometrySuiteOptions options;
    options.bruteforce_instances = 5;
    options.random_instances = 5;
    options.inject_fault = true;
    const auto results = geometry_suite(options);
    const PropertyResult* r = find(results, "construction_margins");
    REQUIRE(r != nullptr);
    CHECK_FALSE(r->pass); // the harness must notice a corrupted model
}

TEST_CASE("the surrogate suite passes at reduced size") {
    SurrogateSuiteOptions options;
    options.anchors = 10;
    options.probes = 10;
    options.sandwich_trials = 60;
    options.concavity_segments = 45;
    const auto results = surrogate_suite(options);

    for (const char* name :
         {"shl_surrogate_touch", "shl_surrogate_bound", "first_layer_surrogate_touch",
          "first_layer_surrogate_bound", "score_bounds_sandwich", "concavity_probes"}) {
        const PropertyResult* r = find(results, name);
        REQUIRE_MESSAGE(r != nullptr, name);
        CHECK_MESSAGE(r->pass, name << ": " << r->detail);
    }
}

TEST_CASE("the descent suite passes end to end") {
    const auto results = descent_suite({});
    REQUIRE(!results.empty());
    for (const auto& r : results)
        CHECK_MESSAGE(r.pass, r.name << ": " << r.detail);

    for (const char* name : {"quadratic_self_surrogate", "absolute_value_self_surrogate",
                             "projected_boundary_minimum", "warm_start_never_worse",
                             "projection_idempotent", "parity_training_descent",
                             "rings_training_descent"})
        CHECK_MESSAGE(find(results, name) != nullptr, name);
}

TEST_CASE("suite runs are reproducible for a fixed seed") {
    GeometrySuiteOptions options;
    options.seed = 5;
    options.bruteforce_instances = 10;
    options.random_instances = 10;
    const auto a = geometry_suite(options);
    const auto b = geometry_suite(options);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].name == b[i].name);
        CHECK(a[i].pass == b[i].pass);
        CHECK(a[i].worst == b[i].worst);
    }
}
