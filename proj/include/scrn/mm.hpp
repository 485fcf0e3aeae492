#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "scrn/errors.hpp"

namespace scrn {

using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;
using SubgradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using ProjectionFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// A convex function handed to the inner solver: value plus one subgradient.
struct ConvexProblem {
    ObjectiveFn value;
    SubgradientFn subgradient;
};

// Builds the convex upper bound anchored at the given point.  The returned
// problem must dominate the true objective everywhere and touch it at the
// anchor; the driver spot-checks both and the training code derives its
// oracles so the bound holds by construction.
using SurrogateOracle = std::function<ConvexProblem(const Eigen::VectorXd& anchor)>;

struct MmConfig {
    double ftol = 1e-8;   // stop when the objective improves less than this
    int max_outer = 100;
    int inner_budget = 2000;
    ProjectionFn projection; // optional; identity when empty
};

struct MmIteration {
    double objective = 0.0;     // true objective at this iterate
    double surrogate_min = 0.0; // value reached by the inner solve (nan on the final row)
    double time_ms = 0.0;       // cumulative wall time; zeroed in exported artifacts
};

struct MmTrace {
    std::vector<MmIteration> iterations;
    bool converged = false;
    std::string stop_reason;

    // Header iteration,objective,surrogate_min,time_ms.  Wall times are
    // excluded by default so repeated runs produce identical bytes.
    std::string to_csv(bool include_times = false) const;
};

struct MmResult {
    Eigen::VectorXd x;
    MmTrace trace;
};

// Majorize-minimize: repeatedly minimize the surrogate anchored at the
// current iterate.  Inner solves are approximate, but solve_convex never
// returns a point worse than its warm start, so the objective sequence is
// monotone regardless; any increase beyond 1e-9 reports a defect instead of
// being papered over.
MmResult mm_minimize(const ObjectiveFn& objective, const SurrogateOracle& oracle,
                     const Eigen::VectorXd& x0, const MmConfig& config = {});

// Projected subgradient with step eta0/sqrt(t+1), eta0 = 0.1/(1+|g(start)|).
// Tracks the best feasible iterate and falls back to the (projected) warm
// start, so the returned value never exceeds the warm start's.
Eigen::VectorXd solve_convex(const ConvexProblem& problem, const Eigen::VectorXd& x_warm,
                             const ProjectionFn& projection = {}, int budget = 2000);

// Diagnostic: how badly the surrogate fails to dominate f over the probes,
// and how far it sits from f at the anchor (both should be ~0).
struct SurrogateCheck {
    double max_bound_gap = 0.0; // max over probes of f(p) - g(p)
    double touch_gap = 0.0;     // |f(anchor) - g(anchor)|
};

SurrogateCheck verify_surrogate(const SurrogateOracle& oracle, const ObjectiveFn& f,
                                const Eigen::VectorXd& anchor,
                                const std::vector<Eigen::VectorXd>& probes);

} // namespace scrn
