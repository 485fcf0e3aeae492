#include "scrn/mm.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace scrn {

namespace {

constexpr double kDescentSlack = 1e-9;

double checked_value(const ObjectiveFn& f, const Eigen::VectorXd& x, const char* what) {
    const double v = f(x);
    if (!std::isfinite(v))
        fail(ErrorCode::non_finite, std::string(what) + " returned a non-finite value");
    return v;
}

std::string shortest_repr(double v) {
    if (std::isnan(v))
        return "nan";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

std::string MmTrace::to_csv(bool include_times) const {
    std::ostringstream os;
    os << "iteration,objective,surrogate_min,time_ms\n";
    for (size_t i = 0; i < iterations.size(); ++i) {
        const MmIteration& it = iterations[i];
        os << i << ',' << shortest_repr(it.objective) << ',' << shortest_repr(it.surrogate_min)
           << ',' << shortest_repr(include_times ? it.time_ms : 0.0) << '\n';
    }
    return os.str();
}

Eigen::VectorXd solve_convex(const ConvexProblem& problem, const Eigen::VectorXd& x_warm,
                             const ProjectionFn& projection, int budget) {
    if (budget < 0)
        fail(ErrorCode::config_error, "inner budget must be nonnegative");
    const auto project = [&](const Eigen::VectorXd& x) {
        return projection ? projection(x) : x;
    };

    Eigen::VectorXd x = project(x_warm);
    Eigen::VectorXd best_x = x;
    double best_val = checked_value(problem.value, x, "convex objective");

    Eigen::VectorXd g = problem.subgradient(x);
    if (!g.allFinite())
        fail(ErrorCode::non_finite, "subgradient is non-finite at the warm start");
    const double eta0 = 0.1 / (1.0 + g.norm());

    for (int t = 0; t < budget; ++t) {
        if (g.squaredNorm() == 0.0)
            break; // stationary: for a convex function this is a minimizer
        x = project(x - (eta0 / std::sqrt(static_cast<double>(t) + 1.0)) * g);
        const double v = checked_value(problem.value, x, "convex objective");
        if (v < best_val) {
            best_val = v;
            best_x = x;
        }
        if (t + 1 < budget) {
            g = problem.subgradient(x);
            if (!g.allFinite())
                fail(ErrorCode::non_finite, "subgradient is non-finite");
        }
    }
    return best_x;
}

MmResult mm_minimize(const ObjectiveFn& objective, const SurrogateOracle& oracle,
                     const Eigen::VectorXd& x0, const MmConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const auto elapsed_ms = [&] {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    };

    Eigen::VectorXd x = config.projection ? config.projection(x0) : x0;
    double fx = checked_value(objective, x, "objective");

    // Cheap sanity pass on the oracle contract before trusting it for the
    // whole run: exact touch at the anchor, domination at a nearby probe.
    {
        const ConvexProblem g0 = oracle(x);
        const double gx = checked_value(g0.value, x, "surrogate");
        if (std::abs(gx - fx) > 1e-9 * (1.0 + std::abs(fx)))
            fail(ErrorCode::descent_violation,
                 "surrogate does not touch the objective at the anchor");
        Eigen::VectorXd probe = x;
        if (probe.size() > 0)
            probe[0] += 0.25;
        if (checked_value(g0.value, probe, "surrogate") <
            checked_value(objective, probe, "objective") - 1e-9)
            fail(ErrorCode::descent_violation,
                 "surrogate fails to dominate the objective near the anchor");
    }

    MmResult out;
    out.trace.stop_reason = "max_outer";
    for (int l = 0; l < config.max_outer; ++l) {
        const ConvexProblem g = oracle(x);
        const Eigen::VectorXd x_next =
            solve_convex(g, x, config.projection, config.inner_budget);
        const double surrogate_min = checked_value(g.value, x_next, "surrogate");
        const double fx_next = checked_value(objective, x_next, "objective");

        if (fx_next > fx + kDescentSlack)
            fail(ErrorCode::descent_violation,
                 "objective rose from " + std::to_string(fx) + " to " + std::to_string(fx_next));

        out.trace.iterations.push_back({fx, surrogate_min, elapsed_ms()});
        const double drop = fx - fx_next;
        x = x_next;
        fx = fx_next;
        if (drop < config.ftol) {
            out.trace.converged = true;
            out.trace.stop_reason = "ftol";
            break;
        }
    }
    out.trace.iterations.push_back(
        {fx, std::numeric_limits<double>::quiet_NaN(), elapsed_ms()});
    out.x = x;
    return out;
}

SurrogateCheck verify_surrogate(const SurrogateOracle& oracle, const ObjectiveFn& f,
                                const Eigen::VectorXd& anchor,
                                const std::vector<Eigen::VectorXd>& probes) {
    const ConvexProblem g = oracle(anchor);
    SurrogateCheck out;
    out.touch_gap = std::abs(checked_value(f, anchor, "objective") -
                             checked_value(g.value, anchor, "surrogate"));
    out.max_bound_gap = -std::numeric_limits<double>::infinity();
    for (const auto& p : probes)
        out.max_bound_gap = std::max(out.max_bound_gap, checked_value(f, p, "objective") -
                                                            checked_value(g.value, p, "surrogate"));
    if (probes.empty())
        out.max_bound_gap = 0.0;
    return out;
}

} // namespace scrn
