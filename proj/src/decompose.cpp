#include "scrn/decompose.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "scrn/construct.hpp"

namespace scrn {

namespace {

std::string fmt_double(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void require_single_output(int outputs) {
    if (outputs != 1)
        fail(ErrorCode::dimension_mismatch,
             "decomposition expects a single-output separator, got " + std::to_string(outputs) +
                 " outputs");
}

void verify_separates(const std::function<double(const Eigen::VectorXd&)>& f, const PointSet& xpos,
                      const PointSet& xneg) {
    if (xpos.empty() || xneg.empty())
        fail(ErrorCode::empty_set, "decomposition needs nonempty point sets");
    for (int i = 0; i < xpos.size(); ++i) {
        const double v = f(xpos[i]);
        if (!(v > 0.0))
            fail(ErrorCode::model_does_not_separate,
                 "positive point " + std::to_string(i) + " scores " + fmt_double(v));
    }
    for (int i = 0; i < xneg.size(); ++i) {
        const double v = f(xneg[i]);
        if (!(v < 0.0))
            fail(ErrorCode::model_does_not_separate,
                 "negative point " + std::to_string(i) + " scores " + fmt_double(v));
    }
}

// Deterministic grouping: map keys sort patterns lexicographically, members
// keep ascending point order.
std::map<ActiveSet, std::vector<int>>
group_by_pattern(const PointSet& xneg,
                 const std::function<ActiveSet(const Eigen::VectorXd&)>& pattern) {
    std::map<ActiveSet, std::vector<int>> groups;
    for (int i = 0; i < xneg.size(); ++i) {
        ActiveSet key = pattern(xneg[i]);
        if (key.empty())
            fail(ErrorCode::internal_error,
                 "negative point " + std::to_string(i) +
                     " has no active nodes despite a negative score");
        groups[std::move(key)].push_back(i);
    }
    return groups;
}

} // namespace

ShlDecomposition shl_decompose(const Scrn1Model& model, const PointSet& xpos,
                               const PointSet& xneg) {
    validate(model);
    require_single_output(model.output_dim());
    verify_separates([&](const Eigen::VectorXd& x) { return forward_scrn1(model, x)[0]; }, xpos,
                     xneg);

    const auto groups = group_by_pattern(xneg, [&](const Eigen::VectorXd& x) {
        return active_set(model.hidden.W, model.hidden.b, x);
    });

    ShlDecomposition out;
    for (const auto& [pattern, members] : groups) {
        if (static_cast<int>(out.subsets.size()) >= kMaxActiveSets) {
            out.truncated = true;
            break;
        }
        ShlSubset s;
        s.active_set = pattern;
        s.members = members;
        s.separator.w = Eigen::VectorXd::Zero(model.input_dim());
        s.separator.b = model.c[0];
        for (int k : pattern) {
            s.separator.w += model.A(k, 0) * model.hidden.W.col(k);
            s.separator.b += model.A(k, 0) * model.hidden.b[k];
        }

        s.min_positive_margin = std::numeric_limits<double>::infinity();
        for (const auto& p : xpos.points)
            s.min_positive_margin = std::min(s.min_positive_margin, s.separator.value(p));
        s.max_negative_margin = -std::numeric_limits<double>::infinity();
        for (int i : s.members)
            s.max_negative_margin = std::max(s.max_negative_margin, s.separator.value(xneg[i]));
        s.verified = s.min_positive_margin > 0.0 && s.max_negative_margin < 0.0;
        out.subsets.push_back(std::move(s));
    }

    size_t covered = 0;
    for (const auto& s : out.subsets)
        covered += s.members.size();
    out.coverage_ok = !out.truncated && covered == static_cast<size_t>(xneg.size());
    return out;
}

ThlDecomposition thl_decompose(const Scrn2Model& model, const PointSet& xpos, const PointSet& xneg,
                               double tol) {
    validate(model);
    require_single_output(model.output_dim());
    verify_separates([&](const Eigen::VectorXd& x) { return forward_scrn2(model, x)[0]; }, xpos,
                     xneg);

    const auto layer1_out = [&](const Eigen::VectorXd& x) {
        return relu(model.layer1.W.transpose() * x + model.layer1.b);
    };
    const auto groups = group_by_pattern(xneg, [&](const Eigen::VectorXd& x) {
        return active_set(model.layer2.W, model.layer2.b, layer1_out(x));
    });

    ThlDecomposition out;
    for (const auto& [pattern, members] : groups) {
        if (static_cast<int>(out.subsets.size()) >= kMaxActiveSets) {
            out.truncated = true;
            break;
        }
        ThlSubset s;
        s.active_set = pattern;
        s.members = members;
        s.a_hat = Eigen::VectorXd::Zero(model.hidden1_dim());
        s.c_hat = model.c[0];
        for (int j : pattern) {
            s.a_hat += model.A(j, 0) * model.layer2.W.col(j);
            s.c_hat += model.A(j, 0) * model.layer2.b[j];
        }

        const auto restricted = [&](const Eigen::VectorXd& x) {
            return s.a_hat.dot(layer1_out(x)) + s.c_hat;
        };
        s.min_positive_margin = std::numeric_limits<double>::infinity();
        for (const auto& p : xpos.points)
            s.min_positive_margin = std::min(s.min_positive_margin, restricted(p));
        s.max_negative_margin = -std::numeric_limits<double>::infinity();
        for (int i : s.members)
            s.max_negative_margin = std::max(s.max_negative_margin, restricted(xneg[i]));
        s.verified = s.min_positive_margin > 0.0 && s.max_negative_margin < 0.0;

        PointSet subset;
        for (int i : s.members)
            subset.add(xneg[i]);
        s.hull_clear = is_convexly_separable(subset, xpos, tol);
        out.subsets.push_back(std::move(s));
    }

    size_t covered = 0;
    for (const auto& s : out.subsets)
        covered += s.members.size();
    out.coverage_ok = !out.truncated && covered == static_cast<size_t>(xneg.size());
    return out;
}

DrillDownReport full_drill_down(const Scrn2Model& model, const PointSet& xpos,
                                const PointSet& xneg, double tol) {
    const ThlDecomposition stage1 = thl_decompose(model, xpos, xneg, tol);

    DrillDownReport report;
    report.coverage_ok = stage1.coverage_ok;
    for (const auto& s : stage1.subsets) {
        DrillBranch branch;
        branch.active_set = s.active_set;
        branch.neg_members = s.members;

        PointSet subset;
        for (int i : s.members)
            subset.add(xneg[i]);

        // The subset's hull avoids the positives, so a one-layer separator
        // with the subset on the positive side exists; its patterns then
        // split the original positive set with affine leaves.
        ConstructOptions options;
        options.tol = tol;
        const Scrn1Model unit = build_shl_separator(subset, xpos, options);
        const ShlDecomposition stage2 = shl_decompose(unit, subset, xpos);
        report.coverage_ok = report.coverage_ok && stage2.coverage_ok;

        for (const auto& leaf : stage2.subsets) {
            DrillLeaf l;
            l.active_set = leaf.active_set;
            l.pos_members = leaf.members;
            l.separator = leaf.separator;
            l.verified = leaf.verified;
            branch.leaves.push_back(std::move(l));
        }
        report.branches.push_back(std::move(branch));
    }
    return report;
}

} // namespace scrn
