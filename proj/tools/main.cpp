#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "scrn/construct.hpp"
#include "scrn/data.hpp"
#include "scrn/decompose.hpp"
#include "scrn/errors.hpp"
#include "scrn/geometry.hpp"
#include "scrn/network.hpp"
#include "scrn/train.hpp"
#include "scrn/verify.hpp"

using nlohmann::ordered_json;

namespace {

using namespace scrn;

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::config_error:
    case ErrorCode::parse_error:
    case ErrorCode::io_error:
        return 2;
    case ErrorCode::descent_violation:
    case ErrorCode::non_finite:
    case ErrorCode::internal_error:
        return 3;
    default:
        return 1; // domain failure (inseparable data, bad pairing, ...)
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorCode::io_error, "cannot open " + path + " for writing");
    out << content;
    if (!out)
        fail(ErrorCode::io_error, "failed writing " + path);
}

ordered_json vector_json(const Eigen::VectorXd& v) {
    ordered_json arr = ordered_json::array();
    for (int i = 0; i < v.size(); ++i)
        arr.push_back(v[i]);
    return arr;
}

ordered_json verdict_json(const SeparabilityVerdict& v) {
    ordered_json j;
    j["separable"] = v.separable;
    j["distance"] = v.distance;
    if (v.witness_w) {
        j["witness"] = {{"w", vector_json(*v.witness_w)}, {"b", *v.witness_b}};
    }
    return j;
}

// Margin summary for a one-output separator: f on the positive side should
// sit at +1, on the negative side at or below -1.
ordered_json binary_margin_json(const std::function<double(const Eigen::VectorXd&)>& f,
                                const PointSet& xpos, const PointSet& xneg) {
    ordered_json pos = ordered_json::array(), neg = ordered_json::array();
    double pos_min = std::numeric_limits<double>::infinity();
    double neg_max = -std::numeric_limits<double>::infinity();
    for (const auto& p : xpos.points) {
        const double v = f(p);
        pos.push_back(v);
        pos_min = std::min(pos_min, v);
    }
    for (const auto& q : xneg.points) {
        const double v = f(q);
        neg.push_back(v);
        neg_max = std::max(neg_max, v);
    }
    ordered_json j;
    j["positive_min"] = pos_min;
    j["negative_max"] = neg_max;
    j["positive_scores"] = pos;
    j["negative_scores"] = neg;
    return j;
}

ordered_json multiclass_margin_json(const Scrn1Model& model,
                                    const std::vector<PointSet>& classes) {
    ordered_json per_class = ordered_json::array();
    for (size_t k = 0; k < classes.size(); ++k) {
        double on_min = std::numeric_limits<double>::infinity();
        double off_max = -std::numeric_limits<double>::infinity();
        for (size_t c = 0; c < classes.size(); ++c)
            for (const auto& p : classes[c].points) {
                const double y = forward_scrn1(model, p)[static_cast<int>(k)];
                if (c == k)
                    on_min = std::min(on_min, y);
                else
                    off_max = std::max(off_max, y);
            }
        per_class.push_back({{"class", k}, {"on_class_min", on_min}, {"off_class_max", off_max}});
    }
    return per_class;
}

struct GenOptions {
    std::string kind;
    std::string out;
    int inner = 8, outer = 8;
    double rin = 1.0, rout = 3.0;
    bool center = true;
    double jitter = 0.0;
    int classes = 3, dim = 2, per_class = 20;
    double separation = 4.0;
    uint64_t seed = 0;
};

int cmd_gen(const GenOptions& o) {
    LabeledDataset data;
    if (o.kind == "xor")
        data = gen_xor();
    else if (o.kind == "rings")
        data = gen_rings(o.inner, o.outer, o.rin, o.rout, o.center, o.seed, o.jitter);
    else
        data = gen_polytope_blobs(o.classes, o.dim, o.per_class, o.separation, o.seed);
    save_csv(data, o.out);

    const auto classes = data.split_by_class();
    ordered_json pairs = ordered_json::array();
    const auto linear = pairwise_verdicts(classes, PairwiseMode::linear);
    const auto mutual = pairwise_verdicts(classes, PairwiseMode::mutual_convex);
    for (size_t i = 0; i < classes.size(); ++i)
        for (size_t j = i + 1; j < classes.size(); ++j)
            pairs.push_back({{"classes", {i, j}},
                             {"linear", linear[i][j].separable},
                             {"mutual_convex", mutual[i][j].separable}});
    ordered_json out;
    out["kind"] = o.kind;
    out["points"] = data.points.size();
    out["classes"] = classes.size();
    out["pairwise"] = pairs;
    out["out"] = o.out;
    std::cout << out.dump() << "\n";
    return 0;
}

struct CheckOptions {
    std::string data;
    std::vector<int> classes{0, 1};
    std::string mode = "linear";
    double tol = kDefaultTol;
};

int cmd_check(const CheckOptions& o) {
    const LabeledDataset data = load_csv(o.data);
    const auto classes = data.split_by_class();
    const auto class_set = [&](int k) -> const PointSet& {
        if (k < 0 || k >= static_cast<int>(classes.size()))
            fail(ErrorCode::config_error, "class index " + std::to_string(k) + " out of range");
        return classes[static_cast<size_t>(k)];
    };

    ordered_json out;
    out["mode"] = o.mode;
    if (o.mode == "pairwise_linear" || o.mode == "pairwise_mutual_convex") {
        const PairwiseMode pm = o.mode == "pairwise_linear" ? PairwiseMode::linear
                                                            : PairwiseMode::mutual_convex;
        const auto grid = pairwise_verdicts(classes, pm, o.tol);
        bool all = true;
        ordered_json rows = ordered_json::array();
        for (size_t i = 0; i < grid.size(); ++i) {
            ordered_json row = ordered_json::array();
            for (size_t j = 0; j < grid.size(); ++j) {
                row.push_back(i == j ? ordered_json{{"separable", true}}
                                     : verdict_json(grid[i][j]));
                if (i != j)
                    all = all && grid[i][j].separable;
            }
            rows.push_back(row);
        }
        out["separable"] = all;
        out["pairs"] = rows;
    } else {
        if (o.classes.size() != 2)
            fail(ErrorCode::config_error, "--classes needs exactly two labels");
        const PointSet& a = class_set(o.classes[0]);
        const PointSet& b = class_set(o.classes[1]);
        if (o.mode == "linear") {
            out.update(verdict_json(is_linearly_separable(a, b, o.tol)));
        } else if (o.mode == "convex") {
            out.update(verdict_json(is_convexly_separable(a, b, o.tol)));
        } else { // mutual_convex
            const MutualVerdict v = is_mutually_convexly_separable(a, b, o.tol);
            out["separable"] = v.separable;
            out["a_from_b"] = verdict_json(v.a_from_b);
            out["b_from_a"] = verdict_json(v.b_from_a);
        }
    }
    std::cout << out.dump() << "\n";
    return 0;
}

struct ConstructOpts {
    std::string data;
    std::string method = "shl";
    std::string out;
    int pos = 0;
    double tol = kDefaultTol;
    bool merge = false;
};

int cmd_construct(const ConstructOpts& o) {
    const LabeledDataset data = load_csv(o.data);
    const auto classes = data.split_by_class();
    ConstructOptions copts;
    copts.tol = o.tol;
    copts.merge_nodes = o.merge;

    ordered_json report;
    report["method"] = o.method;
    Model model;
    if (o.method == "shl" || o.method == "thl") {
        const PointSet xpos = data.class_points(o.pos);
        const PointSet xneg = data.complement_points(o.pos);
        if (o.method == "shl") {
            const Scrn1Model m = build_shl_separator(xpos, xneg, copts);
            report["margins"] = binary_margin_json(
                [&](const Eigen::VectorXd& x) { return forward_scrn1(m, x)[0]; }, xpos, xneg);
            report["hidden"] = m.hidden.b.size();
            model = m;
        } else {
            const Scrn2Model m = build_thl_separator(xpos, xneg, copts);
            report["margins"] = binary_margin_json(
                [&](const Eigen::VectorXd& x) { return forward_scrn2(m, x)[0]; }, xpos, xneg);
            report["hidden"] = {m.layer1.b.size(), m.layer2.b.size()};
            model = m;
        }
    } else if (o.method == "shl-multi") {
        const Scrn1Model m = build_shl_multiclass(classes, copts);
        report["margins"] = multiclass_margin_json(m, classes);
        report["hidden"] = m.hidden.b.size();
        model = m;
    } else { // thl-multi
        const Scrn2Model m = build_thl_multiclass(classes, copts);
        ordered_json per_class = ordered_json::array();
        for (size_t k = 0; k < classes.size(); ++k) {
            double on_min = std::numeric_limits<double>::infinity();
            double off_max = -std::numeric_limits<double>::infinity();
            for (size_t c = 0; c < classes.size(); ++c)
                for (const auto& p : classes[c].points) {
                    const double y = forward_scrn2(m, p)[static_cast<int>(k)];
                    (c == k ? on_min = std::min(on_min, y) : off_max = std::max(off_max, y));
                }
            per_class.push_back(
                {{"class", k}, {"on_class_min", on_min}, {"off_class_max", off_max}});
        }
        report["margins"] = per_class;
        report["hidden"] = {m.layer1.b.size(), m.layer2.b.size()};
        model = m;
    }
    save_model(model, o.out);
    report["out"] = o.out;
    std::cout << report.dump() << "\n";
    return 0;
}

struct TrainOptions {
    std::string data;
    std::string arch = "shl";
    std::vector<int> hidden;
    double lambda = 1e-6;
    uint64_t seed = 0;
    std::string init = "random";
    std::string warm_path;
    std::string out;
    std::string trace;
    int pos = 0;
    double ftol = 1e-8;
    int max_outer = 100;
    int inner_budget = 2000;
};

int cmd_train(const TrainOptions& o) {
    TrainConfig config;
    config.lambda = o.lambda;
    config.seed = o.seed;
    config.ftol = o.ftol;
    config.max_outer = o.max_outer;
    config.inner_budget = o.inner_budget;
    if (o.max_outer < 1 || o.inner_budget < 1 || o.lambda < 0.0)
        fail(ErrorCode::config_error, "bad optimizer settings");

    if (o.init == "random")
        config.init = InitKind::random;
    else if (o.init == "constructive")
        config.init = InitKind::constructive;
    else
        config.init = InitKind::warm;

    for (int width : o.hidden)
        if (width < 1)
            fail(ErrorCode::config_error, "hidden widths must be positive");

    const LabeledDataset data = load_csv(o.data);
    const PointSet xpos = data.class_points(o.pos);
    const PointSet xneg = data.complement_points(o.pos);

    ordered_json report;
    report["arch"] = o.arch;
    MmTrace trace;
    LossReport loss;
    Model model;
    if (o.arch == "shl") {
        config.arch = Arch::shl;
        if (o.hidden.size() > 1)
            fail(ErrorCode::config_error, "--hidden takes one width for arch shl");
        if (!o.hidden.empty())
            config.hidden = o.hidden[0];
        if (config.init == InitKind::warm) {
            if (o.warm_path.empty())
                fail(ErrorCode::config_error, "--init warm needs --warm model.json");
            const Model warm = load_model(o.warm_path);
            if (!std::holds_alternative<CanonicalShl>(warm))
                fail(ErrorCode::config_error, "warm model is not a canonical one-layer model");
            config.warm_shl = std::get<CanonicalShl>(warm);
        }
        auto [m, tr] = train_shl(xpos, xneg, config);
        loss = hinge_objective(m, xpos, xneg, config.lambda);
        trace = std::move(tr);
        model = m;
    } else {
        config.arch = Arch::thl;
        if (o.hidden.size() == 2) {
            config.hidden1 = o.hidden[0];
            config.hidden2 = o.hidden[1];
        } else if (!o.hidden.empty()) {
            fail(ErrorCode::config_error, "--hidden takes two widths for arch thl, e.g. 12,4");
        }
        if (config.init == InitKind::warm) {
            if (o.warm_path.empty())
                fail(ErrorCode::config_error, "--init warm needs --warm model.json");
            const Model warm = load_model(o.warm_path);
            if (!std::holds_alternative<Scrn2Model>(warm))
                fail(ErrorCode::config_error, "warm model is not a two-layer model");
            config.warm_thl = to_canonical_thl(std::get<Scrn2Model>(warm));
        }
        auto [m, tr] = train_thl(xpos, xneg, config);
        loss = hinge_objective(m, xpos, xneg, config.lambda);
        trace = std::move(tr);
        model = to_scrn2(m); // two-layer models are stored in the general form
    }

    save_model(model, o.out);
    if (!o.trace.empty())
        write_text_file(o.trace, trace.to_csv());

    report["objective"] = {{"positive_hinge", loss.j_pos},
                           {"negative_hinge", loss.j_neg},
                           {"penalty", loss.reg},
                           {"total", loss.total}};
    report["accuracy"] = loss.accuracy;
    report["iterations"] = trace.iterations.empty() ? 0 : trace.iterations.size() - 1;
    report["converged"] = trace.converged;
    report["stop_reason"] = trace.stop_reason;
    report["out"] = o.out;
    std::cout << report.dump() << "\n";
    return 0;
}

struct DecomposeOptions {
    std::string data;
    std::string model;
    std::string mode = "shl";
    std::string out;
    int pos = 0;
    double tol = kDefaultTol;
};

ordered_json points_json(const PointSet& all, const std::vector<int>& members) {
    ordered_json arr = ordered_json::array();
    for (int idx : members)
        arr.push_back(vector_json(all[idx]));
    return arr;
}

ordered_json active_set_json(const ActiveSet& a) {
    ordered_json arr = ordered_json::array();
    for (int k : a)
        arr.push_back(k);
    return arr;
}

int cmd_decompose(const DecomposeOptions& o) {
    const LabeledDataset data = load_csv(o.data);
    const PointSet xpos = data.class_points(o.pos);
    const PointSet xneg = data.complement_points(o.pos);
    const Model model = load_model(o.model);

    ordered_json report;
    report["mode"] = o.mode;
    if (o.mode == "shl") {
        Scrn1Model m;
        if (std::holds_alternative<Scrn1Model>(model))
            m = std::get<Scrn1Model>(model);
        else if (std::holds_alternative<CanonicalShl>(model))
            m = to_scrn1(std::get<CanonicalShl>(model));
        else
            fail(ErrorCode::model_does_not_separate,
                 "mode shl needs a one-hidden-layer model");
        const ShlDecomposition dec = shl_decompose(m, xpos, xneg);
        report["coverage_ok"] = dec.coverage_ok;
        report["truncated"] = dec.truncated;
        ordered_json subsets = ordered_json::array();
        for (const auto& s : dec.subsets)
            subsets.push_back({{"active_set", active_set_json(s.active_set)},
                               {"members", s.members},
                               {"points", points_json(xneg, s.members)},
                               {"w", vector_json(s.separator.w)},
                               {"b", s.separator.b},
                               {"min_positive_margin", s.min_positive_margin},
                               {"max_negative_margin", s.max_negative_margin},
                               {"verified", s.verified}});
        report["subsets"] = subsets;
    } else if (o.mode == "thl") {
        if (!std::holds_alternative<Scrn2Model>(model))
            fail(ErrorCode::model_does_not_separate, "mode thl needs a two-hidden-layer model");
        const ThlDecomposition dec =
            thl_decompose(std::get<Scrn2Model>(model), xpos, xneg, o.tol);
        report["coverage_ok"] = dec.coverage_ok;
        report["truncated"] = dec.truncated;
        ordered_json subsets = ordered_json::array();
        for (const auto& s : dec.subsets)
            subsets.push_back({{"active_set", active_set_json(s.active_set)},
                               {"members", s.members},
                               {"points", points_json(xneg, s.members)},
                               {"a_hat", vector_json(s.a_hat)},
                               {"c_hat", s.c_hat},
                               {"min_positive_margin", s.min_positive_margin},
                               {"max_negative_margin", s.max_negative_margin},
                               {"verified", s.verified},
                               {"hull_clear", s.hull_clear.separable},
                               {"hull_distance", s.hull_clear.distance}});
        report["subsets"] = subsets;
    } else { // drill
        if (!std::holds_alternative<Scrn2Model>(model))
            fail(ErrorCode::model_does_not_separate, "mode drill needs a two-hidden-layer model");
        const DrillDownReport drill =
            full_drill_down(std::get<Scrn2Model>(model), xpos, xneg, o.tol);
        report["coverage_ok"] = drill.coverage_ok;
        ordered_json branches = ordered_json::array();
        for (const auto& b : drill.branches) {
            ordered_json leaves = ordered_json::array();
            for (const auto& leaf : b.leaves)
                leaves.push_back({{"active_set", active_set_json(leaf.active_set)},
                                  {"pos_members", leaf.pos_members},
                                  {"points", points_json(xpos, leaf.pos_members)},
                                  {"w", vector_json(leaf.separator.w)},
                                  {"b", leaf.separator.b},
                                  {"verified", leaf.verified}});
            branches.push_back({{"active_set", active_set_json(b.active_set)},
                                {"neg_members", b.neg_members},
                                {"points", points_json(xneg, b.neg_members)},
                                {"leaves", leaves}});
        }
        report["branches"] = branches;
    }

    write_text_file(o.out, report.dump(2) + "\n");
    ordered_json echo;
    echo["mode"] = o.mode;
    echo["out"] = o.out;
    std::cout << echo.dump() << "\n";
    return 0;
}

// ---- plotting ----

struct PlotOptions {
    std::string data;
    std::string model;
    std::string report;
    std::string out;
};

struct Viewport {
    double xmin, xmax, ymin, ymax;
    static constexpr double kSize = 600.0;

    double sx(double x) const { return (x - xmin) / (xmax - xmin) * kSize; }
    double sy(double y) const { return kSize - (y - ymin) / (ymax - ymin) * kSize; }
};

std::string fmt2(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// Monotone-chain hull of 2-D points, counterclockwise, for hatched regions.
std::vector<Eigen::VectorXd> hull_polygon(std::vector<Eigen::VectorXd> pts) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const auto& a, const auto& b) { return a == b; }),
              pts.end());
    if (pts.size() < 3)
        return pts;
    const auto cross = [](const Eigen::VectorXd& o, const Eigen::VectorXd& a,
                          const Eigen::VectorXd& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<Eigen::VectorXd> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0.0)
            hull.pop_back();
        hull.push_back(p);
    }
    const size_t lower = hull.size() + 1;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        while (hull.size() >= lower && cross(hull[hull.size() - 2], hull.back(), *it) <= 0.0)
            hull.pop_back();
        hull.push_back(*it);
    }
    hull.pop_back();
    return hull;
}

// Segment of the line w'x + b = 0 inside the viewport, if any.
std::vector<std::pair<double, double>> clip_line(const Eigen::VectorXd& w, double b,
                                                 const Viewport& v) {
    std::vector<std::pair<double, double>> hits;
    const auto push = [&](double x, double y) {
        for (const auto& h : hits)
            if (std::abs(h.first - x) < 1e-9 && std::abs(h.second - y) < 1e-9)
                return;
        if (x >= v.xmin - 1e-9 && x <= v.xmax + 1e-9 && y >= v.ymin - 1e-9 &&
            y <= v.ymax + 1e-9)
            hits.emplace_back(x, y);
    };
    if (std::abs(w[1]) > 1e-12) {
        push(v.xmin, -(w[0] * v.xmin + b) / w[1]);
        push(v.xmax, -(w[0] * v.xmax + b) / w[1]);
    }
    if (std::abs(w[0]) > 1e-12) {
        push(-(w[1] * v.ymin + b) / w[0], v.ymin);
        push(-(w[1] * v.ymax + b) / w[0], v.ymax);
    }
    return hits;
}

int cmd_plot(const PlotOptions& o) {
    const LabeledDataset data = load_csv(o.data);
    if (data.points.empty() || data.points[0].size() != 2)
        fail(ErrorCode::dimension_mismatch, "plots need a 2-D dataset");

    Viewport v{};
    v.xmin = v.ymin = std::numeric_limits<double>::infinity();
    v.xmax = v.ymax = -std::numeric_limits<double>::infinity();
    for (const auto& p : data.points.points) {
        v.xmin = std::min(v.xmin, p[0]);
        v.xmax = std::max(v.xmax, p[0]);
        v.ymin = std::min(v.ymin, p[1]);
        v.ymax = std::max(v.ymax, p[1]);
    }
    const double padx = std::max(1e-3, (v.xmax - v.xmin)) * 0.15;
    const double pady = std::max(1e-3, (v.ymax - v.ymin)) * 0.15;
    v.xmin -= padx;
    v.xmax += padx;
    v.ymin -= pady;
    v.ymax += pady;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" "
           "viewBox=\"0 0 600 600\">\n";
    svg << "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" "
           "patternUnits=\"userSpaceOnUse\"><path d=\"M0 6 L6 0\" stroke=\"#666\" "
           "stroke-width=\"0.8\"/></pattern></defs>\n";
    svg << "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";

    if (!o.report.empty()) {
        std::ifstream in(o.report);
        if (!in)
            fail(ErrorCode::io_error, "cannot open " + o.report);
        ordered_json rep;
        try {
            rep = ordered_json::parse(in);
        } catch (const std::exception& e) {
            fail(ErrorCode::parse_error, std::string("bad report JSON: ") + e.what());
        }
        const auto draw_subsets = [&](const ordered_json& subsets) {
            for (const auto& s : subsets) {
                if (!s.contains("points"))
                    continue;
                std::vector<Eigen::VectorXd> pts;
                for (const auto& pj : s["points"]) {
                    Eigen::VectorXd p(2);
                    p[0] = pj[0].get<double>();
                    p[1] = pj[1].get<double>();
                    pts.push_back(p);
                }
                const auto hull = hull_polygon(pts);
                if (hull.size() >= 3) {
                    svg << "<polygon points=\"";
                    for (const auto& p : hull)
                        svg << fmt2(v.sx(p[0])) << "," << fmt2(v.sy(p[1])) << " ";
                    svg << "\" fill=\"url(#hatch)\" stroke=\"#666\" "
                           "stroke-dasharray=\"4 3\" stroke-width=\"1\"/>\n";
                }
                if (s.contains("w")) {
                    Eigen::VectorXd w(2);
                    w[0] = s["w"][0].get<double>();
                    w[1] = s["w"][1].get<double>();
                    const auto seg = clip_line(w, s["b"].get<double>(), v);
                    if (seg.size() >= 2)
                        svg << "<path d=\"M " << fmt2(v.sx(seg[0].first)) << " "
                            << fmt2(v.sy(seg[0].second)) << " L " << fmt2(v.sx(seg[1].first))
                            << " " << fmt2(v.sy(seg[1].second))
                            << "\" stroke=\"#888\" stroke-width=\"1.2\" fill=\"none\"/>\n";
                }
            }
        };
        if (rep.contains("subsets"))
            draw_subsets(rep["subsets"]);
        if (rep.contains("branches"))
            for (const auto& b : rep["branches"])
                if (b.contains("leaves"))
                    draw_subsets(b["leaves"]);
    }

    if (!o.model.empty()) {
        const Model model = load_model(o.model);
        if (model_input_dim(model) != 2)
            fail(ErrorCode::dimension_mismatch, "model input dimension is not 2");
        const int outs = model_output_dim(model);
        constexpr int kGrid = 200;
        std::vector<double> value(static_cast<size_t>((kGrid + 1) * (kGrid + 1)));
        std::vector<int> label(value.size());
        Eigen::VectorXd x(2);
        for (int iy = 0; iy <= kGrid; ++iy)
            for (int ix = 0; ix <= kGrid; ++ix) {
                x[0] = v.xmin + (v.xmax - v.xmin) * ix / kGrid;
                x[1] = v.ymin + (v.ymax - v.ymin) * iy / kGrid;
                const Eigen::VectorXd y = model_outputs(model, x);
                const size_t at = static_cast<size_t>(iy * (kGrid + 1) + ix);
                value[at] = y[0];
                int arg = 0;
                for (int k = 1; k < outs; ++k)
                    if (y[k] > y[arg])
                        arg = k;
                label[at] = arg;
            }

        svg << "<path d=\"";
        const auto gx = [&](int ix) { return v.xmin + (v.xmax - v.xmin) * ix / kGrid; };
        const auto gy = [&](int iy) { return v.ymin + (v.ymax - v.ymin) * iy / kGrid; };
        if (outs == 1) {
            // Zero level set, one interpolated segment pair per crossing cell.
            for (int iy = 0; iy < kGrid; ++iy)
                for (int ix = 0; ix < kGrid; ++ix) {
                    const double f00 = value[static_cast<size_t>(iy * (kGrid + 1) + ix)];
                    const double f10 = value[static_cast<size_t>(iy * (kGrid + 1) + ix + 1)];
                    const double f01 = value[static_cast<size_t>((iy + 1) * (kGrid + 1) + ix)];
                    const double f11 =
                        value[static_cast<size_t>((iy + 1) * (kGrid + 1) + ix + 1)];
                    std::vector<std::pair<double, double>> cross;
                    const auto cut = [&](double fa, double fb, double xa, double ya, double xb,
                                         double yb) {
                        if ((fa > 0.0) == (fb > 0.0))
                            return;
                        const double t = fa / (fa - fb);
                        cross.emplace_back(xa + t * (xb - xa), ya + t * (yb - ya));
                    };
                    cut(f00, f10, gx(ix), gy(iy), gx(ix + 1), gy(iy));
                    cut(f10, f11, gx(ix + 1), gy(iy), gx(ix + 1), gy(iy + 1));
                    cut(f01, f11, gx(ix), gy(iy + 1), gx(ix + 1), gy(iy + 1));
                    cut(f00, f01, gx(ix), gy(iy), gx(ix), gy(iy + 1));
                    for (size_t k = 0; k + 1 < cross.size(); k += 2)
                        svg << "M " << fmt2(v.sx(cross[k].first)) << " "
                            << fmt2(v.sy(cross[k].second)) << " L "
                            << fmt2(v.sx(cross[k + 1].first)) << " "
                            << fmt2(v.sy(cross[k + 1].second)) << " ";
                }
        } else {
            // Class boundary: tick across every grid edge whose ends disagree.
            for (int iy = 0; iy <= kGrid; ++iy)
                for (int ix = 0; ix < kGrid; ++ix)
                    if (label[static_cast<size_t>(iy * (kGrid + 1) + ix)] !=
                        label[static_cast<size_t>(iy * (kGrid + 1) + ix + 1)]) {
                        const double mx = 0.5 * (gx(ix) + gx(ix + 1));
                        svg << "M " << fmt2(v.sx(mx)) << " "
                            << fmt2(v.sy(gy(iy) - 0.5 * (v.ymax - v.ymin) / kGrid)) << " L "
                            << fmt2(v.sx(mx)) << " "
                            << fmt2(v.sy(gy(iy) + 0.5 * (v.ymax - v.ymin) / kGrid)) << " ";
                    }
            for (int iy = 0; iy < kGrid; ++iy)
                for (int ix = 0; ix <= kGrid; ++ix)
                    if (label[static_cast<size_t>(iy * (kGrid + 1) + ix)] !=
                        label[static_cast<size_t>((iy + 1) * (kGrid + 1) + ix)]) {
                        const double my = 0.5 * (gy(iy) + gy(iy + 1));
                        svg << "M " << fmt2(v.sx(gx(ix) - 0.5 * (v.xmax - v.xmin) / kGrid))
                            << " " << fmt2(v.sy(my)) << " L "
                            << fmt2(v.sx(gx(ix) + 0.5 * (v.xmax - v.xmin) / kGrid)) << " "
                            << fmt2(v.sy(my)) << " ";
                    }
        }
        svg << "\" stroke=\"#222\" stroke-width=\"1.5\" fill=\"none\"/>\n";
    }

    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                     "#9467bd", "#ff7f0e", "#8c564b"};
    for (int i = 0; i < data.points.size(); ++i) {
        const auto& p = data.points[i];
        svg << "<circle cx=\"" << fmt2(v.sx(p[0])) << "\" cy=\"" << fmt2(v.sy(p[1]))
            << "\" r=\"4\" fill=\"" << kPalette[data.labels[static_cast<size_t>(i)] % 6]
            << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    }
    svg << "</svg>\n";

    write_text_file(o.out, svg.str());
    ordered_json echo;
    echo["out"] = o.out;
    std::cout << echo.dump() << "\n";
    return 0;
}

struct VerifyOptions {
    std::string suite = "all";
    uint64_t seed = 0;
    bool inject_fault = false;
};

int cmd_verify(const VerifyOptions& o) {
    std::vector<PropertyResult> results;
    const auto run_geometry = [&] {
        GeometrySuiteOptions g;
        g.seed = o.seed;
        g.inject_fault = o.inject_fault;
        const auto r = geometry_suite(g);
        results.insert(results.end(), r.begin(), r.end());
    };
    const auto run_surrogates = [&] {
        SurrogateSuiteOptions s;
        s.seed = o.seed;
        const auto r = surrogate_suite(s);
        results.insert(results.end(), r.begin(), r.end());
    };
    const auto run_descent = [&] {
        DescentSuiteOptions d;
        d.seed = o.seed;
        const auto r = descent_suite(d);
        results.insert(results.end(), r.begin(), r.end());
    };
    if (o.suite == "geometry" || o.suite == "all")
        run_geometry();
    if (o.suite == "surrogates" || o.suite == "all")
        run_surrogates();
    if (o.suite == "descent" || o.suite == "all")
        run_descent();

    bool all_pass = true;
    for (const auto& r : results) {
        all_pass = all_pass && r.pass;
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name
                  << " worst=" << format_double(r.worst)
                  << (r.detail.empty() ? "" : "  " + r.detail) << "\n";
    }
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sign-constrained rectifier networks: construction, analysis, training"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* cgen = app.add_subcommand("gen", "Generate a dataset CSV");
    cgen->add_option("kind", gen.kind, "xor | rings | blobs")
        ->required()
        ->check(CLI::IsMember({"xor", "rings", "blobs"}));
    cgen->add_option("--out", gen.out, "output CSV path")->required();
    cgen->add_option("--inner", gen.inner, "rings: inner point count");
    cgen->add_option("--outer", gen.outer, "rings: outer point count");
    cgen->add_option("--rin", gen.rin, "rings: inner radius");
    cgen->add_option("--rout", gen.rout, "rings: outer radius");
    cgen->add_flag("--center,!--no-center", gen.center, "rings: include the center point");
    cgen->add_option("--jitter", gen.jitter, "rings: radial/angular noise");
    cgen->add_option("--classes", gen.classes, "blobs: class count");
    cgen->add_option("--dim", gen.dim, "blobs: dimension");
    cgen->add_option("--per-class", gen.per_class, "blobs: points per class");
    cgen->add_option("--separation", gen.separation, "blobs: center separation");
    cgen->add_option("--seed", gen.seed, "random seed");

    CheckOptions check;
    auto* ccheck = app.add_subcommand("check", "Separability verdicts for a dataset");
    ccheck->add_option("--data", check.data, "dataset CSV")->required();
    ccheck->add_option("--classes", check.classes, "two class labels a,b")->delimiter(',');
    ccheck->add_option("--mode", check.mode, "verdict kind")
        ->check(CLI::IsMember({"linear", "convex", "mutual_convex", "pairwise_linear",
                               "pairwise_mutual_convex"}));
    ccheck->add_option("--tol", check.tol, "geometric tolerance");

    ConstructOpts cons;
    auto* ccons = app.add_subcommand("construct", "Build a separating network from geometry");
    ccons->add_option("--data", cons.data, "dataset CSV")->required();
    ccons->add_option("--method", cons.method, "construction")
        ->check(CLI::IsMember({"shl", "shl-multi", "thl", "thl-multi"}));
    ccons->add_option("--out", cons.out, "model JSON path")->required();
    ccons->add_option("--pos", cons.pos, "positive class label (binary methods)");
    ccons->add_option("--tol", cons.tol, "geometric tolerance");
    ccons->add_flag("--merge", cons.merge, "drop redundant hidden nodes");

    TrainOptions train;
    auto* ctrain = app.add_subcommand("train", "Train by majorize-minimize descent");
    ctrain->add_option("--data", train.data, "dataset CSV")->required();
    ctrain->add_option("--arch", train.arch, "shl | thl")
        ->check(CLI::IsMember({"shl", "thl"}));
    ctrain->add_option("--hidden", train.hidden, "width, or two widths l1,l2")->delimiter(',');
    ctrain->add_option("--lambda", train.lambda, "weight penalty");
    ctrain->add_option("--seed", train.seed, "random seed");
    ctrain->add_option("--init", train.init, "random | constructive | warm")
        ->check(CLI::IsMember({"random", "constructive", "warm"}));
    ctrain->add_option("--warm", train.warm_path, "model JSON for --init warm");
    ctrain->add_option("--out", train.out, "model JSON path")->required();
    ctrain->add_option("--trace", train.trace, "objective trace CSV path");
    ctrain->add_option("--pos", train.pos, "positive class label");
    ctrain->add_option("--ftol", train.ftol, "outer stopping tolerance");
    ctrain->add_option("--max-outer", train.max_outer, "outer iteration cap");
    ctrain->add_option("--inner-budget", train.inner_budget, "inner solver iterations");

    DecomposeOptions dec;
    auto* cdec = app.add_subcommand("decompose", "Split a model into affine certificates");
    cdec->add_option("--data", dec.data, "dataset CSV")->required();
    cdec->add_option("--model", dec.model, "model JSON")->required();
    cdec->add_option("--mode", dec.mode, "shl | thl | drill")
        ->check(CLI::IsMember({"shl", "thl", "drill"}));
    cdec->add_option("--out", dec.out, "report JSON path")->required();
    cdec->add_option("--pos", dec.pos, "positive class label");
    cdec->add_option("--tol", dec.tol, "geometric tolerance");

    PlotOptions plot;
    auto* cplot = app.add_subcommand("plot", "Render a 2-D dataset (and model/report) as SVG");
    cplot->add_option("--data", plot.data, "dataset CSV")->required();
    cplot->add_option("--model", plot.model, "model JSON (optional)");
    cplot->add_option("--report", plot.report, "decomposition report JSON (optional)");
    cplot->add_option("--out", plot.out, "SVG path")->required();

    VerifyOptions verify;
    auto* cverify = app.add_subcommand("verify", "Run the property suites");
    cverify->add_option("--suite", verify.suite, "geometry | surrogates | descent | all")
        ->check(CLI::IsMember({"geometry", "surrogates", "descent", "all"}));
    cverify->add_option("--seed", verify.seed, "random seed");
    cverify->add_flag("--inject-fault", verify.inject_fault)->group(""); // test hook

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cgen->parsed())
            return cmd_gen(gen);
        if (ccheck->parsed())
            return cmd_check(check);
        if (ccons->parsed())
            return cmd_construct(cons);
        if (ctrain->parsed())
            return cmd_train(train);
        if (cdec->parsed())
            return cmd_decompose(dec);
        if (cplot->parsed())
            return cmd_plot(plot);
        return cmd_verify(verify);
    } catch (const scrn::Error& e) {
        ordered_json err;
        err["error"] = error_code_name(e.code());
        err["message"] = e.detail();
        std::cerr << err.dump() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        ordered_json err;
        err["error"] = "internal_error";
        err["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 3;
    }
}
