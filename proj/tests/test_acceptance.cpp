// End-to-end acceptance gate.  Each numbered criterion prints exactly one
// [PASS]/[FAIL] line; the process exits nonzero if any of them fail.  The
// command-line binary's path is expected as argv[1] for the determinism
// checks; everything else runs in-process against the library.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "scrn/construct.hpp"
#include "scrn/data.hpp"
#include "scrn/decompose.hpp"
#include "scrn/geometry.hpp"
#include "scrn/mm.hpp"
#include "scrn/network.hpp"
#include "scrn/train.hpp"
#include "scrn/verify.hpp"

using namespace scrn;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::string g_cli;

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d %-34s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!pass)
        ++g_failures;
}

template <typename F> void criterion(int id, const char* name, F&& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, name, false, std::string("exception: ") + e.what());
    }
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

const PropertyResult* find_prop(const std::vector<PropertyResult>& rs, const std::string& name) {
    for (const auto& r : rs)
        if (r.name == name)
            return &r;
    return nullptr;
}

bool monotone(const MmTrace& trace) {
    for (size_t i = 0; i + 1 < trace.iterations.size(); ++i)
        if (trace.iterations[i + 1].objective > trace.iterations[i].objective + 1e-9)
            return false;
    return true;
}

BinaryInstance entangled_with_retry(std::mt19937_64& rng, int dim, int per_class) {
    for (int attempt = 0; attempt < 5; ++attempt) {
        try {
            return random_entangled_instance(rng, dim, per_class);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::generation_failed)
                throw;
        }
    }
    return random_entangled_instance(rng, dim, per_class);
}

// Results shared between criteria: models feed the decomposition checks and
// the trainer battery feeds both the descent and trainability criteria.
struct Shared {
    std::vector<BinaryInstance> shl_instances;
    std::vector<Scrn1Model> shl_models;
    std::vector<BinaryInstance> thl_instances;
    std::vector<Scrn2Model> thl_models;

    std::vector<std::pair<std::string, MmTrace>> traces;
    CanonicalShl xor_model;
    MmTrace xor_trace;
    double xor_seconds = 0.0;
    CanonicalThl rings_model;
    MmTrace rings_trace;
    double rings_seconds = 0.0;
    PointSet rings_pos, rings_neg;
    bool trainers_ran = false;
};

Shared g;

void run_trainer_battery() {
    if (g.trainers_ran)
        return;
    g.trainers_ran = true;

    const LabeledDataset xor_data = gen_xor();
    const PointSet xp = xor_data.class_points(0);
    const PointSet xn = xor_data.class_points(1);
    {
        TrainConfig c;
        c.arch = Arch::shl;
        c.hidden = 2;
        c.lambda = 1e-6;
        c.seed = 0;
        const auto t0 = std::chrono::steady_clock::now();
        auto [m, tr] = train_shl(xp, xn, c);
        g.xor_seconds = seconds_since(t0);
        g.xor_model = m;
        g.xor_trace = tr;
        g.traces.emplace_back("shl_parity_seed0", tr);
    }
    {
        const LabeledDataset blobs = gen_polytope_blobs(2, 3, 12, 4.0, 11);
        TrainConfig c;
        c.arch = Arch::shl;
        c.hidden = 4;
        c.seed = 1;
        auto [m, tr] = train_shl(blobs.class_points(0), blobs.class_points(1), c);
        (void)m;
        g.traces.emplace_back("shl_blobs_random", tr);
    }

    const LabeledDataset rings = gen_rings(8, 8, 1.0, 3.0, true, 0);
    g.rings_pos = rings.class_points(0);
    g.rings_neg = rings.class_points(1);
    {
        TrainConfig c;
        c.arch = Arch::thl;
        c.init = InitKind::constructive;
        c.lambda = 1e-6;
        const auto t0 = std::chrono::steady_clock::now();
        auto [m, tr] = train_thl(g.rings_pos, g.rings_neg, c);
        g.rings_seconds = seconds_since(t0);
        g.rings_model = m;
        g.rings_trace = tr;
        g.traces.emplace_back("thl_rings_constructive", tr);
    }
    {
        TrainConfig c;
        c.arch = Arch::thl;
        c.hidden1 = 12;
        c.hidden2 = 4;
        c.seed = 0;
        auto [m, tr] = train_thl(g.rings_pos, g.rings_neg, c);
        (void)m;
        g.traces.emplace_back("thl_rings_random", tr);
    }
    {
        std::mt19937_64 rng(77);
        const BinaryInstance inst = entangled_with_retry(rng, 2, 5);
        TrainConfig c;
        c.arch = Arch::thl;
        c.hidden1 = 8;
        c.hidden2 = 3;
        c.seed = 2;
        c.max_outer = 30;
        auto [m, tr] = train_thl(inst.xpos, inst.xneg, c);
        (void)m;
        g.traces.emplace_back("thl_entangled_random", tr);
    }
    {
        const LabeledDataset blobs = gen_polytope_blobs(3, 2, 15, 4.0, 0);
        TrainConfig c;
        c.arch = Arch::shl;
        c.hidden = 6;
        c.seed = 0;
        const MulticlassModel m = multiclass_train(blobs.split_by_class(), c);
        for (size_t k = 0; k < m.traces.size(); ++k)
            g.traces.emplace_back("multiclass_class" + std::to_string(k), m.traces[k]);
    }
}

void crit1_construction() {
    const int dims[] = {2, 3, 5};
    std::mt19937_64 rng(20260814);
    const auto t0 = std::chrono::steady_clock::now();
    int built = 0;
    double worst_pos = std::numeric_limits<double>::infinity();
    double worst_neg = -std::numeric_limits<double>::infinity();
    bool signs_ok = true;

    for (int i = 0; i < 200; ++i) {
        const BinaryInstance inst = random_convexly_separable_instance(rng, dims[i % 3], 40);
        const Scrn1Model m = build_shl_separator(inst.xpos, inst.xneg);
        signs_ok = signs_ok && check_sign_constraints(m).empty() && m.c.minCoeff() >= 0.0;
        for (const auto& x : inst.xpos.points)
            worst_pos = std::min(worst_pos, forward_scrn1(m, x)[0]);
        for (const auto& x : inst.xneg.points)
            worst_neg = std::max(worst_neg, forward_scrn1(m, x)[0]);
        g.shl_instances.push_back(inst);
        g.shl_models.push_back(m);
        ++built;
    }
    const double elapsed = seconds_since(t0);
    const bool pass = built == 200 && signs_ok && worst_pos >= 1.0 - 1e-9 &&
                      worst_neg <= -1.0 + 1e-9 && elapsed < 30.0;
    report(1, "one_layer_construction", pass,
           "200/200 built, min f(pos)=" + fmt(worst_pos) + ", max f(neg)=" + fmt(worst_neg) +
               ", " + fmt(elapsed) + "s");
}

void crit2_refusal() {
    std::mt19937_64 rng(424242);
    int refusals = 0;
    int interior_verified = 0;
    for (int i = 0; i < 50; ++i) {
        const BinaryInstance inst = random_interior_negative_instance(rng, 2 + i % 3, 20);
        double closest = std::numeric_limits<double>::infinity();
        for (const auto& x : inst.xneg.points)
            closest = std::min(closest, hull_distance(x, inst.xpos).distance);
        if (closest <= 1e-7)
            ++interior_verified;
        try {
            build_shl_separator(inst.xpos, inst.xneg);
        } catch (const Error&) {
            ++refusals;
        }
    }
    report(2, "interior_negative_refusal", refusals == 50 && interior_verified == 50,
           std::to_string(refusals) + "/50 refused, " + std::to_string(interior_verified) +
               "/50 interior-verified");
}

void crit3_shl_decomposition() {
    int ok = 0;
    double thinnest = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < g.shl_models.size(); ++i) {
        const ShlDecomposition d =
            shl_decompose(g.shl_models[i], g.shl_instances[i].xpos, g.shl_instances[i].xneg);
        bool good = d.coverage_ok && !d.truncated;
        for (const auto& s : d.subsets) {
            good = good && s.verified && s.min_positive_margin > 1e-9 &&
                   s.max_negative_margin < -1e-9;
            thinnest = std::min({thinnest, s.min_positive_margin, -s.max_negative_margin});
        }
        if (good)
            ++ok;
    }
    report(3, "one_layer_decomposition",
           !g.shl_models.empty() && ok == static_cast<int>(g.shl_models.size()),
           std::to_string(ok) + "/" + std::to_string(g.shl_models.size()) +
               " decomposed, thinnest margin " + fmt(thinnest));
}

void crit4_multiclass() {
    int ok = 0;
    for (int i = 0; i < 50; ++i) {
        const int classes = 3 + i % 2;
        const int dim = 2 + i % 2;
        const int per_class = 4 + (i * 3) % 9;
        const LabeledDataset data =
            gen_polytope_blobs(classes, dim, per_class, 4.0, 1000 + static_cast<uint64_t>(i));
        const Scrn1Model m = build_shl_multiclass(data.split_by_class());
        bool exact = check_sign_constraints(m).empty();
        for (int p = 0; p < data.size() && exact; ++p) {
            const Eigen::VectorXd y = forward_scrn1(m, data.points[p]);
            for (int k = 0; k < y.size(); ++k) {
                const bool own = k == data.labels[static_cast<size_t>(p)];
                exact = exact && (own ? y[k] > 0.0 : y[k] < 0.0);
            }
        }
        if (exact)
            ++ok;
    }
    report(4, "multiclass_sign_pattern", ok == 50, std::to_string(ok) + "/50 exact");
}

void crit5_thl_construction() {
    const auto check_instance = [&](const PointSet& pos, const PointSet& neg) {
        const auto t0 = std::chrono::steady_clock::now();
        const Scrn2Model m = build_thl_separator(pos, neg);
        const double elapsed = seconds_since(t0);
        bool good = check_sign_constraints(m).empty() && elapsed < 10.0;
        for (const auto& x : pos.points)
            good = good && forward_scrn2(m, x)[0] >= 1.0 - 1e-9;
        for (const auto& x : neg.points)
            good = good && forward_scrn2(m, x)[0] <= -1.0 + 1e-9;
        g.thl_instances.push_back({pos, neg});
        g.thl_models.push_back(m);
        return good;
    };

    int ok = 0;
    int total = 0;
    const LabeledDataset rings = gen_rings(8, 8, 1.0, 3.0, true, 0);
    ++total, ok += check_instance(rings.class_points(0), rings.class_points(1)) ? 1 : 0;
    ++total, ok += check_instance(rings.class_points(1), rings.class_points(0)) ? 1 : 0;

    std::mt19937_64 rng(5555);
    for (int i = 0; i < 50; ++i) {
        const BinaryInstance inst = entangled_with_retry(rng, 2 + i % 2, 4 + i % 3);
        ++total, ok += check_instance(inst.xpos, inst.xneg) ? 1 : 0;
    }
    report(5, "two_layer_construction", ok == total,
           std::to_string(ok) + "/" + std::to_string(total) + " separated exactly");
}

void crit6_thl_decomposition() {
    int ok = 0;
    for (size_t i = 0; i < g.thl_models.size(); ++i) {
        const ThlDecomposition d =
            thl_decompose(g.thl_models[i], g.thl_instances[i].xpos, g.thl_instances[i].xneg);
        bool good = d.coverage_ok && !d.subsets.empty();
        for (const auto& s : d.subsets)
            good = good && s.hull_clear.separable;
        if (good)
            ++ok;
    }
    report(6, "two_layer_decomposition",
           !g.thl_models.empty() && ok == static_cast<int>(g.thl_models.size()),
           std::to_string(ok) + "/" + std::to_string(g.thl_models.size()) +
               " subsets hull-verified");
}

SurrogateSuiteOptions surrogate_options() {
    SurrogateSuiteOptions o;
    o.seed = 0;
    o.anchors = 100;
    o.probes = 100;
    o.sandwich_trials = 1000;
    o.concavity_segments = 3000; // 1000 per probed family
    return o;
}

std::vector<PropertyResult> g_surrogate_results;
bool g_surrogate_ran = false;

const std::vector<PropertyResult>& surrogate_results() {
    if (!g_surrogate_ran) {
        g_surrogate_results = surrogate_suite(surrogate_options());
        g_surrogate_ran = true;
    }
    return g_surrogate_results;
}

void crit7_concavity() {
    const PropertyResult* r = find_prop(surrogate_results(), "concavity_probes");
    const bool pass = r != nullptr && r->pass;
    report(7, "concavity_probes", pass,
           r ? ("worst violation " + fmt(r->worst) + " over 3000 segments") : "missing result");
}

void crit8_surrogates() {
    bool pass = true;
    double worst = 0.0;
    std::string missing;
    for (const char* name : {"shl_surrogate_touch", "shl_surrogate_bound",
                             "first_layer_surrogate_touch", "first_layer_surrogate_bound",
                             "score_bounds_sandwich"}) {
        const PropertyResult* r = find_prop(surrogate_results(), name);
        if (!r) {
            pass = false;
            missing = name;
            continue;
        }
        pass = pass && r->pass;
        worst = std::max(worst, r->worst);
    }
    report(8, "surrogate_bounds_and_touch", pass,
           missing.empty() ? ("worst gap " + fmt(worst)) : ("missing " + missing));
}

void crit9_descent() {
    run_trainer_battery();
    int good = 0;
    std::string offender;
    for (const auto& [name, trace] : g.traces) {
        if (monotone(trace))
            ++good;
        else if (offender.empty())
            offender = name;
    }
    const bool pass = !g.traces.empty() && good == static_cast<int>(g.traces.size());
    report(9, "monotone_descent", pass,
           std::to_string(good) + "/" + std::to_string(g.traces.size()) + " traces monotone" +
               (offender.empty() ? "" : ", first offender " + offender));
}

void crit10_trainability() {
    run_trainer_battery();

    const LabeledDataset xor_data = gen_xor();
    const LossReport xr = hinge_objective(g.xor_model, xor_data.class_points(0),
                                          xor_data.class_points(1), 1e-6);
    const size_t xor_outers = g.xor_trace.iterations.empty() ? 0 : g.xor_trace.iterations.size() - 1;
    const bool xor_ok = xr.accuracy == 1.0 && xor_outers <= 50 && g.xor_seconds < 5.0;

    const LossReport rr = hinge_objective(g.rings_model, g.rings_pos, g.rings_neg, 1e-6);
    const bool rings_ok = !g.rings_trace.iterations.empty() &&
                          g.rings_trace.iterations.back().objective <=
                              g.rings_trace.iterations.front().objective + 1e-12 &&
                          rr.accuracy == 1.0 && g.rings_seconds < 60.0;

    report(10, "trainability", xor_ok && rings_ok,
           "parity acc=" + fmt(xr.accuracy) + " in " + std::to_string(xor_outers) + " outers (" +
               fmt(g.xor_seconds) + "s); rings acc=" + fmt(rr.accuracy) + " obj " +
               fmt(g.rings_trace.iterations.front().objective) + "->" +
               fmt(g.rings_trace.iterations.back().objective) + " (" + fmt(g.rings_seconds) +
               "s)");
}

int run_cli(const std::string& args, const std::string& stdout_path) {
    const std::string cmd =
        g_cli + " " + args + " > " + stdout_path + " 2> " + stdout_path + ".err";
    const int raw = std::system(cmd.c_str());
    if (raw == -1 || !WIFEXITED(raw))
        return -1;
    return WEXITSTATUS(raw);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void crit11_determinism() {
    if (g_cli.empty()) {
        report(11, "cli_determinism", false, "no CLI path supplied on the command line");
        return;
    }
    const fs::path base = fs::temp_directory_path() / "scrn_acceptance";
    fs::remove_all(base);

    const auto produce = [&](const fs::path& dir) {
        fs::create_directories(dir);
        const std::string d = dir.string() + "/";
        bool ok = true;
        int step = 0;
        const auto step_out = [&] { return d + "out" + std::to_string(step++) + ".txt"; };
        ok = ok && run_cli("gen blobs --out " + d + "d.csv --classes 3 --dim 2 --per-class 10 "
                           "--separation 4 --seed 5", step_out()) == 0;
        ok = ok && run_cli("gen rings --out " + d + "rings.csv --jitter 0.1 --seed 9",
                           step_out()) == 0;
        ok = ok && run_cli("check --data " + d + "d.csv --mode pairwise_mutual_convex",
                           step_out()) == 0;
        ok = ok && run_cli("construct --data " + d + "d.csv --method shl-multi --out " + d +
                           "multi.json", step_out()) == 0;
        ok = ok && run_cli("construct --data " + d + "rings.csv --method thl --out " + d +
                           "thl.json", step_out()) == 0;
        ok = ok && run_cli("train --data " + d + "d.csv --arch shl --hidden 4 --seed 2 --pos 1 "
                           "--out " + d + "tr.json --trace " + d + "tr.csv", step_out()) == 0;
        ok = ok && run_cli("train --data " + d + "rings.csv --arch thl --hidden 6,3 --seed 4 "
                           "--max-outer 8 --out " + d + "tt.json --trace " + d + "tt.csv",
                           step_out()) == 0;
        ok = ok && run_cli("decompose --data " + d + "rings.csv --model " + d +
                           "thl.json --mode thl --out " + d + "rep.json", step_out()) == 0;
        ok = ok && run_cli("plot --data " + d + "rings.csv --report " + d + "rep.json --out " +
                           d + "rep.svg", step_out()) == 0;
        ok = ok && run_cli("plot --data " + d + "rings.csv --model " + d + "thl.json --out " +
                           d + "mod.svg", step_out()) == 0;
        return ok;
    };

    // Run the pipeline, snapshot every produced byte, then repeat the exact
    // same commands in place and demand the artifacts come back unchanged.
    const fs::path work = base / "work";
    const bool ran_first = produce(work);
    std::vector<std::pair<std::string, std::string>> snapshot;
    if (ran_first)
        for (const auto& entry : fs::directory_iterator(work))
            snapshot.emplace_back(entry.path().filename().string(), slurp(entry.path()));
    const bool ran = ran_first && produce(work);

    int identical = 0;
    std::string mismatch;
    if (ran)
        for (const auto& [name, bytes] : snapshot) {
            // Stderr captures are expected to be empty; everything else must
            // have content as well as matching bytes.
            const bool is_err = name.size() > 4 && name.compare(name.size() - 4, 4, ".err") == 0;
            if (slurp(work / name) == bytes && (is_err || !bytes.empty()))
                ++identical;
            else if (mismatch.empty())
                mismatch = name;
        }
    const bool pass = ran && !snapshot.empty() && identical == static_cast<int>(snapshot.size());
    report(11, "cli_determinism", pass,
           ran ? (std::to_string(identical) + "/" + std::to_string(snapshot.size()) +
                  " artifacts byte-identical" +
                  (mismatch.empty() ? "" : ", first mismatch " + mismatch))
               : "a pipeline command exited nonzero");
}

void crit12_bruteforce() {
    GeometrySuiteOptions o;
    o.seed = 0;
    o.bruteforce_instances = 100;
    o.random_instances = 2; // only the brute-force property is under test here
    const auto results = geometry_suite(o);
    const PropertyResult* r = find_prop(results, "bruteforce_agreement");
    const bool pass = r != nullptr && r->pass && r->worst <= 1e-3;
    report(12, "bruteforce_agreement", pass,
           r ? ("worst deviation " + fmt(r->worst) + " over 100 instances") : "missing result");
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1)
        g_cli = argv[1];

    criterion(1, "one_layer_construction", crit1_construction);
    criterion(2, "interior_negative_refusal", crit2_refusal);
    criterion(3, "one_layer_decomposition", crit3_shl_decomposition);
    criterion(4, "multiclass_sign_pattern", crit4_multiclass);
    criterion(5, "two_layer_construction", crit5_thl_construction);
    criterion(6, "two_layer_decomposition", crit6_thl_decomposition);
    criterion(7, "concavity_probes", crit7_concavity);
    criterion(8, "surrogate_bounds_and_touch", crit8_surrogates);
    criterion(9, "monotone_descent", crit9_descent);
    criterion(10, "trainability", crit10_trainability);
    criterion(11, "cli_determinism", crit11_determinism);
    criterion(12, "bruteforce_agreement", crit12_bruteforce);

    if (g_failures == 0) {
        std::printf("all 12 acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", g_failures);
    return 1;
}
