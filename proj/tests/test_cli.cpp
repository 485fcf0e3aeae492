#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kDir = "/tmp/scrn_cli_tests";

std::string cli() {
    const char* p = std::getenv("SCRN_CLI");
    REQUIRE_MESSAGE(p != nullptr, "SCRN_CLI must point at the command-line binary");
    return p;
}

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

RunResult run(const std::string& args) {
    fs::create_directories(kDir);
    const std::string out = kDir + "/stdout.txt";
    const std::string err = kDir + "/stderr.txt";
    const std::string cmd = cli() + " " + args + " > " + out + " 2> " + err;
    const int raw = std::system(cmd.c_str());
    REQUIRE(raw != -1);
    RunResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

json parse_stdout(const RunResult& r) {
    CAPTURE(r.out);
    CAPTURE(r.err);
    return json::parse(r.out);
}

// Error output is a single JSON line on stderr: {"error": code, "message": ...}.
void expect_error(const RunResult& r, int exit_code, const std::string& code) {
    CHECK(r.exit_code == exit_code);
    CAPTURE(r.err);
    const json e = json::parse(r.err);
    CHECK(e.at("error") == code);
    CHECK(e.at("message").is_string());
}

std::string path_of(const std::string& name) { return kDir + "/" + name; }

} // namespace

TEST_CASE("gen writes the dataset and reports pairwise separability") {
    const std::string csv = path_of("xor.csv");
    const RunResult r = run("gen xor --out " + csv);
    CHECK(r.exit_code == 0);
    CHECK(slurp(csv) == "x1,x2,label\n0,0,0\n1,1,0\n0,1,1\n1,0,1\n");

    const json j = parse_stdout(r);
    CHECK(j.at("kind") == "xor");
    CHECK(j.at("points") == 4);
    CHECK(j.at("classes") == 2);
    REQUIRE(j.at("pairwise").size() == 1);
    CHECK(j.at("pairwise")[0].at("linear") == false);
    CHECK(j.at("pairwise")[0].at("mutual_convex") == true);
}

TEST_CASE("gen covers rings and blobs with their knobs") {
    const RunResult rings =
        run("gen rings --out " + path_of("rings.csv") + " --inner 8 --outer 8 --rin 1 --rout 3");
    CHECK(rings.exit_code == 0);
    CHECK(parse_stdout(rings).at("points") == 17);

    const RunResult bare = run("gen rings --out " + path_of("rings_bare.csv") +
                               " --inner 8 --outer 8 --rin 1 --rout 3 --no-center");
    CHECK(parse_stdout(bare).at("points") == 16);

    const RunResult blobs = run("gen blobs --out " + path_of("blobs.csv") +
                                " --classes 3 --dim 2 --per-class 20 --separation 4 --seed 0");
    CHECK(blobs.exit_code == 0);
    const json j = parse_stdout(blobs);
    CHECK(j.at("points") == 60);
    CHECK(j.at("classes") == 3);
    for (const auto& pair : j.at("pairwise"))
        CHECK(pair.at("mutual_convex") == true);
}

TEST_CASE("check reports verdicts without failing the process") {
    run("gen xor --out " + path_of("xor.csv"));
    const RunResult mutual =
        run("check --data " + path_of("xor.csv") + " --mode mutual_convex");
    CHECK(mutual.exit_code == 0);
    const json j = parse_stdout(mutual);
    CHECK(j.at("separable") == true);
    CHECK(j.at("a_from_b").at("distance").get<double>() == doctest::Approx(0.7071067811865476));
    CHECK(j.at("b_from_a").at("separable") == true);

    const RunResult linear = run("check --data " + path_of("xor.csv") + " --mode linear");
    CHECK(linear.exit_code == 0); // "not separable" is an answer, not an error
    CHECK(parse_stdout(linear).at("separable") == false);

    run("gen rings --out " + path_of("rings.csv"));
    const RunResult convex =
        run("check --data " + path_of("rings.csv") + " --mode mutual_convex");
    CHECK(convex.exit_code == 0);
    CHECK(parse_stdout(convex).at("separable") == false);
}

TEST_CASE("check propagates io and parse failures") {
    expect_error(run("check --data " + path_of("missing.csv")), 2, "io_error");

    std::ofstream bad(path_of("bad.csv"));
    bad << "x1,x2,label\n1,oops,0\n";
    bad.close();
    expect_error(run("check --data " + path_of("bad.csv")), 2, "parse_error");
}

TEST_CASE("construct builds, reports margins, and refuses bad geometry") {
    run("gen xor --out " + path_of("xor.csv"));
    const std::string model = path_of("xor_shl.json");
    const RunResult r =
        run("construct --data " + path_of("xor.csv") + " --method shl --out " + model);
    CHECK(r.exit_code == 0);
    REQUIRE(fs::exists(model));
    const json report = parse_stdout(r);
    CHECK(report.at("method") == "shl");
    CHECK(report.at("hidden") == 2);
    CHECK(report.at("margins").at("positive_min").get<double>() >= 1.0 - 1e-9);
    CHECK(report.at("margins").at("negative_max").get<double>() <= -1.0 + 1e-9);

    // The ring geometry has no one-layer separator; the file must not appear.
    run("gen rings --out " + path_of("rings.csv"));
    const std::string refused = path_of("rings_shl.json");
    const RunResult fail =
        run("construct --data " + path_of("rings.csv") + " --method shl --out " + refused);
    expect_error(fail, 1, "not_convexly_separable");
    CHECK_FALSE(fs::exists(refused));

    const RunResult thl =
        run("construct --data " + path_of("rings.csv") + " --method thl --out " +
            path_of("rings_thl.json"));
    CHECK(thl.exit_code == 0);
    const json threport = parse_stdout(thl);
    CHECK(threport.at("margins").at("positive_min").get<double>() >= 1.0 - 1e-9);
    CHECK(threport.at("hidden").size() == 2);
}

TEST_CASE("train fits parity and honours flag validation") {
    run("gen xor --out " + path_of("xor.csv"));
    const std::string model = path_of("xor_trained.json");
    const std::string trace = path_of("xor_trace.csv");
    const RunResult r = run("train --data " + path_of("xor.csv") +
                            " --arch shl --hidden 2 --lambda 1e-6 --seed 0 --out " + model +
                            " --trace " + trace);
    CHECK(r.exit_code == 0);
    const json report = parse_stdout(r);
    CHECK(report.at("accuracy") == 1.0);
    CHECK(report.at("iterations").get<int>() <= 50);
    CHECK(report.at("objective").at("total").get<double>() <= 1e-3);

    const std::string csv = slurp(trace);
    CHECK(csv.rfind("iteration,objective,surrogate_min,time_ms\n", 0) == 0);

    expect_error(run("train --data " + path_of("xor.csv") + " --hidden 0 --out " +
                     path_of("never.json")),
                 2, "config_error");
    expect_error(run("train --data " + path_of("xor.csv") + " --arch thl --hidden 4 --out " +
                     path_of("never.json")),
                 2, "config_error"); // two-layer training wants two widths
    CHECK(run("train --data " + path_of("xor.csv") + " --arch mlp --out " +
              path_of("never.json"))
              .exit_code == 2);
    CHECK_FALSE(fs::exists(path_of("never.json")));
}

TEST_CASE("decompose explains a model and plot renders both artifact kinds") {
    run("gen xor --out " + path_of("xor.csv"));
    run("construct --data " + path_of("xor.csv") + " --method shl --out " + path_of("m.json"));

    const std::string report = path_of("decomp.json");
    const RunResult r = run("decompose --data " + path_of("xor.csv") + " --model " +
                            path_of("m.json") + " --mode shl --out " + report);
    CHECK(r.exit_code == 0);
    const json doc = json::parse(slurp(report));
    CHECK(doc.at("coverage_ok") == true);
    CHECK(doc.at("subsets").size() == 2);

    const std::string svg1 = path_of("decomp.svg");
    const RunResult plot1 =
        run("plot --data " + path_of("xor.csv") + " --report " + report + " --out " + svg1);
    CHECK(plot1.exit_code == 0);
    const std::string body = slurp(svg1);
    CHECK(body.rfind("<svg", 0) == 0);
    CHECK(body.find("</svg>") != std::string::npos);

    const std::string svg2 = path_of("model.svg");
    const RunResult plot2 =
        run("plot --data " + path_of("xor.csv") + " --model " + path_of("m.json") + " --out " +
            svg2);
    CHECK(plot2.exit_code == 0);
    CHECK(slurp(svg2).rfind("<svg", 0) == 0);
}

TEST_CASE("decompose rejects a mismatched model kind") {
    run("gen rings --out " + path_of("rings.csv"));
    run("construct --data " + path_of("rings.csv") + " --method thl --out " + path_of("t.json"));
    const RunResult r = run("decompose --data " + path_of("rings.csv") + " --model " +
                            path_of("t.json") + " --mode shl --out " + path_of("never.json"));
    expect_error(r, 1, "model_does_not_separate");
}

TEST_CASE("plot insists on two-dimensional data") {
    run("gen blobs --out " + path_of("blobs5.csv") +
        " --classes 2 --dim 5 --per-class 5 --separation 4 --seed 1");
    run("construct --data " + path_of("blobs5.csv") + " --method shl --out " + path_of("b5.json"));
    const RunResult r = run("plot --data " + path_of("blobs5.csv") + " --model " +
                            path_of("b5.json") + " --out " + path_of("never.svg"));
    expect_error(r, 1, "dimension_mismatch");
}

TEST_CASE("identical invocations produce identical bytes") {
    const std::string first = path_of("det1");
    const std::string second = path_of("det2");
    fs::create_directories(first);
    fs::create_directories(second);

    const auto artifacts = [&](const std::string& dir) {
        run("gen blobs --out " + dir + "/d.csv --classes 2 --dim 2 --per-class 8 --separation 4 --seed 3");
        run("construct --data " + dir + "/d.csv --method shl --out " + dir + "/c.json");
        run("train --data " + dir + "/d.csv --arch shl --hidden 3 --seed 7 --out " + dir +
            "/t.json --trace " + dir + "/t.csv");
        run("decompose --data " + dir + "/d.csv --model " + dir + "/c.json --mode shl --out " +
            dir + "/r.json");
        run("plot --data " + dir + "/d.csv --report " + dir + "/r.json --out " + dir + "/p.svg");
    };
    artifacts(first);
    artifacts(second);

    for (const char* name : {"d.csv", "c.json", "t.json", "t.csv", "r.json", "p.svg"}) {
        CAPTURE(name);
        const std::string a = slurp(first + "/" + std::string(name));
        CHECK(!a.empty());
        CHECK(a == slurp(second + "/" + std::string(name)));
    }
}

TEST_CASE("verify prints one line per property and fails loudly when sabotaged") {
    const RunResult ok = run("verify --suite descent");
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("[PASS]") != std::string::npos);
    CHECK(ok.out.find("[FAIL]") == std::string::npos);

    const RunResult bad = run("verify --suite geometry --inject-fault");
    CHECK(bad.exit_code == 1);
    CHECK(bad.out.find("[FAIL]") != std::string::npos);
}

TEST_CASE("help and unknown flags use the usual shell conventions") {
    CHECK(run("--help").exit_code == 0);
    CHECK(run("gen xor --no-such-flag --out /tmp/x.csv").exit_code == 2);
    CHECK(run("frobnicate").exit_code == 2);
}
