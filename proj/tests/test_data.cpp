#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "scrn/data.hpp"

using namespace scrn;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

} // namespace

TEST_CASE("the parity dataset is pinned") {
    const LabeledDataset d = gen_xor();
    REQUIRE(d.size() == 4);
    CHECK(d.dim() == 2);
    CHECK(d.num_classes() == 2);
    CHECK(d.points[0] == vec2(0, 0));
    CHECK(d.points[1] == vec2(1, 1));
    CHECK(d.points[2] == vec2(0, 1));
    CHECK(d.points[3] == vec2(1, 0));
    CHECK(d.labels == std::vector<int>{0, 0, 1, 1});
    CHECK(d.class_points(0).size() == 2);
    CHECK(d.complement_points(0)[0] == vec2(0, 1));
}

TEST_CASE("jitter-free rings are exact polygons with the center appended last") {
    const LabeledDataset d = gen_rings(8, 8, 1.0, 3.0, true, 0);
    REQUIRE(d.size() == 17);
    CHECK(d.points[0] == vec2(1, 0));
    const double c = std::cos(2.0 * M_PI / 8.0);
    const double s = std::sin(2.0 * M_PI / 8.0);
    CHECK(d.points[1][0] == doctest::Approx(c).epsilon(1e-15));
    CHECK(d.points[1][1] == doctest::Approx(s).epsilon(1e-15));
    CHECK(d.points[8][0] == doctest::Approx(3.0).epsilon(1e-15)); // first outer point
    CHECK(d.points[16] == vec2(0, 0));                            // center comes last
    CHECK(d.labels[16] == 1);
    for (int i = 0; i < 8; ++i)
        CHECK(d.labels[static_cast<size_t>(i)] == 0);

    const LabeledDataset bare = gen_rings(8, 8, 1.0, 3.0, false, 0);
    CHECK(bare.size() == 16);
}

TEST_CASE("ring jitter is seeded and bounded") {
    const LabeledDataset a = gen_rings(6, 6, 1.0, 3.0, true, 9, 0.05);
    const LabeledDataset b = gen_rings(6, 6, 1.0, 3.0, true, 9, 0.05);
    const LabeledDataset c = gen_rings(6, 6, 1.0, 3.0, true, 10, 0.05);
    REQUIRE(a.size() == b.size());
    bool differs = false;
    for (int i = 0; i < a.size(); ++i) {
        CHECK(a.points[static_cast<size_t>(i)] == b.points[static_cast<size_t>(i)]);
        if (a.points[static_cast<size_t>(i)] != c.points[static_cast<size_t>(i)])
            differs = true;
    }
    CHECK(differs);
    for (int i = 0; i < 6; ++i) {
        const double r = a.points[static_cast<size_t>(i)].norm();
        CHECK(r >= 1.0 - 0.05 - 1e-12);
        CHECK(r <= 1.0 + 0.05 + 1e-12);
    }
}

TEST_CASE("ring parameters are validated") {
    CHECK(error_code_of([&] { gen_rings(2, 8, 1, 3, true, 0); }) == ErrorCode::config_error);
    CHECK(error_code_of([&] { gen_rings(8, 8, -1, 3, true, 0); }) == ErrorCode::config_error);
    CHECK(error_code_of([&] { gen_rings(8, 8, 3, 1, true, 0); }) == ErrorCode::config_error);
    CHECK(error_code_of([&] { gen_rings(8, 8, 1, 3, true, 0, -0.1); }) == ErrorCode::config_error);
}

TEST_CASE("blob classes come out pairwise mutually separable") {
    const LabeledDataset d = gen_polytope_blobs(3, 3, 10, 4.0, 7);
    REQUIRE(d.size() == 30);
    CHECK(d.dim() == 3);
    CHECK(d.num_classes() == 3);
    const auto classes = d.split_by_class();
    REQUIRE(classes.size() == 3);
    const auto verdicts = pairwise_verdicts(classes, PairwiseMode::mutual_convex);
    for (size_t i = 0; i < classes.size(); ++i)
        for (size_t j = 0; j < classes.size(); ++j)
            CHECK(verdicts[i][j].separable);

    CHECK(error_code_of([&] { gen_polytope_blobs(1, 2, 5, 2.0, 0); }) == ErrorCode::config_error);
    CHECK(error_code_of([&] { gen_polytope_blobs(3, 2, 5, -1.0, 0); }) == ErrorCode::config_error);
}

TEST_CASE("dataset files round trip bit exactly") {
    LabeledDataset d;
    d.points.add(vec2(0.1, 1.0 / 3.0));
    d.points.add(vec2(3.141592653589793, -1e-17));
    d.points.add(vec2(1e300, 5e-324));
    d.labels = {0, 1, 0};

    const std::string path = "/tmp/scrn_test_data.csv";
    save_csv(d, path);
    const LabeledDataset back = load_csv(path);
    REQUIRE(back.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(back.points[static_cast<size_t>(i)] == d.points[static_cast<size_t>(i)]);
        CHECK(back.labels[static_cast<size_t>(i)] == d.labels[static_cast<size_t>(i)]);
    }
    std::remove(path.c_str());
}

TEST_CASE("the parity csv is byte-stable") {
    const std::string path = "/tmp/scrn_test_xor.csv";
    save_csv(gen_xor(), path);
    CHECK(slurp(path) == "x1,x2,label\n0,0,0\n1,1,0\n0,1,1\n1,0,1\n");
    std::remove(path.c_str());
}

TEST_CASE("csv parsing rejects malformed inputs") {
    const std::string path = "/tmp/scrn_test_bad.csv";

    spit(path, "a,b,label\n0,0,0\n");
    CHECK(error_code_of([&] { load_csv(path); }) == ErrorCode::parse_error);

    spit(path, "x1,x2,label\n0,zero,0\n");
    CHECK(error_code_of([&] { load_csv(path); }) == ErrorCode::parse_error);

    spit(path, "x1,x2,label\n0,0\n");
    CHECK(error_code_of([&] { load_csv(path); }) == ErrorCode::parse_error);

    spit(path, "x1,x2,label\n0,0,-1\n");
    CHECK(error_code_of([&] { load_csv(path); }) == ErrorCode::parse_error);

    spit(path, "");
    CHECK(error_code_of([&] { load_csv(path); }) == ErrorCode::parse_error);

    std::remove(path.c_str());
    CHECK(error_code_of([&] { load_csv(path); }) == ErrorCode::io_error);
}

TEST_CASE("doubles print in their shortest exact form") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5) == "-2.5");
    CHECK(format_double(0.7071067811865476) == "0.7071067811865476");
    const double v = 1.0 / 3.0;
    CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("label gaps leave empty classes instead of shifting indices") {
    LabeledDataset d;
    d.points.add(vec2(0, 0));
    d.points.add(vec2(1, 1));
    d.labels = {0, 2};
    CHECK(d.num_classes() == 3);
    CHECK(d.class_points(0).size() == 1);
    CHECK(d.class_points(1).empty());
    CHECK(d.class_points(2).size() == 1);
    CHECK(d.complement_points(2).size() == 1);
    CHECK(d.split_by_class().size() == 3);
}
