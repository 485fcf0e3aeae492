#include "scrn/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace scrn {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_labels(const LabeledDataset& data) {
    if (static_cast<size_t>(data.points.size()) != data.labels.size())
        fail(ErrorCode::dimension_mismatch, "label count does not match point count");
    for (int l : data.labels)
        if (l < 0)
            fail(ErrorCode::parse_error, "labels must be nonnegative integers");
}

Eigen::VectorXd sample_in_unit_ball(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd dir(n);
    for (int i = 0; i < n; ++i)
        dir[i] = gauss(rng);
    const double norm = dir.norm();
    if (norm == 0.0)
        return Eigen::VectorXd::Zero(n);
    const double radius = std::pow(unit(rng), 1.0 / static_cast<double>(n));
    return dir * (radius / norm);
}

} // namespace

int LabeledDataset::num_classes() const {
    int m = 0;
    for (int l : labels)
        m = std::max(m, l + 1);
    return m;
}

PointSet LabeledDataset::class_points(int k) const {
    PointSet out;
    for (int i = 0; i < size(); ++i)
        if (labels[static_cast<size_t>(i)] == k)
            out.add(points[i]);
    return out;
}

PointSet LabeledDataset::complement_points(int k) const {
    PointSet out;
    for (int i = 0; i < size(); ++i)
        if (labels[static_cast<size_t>(i)] != k)
            out.add(points[i]);
    return out;
}

std::vector<PointSet> LabeledDataset::split_by_class() const {
    std::vector<PointSet> out(static_cast<size_t>(num_classes()));
    for (int i = 0; i < size(); ++i)
        out[static_cast<size_t>(labels[static_cast<size_t>(i)])].add(points[i]);
    return out;
}

LabeledDataset gen_xor() {
    LabeledDataset data;
    const auto add = [&](double x, double y, int label) {
        Eigen::VectorXd p(2);
        p << x, y;
        data.points.add(p);
        data.labels.push_back(label);
    };
    add(0, 0, 0);
    add(1, 1, 0);
    add(0, 1, 1);
    add(1, 0, 1);
    return data;
}

LabeledDataset gen_rings(int n_inner, int n_outer, double r_inner, double r_outer,
                         bool include_center, uint64_t seed, double jitter) {
    if (n_inner < 3 || n_outer < 3)
        fail(ErrorCode::config_error, "ring generation needs at least 3 points per circle");
    if (r_inner <= 0.0 || r_outer <= 0.0)
        fail(ErrorCode::config_error, "ring radii must be positive");
    if (r_inner >= r_outer)
        fail(ErrorCode::config_error, "inner radius must be smaller than outer radius");
    if (jitter < 0.0)
        fail(ErrorCode::config_error, "jitter must be nonnegative");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    LabeledDataset data;
    const auto circle = [&](int count, double radius, int label) {
        for (int i = 0; i < count; ++i) {
            double angle = 2.0 * kPi * static_cast<double>(i) / count;
            double r = radius;
            if (jitter > 0.0) {
                angle += jitter * unit(rng);
                r += jitter * unit(rng);
            }
            Eigen::VectorXd p(2);
            p << r * std::cos(angle), r * std::sin(angle);
            data.points.add(p);
            data.labels.push_back(label);
        }
    };
    circle(n_inner, r_inner, 0);
    circle(n_outer, r_outer, 1);
    if (include_center) {
        data.points.add(Eigen::VectorXd::Zero(2));
        data.labels.push_back(1);
    }
    return data;
}

LabeledDataset gen_polytope_blobs(int m, int n, int points_per_class, double separation,
                                  uint64_t seed) {
    if (m < 2)
        fail(ErrorCode::config_error, "blob generation needs at least two classes");
    if (n < 1 || points_per_class < 1)
        fail(ErrorCode::config_error, "blob dimensions and counts must be positive");
    if (separation <= 0.0)
        fail(ErrorCode::config_error, "separation must be positive");

    for (int attempt = 0; attempt < 10; ++attempt) {
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * static_cast<uint64_t>(attempt));
        const double side = separation * std::max(2.0, std::cbrt(static_cast<double>(m)) * 2.0);
        std::uniform_real_distribution<double> in_box(0.0, side);

        std::vector<Eigen::VectorXd> centers;
        bool placed = true;
        for (int k = 0; k < m && placed; ++k) {
            placed = false;
            for (int tries = 0; tries < 1000; ++tries) {
                Eigen::VectorXd c(n);
                for (int i = 0; i < n; ++i)
                    c[i] = in_box(rng);
                bool ok = true;
                for (const auto& other : centers)
                    if ((c - other).norm() < separation) {
                        ok = false;
                        break;
                    }
                if (ok) {
                    centers.push_back(std::move(c));
                    placed = true;
                    break;
                }
            }
        }
        if (!placed)
            continue;

        LabeledDataset data;
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < points_per_class; ++i) {
                data.points.add(centers[static_cast<size_t>(k)] + sample_in_unit_ball(n, rng));
                data.labels.push_back(k);
            }

        const auto grid = pairwise_verdicts(data.split_by_class(), PairwiseMode::mutual_convex);
        bool all_ok = true;
        for (int i = 0; i < m && all_ok; ++i)
            for (int j = i + 1; j < m && all_ok; ++j)
                all_ok = grid[static_cast<size_t>(i)][static_cast<size_t>(j)].separable;
        if (all_ok)
            return data;
    }
    fail(ErrorCode::generation_failed,
         "could not generate mutually separable blobs after 10 attempts");
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

LabeledDataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorCode::io_error, "cannot open dataset file '" + path + "'");

    std::string line;
    if (!std::getline(in, line))
        fail(ErrorCode::parse_error, path + ": empty file");

    // Header x1,...,xn,label fixes the dimension for every following row.
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            header.push_back(cell);
    }
    if (header.size() < 2 || header.back() != "label")
        fail(ErrorCode::parse_error, path + ": header must be x1,...,xn,label");
    const int n = static_cast<int>(header.size()) - 1;
    for (int i = 0; i < n; ++i)
        if (header[static_cast<size_t>(i)] != "x" + std::to_string(i + 1))
            fail(ErrorCode::parse_error, path + ": header must be x1,...,xn,label");

    LabeledDataset data;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (static_cast<int>(cells.size()) != n + 1)
            fail(ErrorCode::parse_error,
                 path + ":" + std::to_string(line_no) + ": expected " + std::to_string(n + 1) +
                     " fields, got " + std::to_string(cells.size()));

        Eigen::VectorXd p(n);
        for (int i = 0; i < n; ++i) {
            const std::string& s = cells[static_cast<size_t>(i)];
            double value = 0.0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
            if (res.ec != std::errc() || res.ptr != s.data() + s.size())
                fail(ErrorCode::parse_error, path + ":" + std::to_string(line_no) +
                                                 ": bad number '" + s + "'");
            p[i] = value;
        }
        const std::string& ls = cells.back();
        int label = 0;
        const auto res = std::from_chars(ls.data(), ls.data() + ls.size(), label);
        if (res.ec != std::errc() || res.ptr != ls.data() + ls.size() || label < 0)
            fail(ErrorCode::parse_error,
                 path + ":" + std::to_string(line_no) + ": bad label '" + ls + "'");
        data.points.add(p);
        data.labels.push_back(label);
    }
    if (data.points.empty())
        fail(ErrorCode::parse_error, path + ": no data rows");
    check_labels(data);
    return data;
}

void save_csv(const LabeledDataset& data, const std::string& path) {
    check_labels(data);
    std::ofstream out(path);
    if (!out)
        fail(ErrorCode::io_error, "cannot write dataset file '" + path + "'");
    for (int i = 0; i < data.dim(); ++i)
        out << "x" << (i + 1) << ",";
    out << "label\n";
    for (int i = 0; i < data.size(); ++i) {
        for (int j = 0; j < data.dim(); ++j)
            out << format_double(data.points[i][j]) << ",";
        out << data.labels[static_cast<size_t>(i)] << "\n";
    }
}

} // namespace scrn
