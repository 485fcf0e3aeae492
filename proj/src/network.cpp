#include "scrn/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace scrn {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void require_dims(bool ok, const std::string& what) {
    if (!ok)
        fail(ErrorCode::dimension_mismatch, what);
}

void collect_nonpositive_violations(const Eigen::MatrixXd& m, const std::string& where,
                                    std::vector<SignViolation>& out) {
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (m(i, j) > 0.0)
                out.push_back({where, i, j, m(i, j)});
}

void require_input(const Eigen::VectorXd& x, int dim) {
    require_dims(static_cast<int>(x.size()) == dim,
                 "input has dimension " + std::to_string(x.size()) + ", model expects " +
                     std::to_string(dim));
}

ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

ordered_json vector_to_json(const Eigen::VectorXd& v) {
    ordered_json arr = ordered_json::array();
    for (int i = 0; i < v.size(); ++i)
        arr.push_back(v[i]);
    return arr;
}

const json& field(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end())
        fail(ErrorCode::parse_error, std::string("model document missing field '") + key + "'");
    return *it;
}

Eigen::MatrixXd matrix_from_json(const json& arr, const char* key, int rows, int cols) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != rows)
        fail(ErrorCode::parse_error,
             std::string("field '") + key + "' must be an array of " + std::to_string(rows) +
                 " rows");
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const json& row = arr[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            fail(ErrorCode::parse_error,
                 std::string("field '") + key + "' row " + std::to_string(i) + " must have " +
                     std::to_string(cols) + " entries");
        for (int j = 0; j < cols; ++j) {
            const json& cell = row[static_cast<size_t>(j)];
            if (!cell.is_number())
                fail(ErrorCode::parse_error,
                     std::string("field '") + key + "' contains a non-numeric entry");
            m(i, j) = cell.get<double>();
        }
    }
    return m;
}

Eigen::VectorXd vector_from_json(const json& arr, const char* key, int size) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != size)
        fail(ErrorCode::parse_error,
             std::string("field '") + key + "' must be an array of " + std::to_string(size) +
                 " numbers");
    Eigen::VectorXd v(size);
    for (int i = 0; i < size; ++i) {
        const json& cell = arr[static_cast<size_t>(i)];
        if (!cell.is_number())
            fail(ErrorCode::parse_error,
                 std::string("field '") + key + "' contains a non-numeric entry");
        v[i] = cell.get<double>();
    }
    return v;
}

int dim_field(const json& dims, const char* key) {
    const json& v = field(dims, key);
    if (!v.is_number_integer() || v.get<int>() < 0)
        fail(ErrorCode::parse_error,
             std::string("dims field '") + key + "' must be a nonnegative integer");
    return v.get<int>();
}

void require_nonpositive_or_throw(const std::vector<SignViolation>& violations) {
    if (!violations.empty()) {
        const SignViolation& v = violations.front();
        fail(ErrorCode::sign_constraint_violated,
             v.where + "(" + std::to_string(v.row) + "," + std::to_string(v.col) + ") = " +
                 std::to_string(v.value) + " must be nonpositive");
    }
}

} // namespace

Eigen::VectorXd relu(const Eigen::VectorXd& z) { return z.cwiseMax(0.0); }

Eigen::VectorXd forward_scrn1(const Scrn1Model& m, const Eigen::VectorXd& x) {
    require_input(x, m.input_dim());
    return m.A.transpose() * relu(m.hidden.W.transpose() * x + m.hidden.b) + m.c;
}

Eigen::VectorXd forward_scrn2(const Scrn2Model& m, const Eigen::VectorXd& x) {
    require_input(x, m.input_dim());
    const Eigen::VectorXd z1 = relu(m.layer1.W.transpose() * x + m.layer1.b);
    const Eigen::VectorXd z2 = relu(m.layer2.W.transpose() * z1 + m.layer2.b);
    return m.A.transpose() * z2 + m.c;
}

double forward_canonical_shl(const CanonicalShl& m, const Eigen::VectorXd& x) {
    require_input(x, m.input_dim());
    return m.b0 - relu(m.W.transpose() * x + m.b).sum();
}

void validate(const Scrn1Model& m) {
    require_dims(m.hidden.b.size() == m.hidden.W.cols(), "hidden bias length != hidden units");
    require_dims(m.A.rows() == m.hidden.W.cols(), "A rows != hidden units");
    require_dims(m.c.size() == m.A.cols(), "c length != outputs");
    require_nonpositive_or_throw(check_sign_constraints(m));
}

void validate(const Scrn2Model& m) {
    require_dims(m.layer1.b.size() == m.layer1.W.cols(), "layer1 bias length != layer1 units");
    require_dims(m.layer2.W.rows() == m.layer1.W.cols(), "layer2 input != layer1 units");
    require_dims(m.layer2.b.size() == m.layer2.W.cols(), "layer2 bias length != layer2 units");
    require_dims(m.A.rows() == m.layer2.W.cols(), "A rows != layer2 units");
    require_dims(m.c.size() == m.A.cols(), "c length != outputs");
    require_nonpositive_or_throw(check_sign_constraints(m));
}

void validate(const CanonicalShl& m) {
    require_dims(m.b.size() == m.W.cols(), "bias length != hidden units");
}

std::vector<SignViolation> check_sign_constraints(const Scrn1Model& m) {
    std::vector<SignViolation> out;
    collect_nonpositive_violations(m.A, "A", out);
    return out;
}

std::vector<SignViolation> check_sign_constraints(const Scrn2Model& m) {
    std::vector<SignViolation> out;
    collect_nonpositive_violations(m.layer2.W, "W2", out);
    collect_nonpositive_violations(m.A, "A", out);
    return out;
}

ActiveSet active_set(const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                     const Eigen::VectorXd& x) {
    const Eigen::VectorXd pre = W.transpose() * x + b;
    ActiveSet out;
    for (int k = 0; k < pre.size(); ++k)
        if (pre[k] > 0.0)
            out.push_back(k);
    return out;
}

double concavity_probe(const std::function<double(const Eigen::VectorXd&)>& f,
                       const Eigen::VectorXd& x0, const Eigen::VectorXd& x1, int samples) {
    if (samples < 1)
        fail(ErrorCode::config_error, "concavity probe needs at least one sample");
    if (x0.size() != x1.size())
        fail(ErrorCode::dimension_mismatch, "segment endpoints differ in dimension");
    const double f0 = f(x0);
    const double f1 = f(x1);
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= samples; ++i) {
        const double t = static_cast<double>(i) / (samples + 1);
        const double chord = (1.0 - t) * f0 + t * f1;
        const double val = f((1.0 - t) * x0 + t * x1);
        if (!std::isfinite(val))
            fail(ErrorCode::non_finite, "probed function returned a non-finite value");
        worst = std::max(worst, chord - val);
    }
    return worst;
}

Scrn1Model to_scrn1(const CanonicalShl& m) {
    validate(m);
    Scrn1Model out;
    out.hidden.W = m.W;
    out.hidden.b = m.b;
    out.A = Eigen::MatrixXd::Constant(m.hidden_dim(), 1, -1.0);
    out.c = Eigen::VectorXd::Constant(1, m.b0);
    return out;
}

CanonicalShl to_canonical(const Scrn1Model& m) {
    validate(m);
    if (m.output_dim() != 1)
        fail(ErrorCode::dimension_mismatch,
             "only single-output models fold into the canonical form");
    CanonicalShl out;
    out.b0 = m.c[0];
    out.W = m.hidden.W;
    out.b = m.hidden.b;
    // a_k * max(0, t) = -max(0, |a_k| * t) for a_k <= 0, so the magnitude
    // moves inside the rectifier.
    for (int k = 0; k < m.hidden_dim(); ++k) {
        const double scale = -m.A(k, 0);
        out.W.col(k) *= scale;
        out.b[k] *= scale;
    }
    return out;
}

nlohmann::ordered_json serialize(const Model& m) {
    ordered_json doc;
    doc["schema"] = 1;
    if (const auto* m1 = std::get_if<Scrn1Model>(&m)) {
        validate(*m1);
        doc["kind"] = "scrn1";
        doc["dims"] = {{"input", m1->input_dim()},
                       {"hidden", m1->hidden_dim()},
                       {"output", m1->output_dim()}};
        doc["W"] = matrix_to_json(m1->hidden.W);
        doc["b"] = vector_to_json(m1->hidden.b);
        doc["A"] = matrix_to_json(m1->A);
        doc["c"] = vector_to_json(m1->c);
        doc["sign_constraints"] = {{"A", "nonpositive"}};
    } else if (const auto* m2 = std::get_if<Scrn2Model>(&m)) {
        validate(*m2);
        doc["kind"] = "scrn2";
        doc["dims"] = {{"input", m2->input_dim()},
                       {"hidden1", m2->hidden1_dim()},
                       {"hidden2", m2->hidden2_dim()},
                       {"output", m2->output_dim()}};
        doc["W1"] = matrix_to_json(m2->layer1.W);
        doc["b1"] = vector_to_json(m2->layer1.b);
        doc["W2"] = matrix_to_json(m2->layer2.W);
        doc["b2"] = vector_to_json(m2->layer2.b);
        doc["A"] = matrix_to_json(m2->A);
        doc["c"] = vector_to_json(m2->c);
        doc["sign_constraints"] = {{"W2", "nonpositive"}, {"A", "nonpositive"}};
    } else {
        const auto& mc = std::get<CanonicalShl>(m);
        validate(mc);
        doc["kind"] = "canonical_shl";
        doc["dims"] = {{"input", mc.input_dim()}, {"hidden", mc.hidden_dim()}};
        doc["b0"] = mc.b0;
        doc["W"] = matrix_to_json(mc.W);
        doc["b"] = vector_to_json(mc.b);
        doc["sign_constraints"] = {{"output", "fixed_minus_one"}};
    }
    return doc;
}

Model deserialize(const json& doc) {
    if (!doc.is_object())
        fail(ErrorCode::parse_error, "model document must be a JSON object");
    const json& schema = field(doc, "schema");
    if (!schema.is_number_integer() || schema.get<int>() != 1)
        fail(ErrorCode::parse_error, "unsupported model schema version");
    const std::string kind = field(doc, "kind").get<std::string>();
    const json& dims = field(doc, "dims");

    if (kind == "scrn1") {
        const int n = dim_field(dims, "input");
        const int l = dim_field(dims, "hidden");
        const int m = dim_field(dims, "output");
        Scrn1Model out;
        out.hidden.W = matrix_from_json(field(doc, "W"), "W", n, l);
        out.hidden.b = vector_from_json(field(doc, "b"), "b", l);
        out.A = matrix_from_json(field(doc, "A"), "A", l, m);
        out.c = vector_from_json(field(doc, "c"), "c", m);
        validate(out);
        return out;
    }
    if (kind == "scrn2") {
        const int n = dim_field(dims, "input");
        const int l1 = dim_field(dims, "hidden1");
        const int l2 = dim_field(dims, "hidden2");
        const int m = dim_field(dims, "output");
        Scrn2Model out;
        out.layer1.W = matrix_from_json(field(doc, "W1"), "W1", n, l1);
        out.layer1.b = vector_from_json(field(doc, "b1"), "b1", l1);
        out.layer2.W = matrix_from_json(field(doc, "W2"), "W2", l1, l2);
        out.layer2.b = vector_from_json(field(doc, "b2"), "b2", l2);
        out.layer2.constraint = SignConstraint::nonpositive;
        out.A = matrix_from_json(field(doc, "A"), "A", l2, m);
        out.c = vector_from_json(field(doc, "c"), "c", m);
        validate(out);
        return out;
    }
    if (kind == "canonical_shl") {
        const int n = dim_field(dims, "input");
        const int l = dim_field(dims, "hidden");
        CanonicalShl out;
        const json& b0 = field(doc, "b0");
        if (!b0.is_number())
            fail(ErrorCode::parse_error, "field 'b0' must be a number");
        out.b0 = b0.get<double>();
        out.W = matrix_from_json(field(doc, "W"), "W", n, l);
        out.b = vector_from_json(field(doc, "b"), "b", l);
        validate(out);
        return out;
    }
    fail(ErrorCode::parse_error, "unknown model kind '" + kind + "'");
}

Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorCode::io_error, "cannot open model file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        fail(ErrorCode::parse_error, "model file '" + path + "': " + e.what());
    }
    return deserialize(doc);
}

void save_model(const Model& m, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        fail(ErrorCode::io_error, "cannot write model file '" + path + "'");
    out << serialize(m).dump(2) << "\n";
}

int model_input_dim(const Model& m) {
    if (const auto* m1 = std::get_if<Scrn1Model>(&m))
        return m1->input_dim();
    if (const auto* m2 = std::get_if<Scrn2Model>(&m))
        return m2->input_dim();
    return std::get<CanonicalShl>(m).input_dim();
}

int model_output_dim(const Model& m) {
    if (const auto* m1 = std::get_if<Scrn1Model>(&m))
        return m1->output_dim();
    if (const auto* m2 = std::get_if<Scrn2Model>(&m))
        return m2->output_dim();
    return 1;
}

double model_output(const Model& m, const Eigen::VectorXd& x, int output) {
    if (const auto* m1 = std::get_if<Scrn1Model>(&m))
        return forward_scrn1(*m1, x)[output];
    if (const auto* m2 = std::get_if<Scrn2Model>(&m))
        return forward_scrn2(*m2, x)[output];
    return forward_canonical_shl(std::get<CanonicalShl>(m), x);
}

Eigen::VectorXd model_outputs(const Model& m, const Eigen::VectorXd& x) {
    if (const auto* m1 = std::get_if<Scrn1Model>(&m))
        return forward_scrn1(*m1, x);
    if (const auto* m2 = std::get_if<Scrn2Model>(&m))
        return forward_scrn2(*m2, x);
    return Eigen::VectorXd::Constant(1, forward_canonical_shl(std::get<CanonicalShl>(m), x));
}

} // namespace scrn
