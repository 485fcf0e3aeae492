#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "scrn/errors.hpp"

inline Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

inline Eigen::VectorXd vec3(double a, double b, double c) {
    Eigen::VectorXd v(3);
    v << a, b, c;
    return v;
}

// Runs fn and reports which library error it raised, if any.
template <typename F> std::optional<scrn::ErrorCode> error_code_of(F&& fn) {
    try {
        std::forward<F>(fn)();
    } catch (const scrn::Error& e) {
        return e.code();
    }
    return std::nullopt;
}
