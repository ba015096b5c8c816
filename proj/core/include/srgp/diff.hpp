#pragma once

#include "srgp/dataset.hpp"
#include "srgp/expr.hpp"

#include <Eigen/Core>

namespace srgp {

/// n x k matrix of residual partials dF_i/dtheta_j = -df(x_i)/dtheta_j.
/// Entries may be non-finite for pathological expressions; the flag records
/// that instead of the matrix being silently used downstream.
struct Jacobian {
    Eigen::MatrixXd values;
    bool all_finite = true;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

/// Exact forward-mode Jacobian: one tangent sweep per parameter slot along the
/// leaf-to-root path, using cached primal node values. Exact up to rounding
/// (not finite-difference approximate).
Jacobian jacobian(const ExprTree& tree, const Eigen::VectorXd& theta, const Dataset& dataset);

} // namespace srgp
