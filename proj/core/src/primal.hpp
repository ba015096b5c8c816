#pragma once

#include "srgp/expr.hpp"

#include <Eigen/Core>

namespace srgp::detail {

/// Evaluates every node of the tree over all rows of X; column i of `values`
/// holds node i's output vector. Children live at higher preorder indices
/// than their parent, so a reverse scan is a valid evaluation order.
void eval_all_nodes(const ExprTree& tree, const Eigen::VectorXd& theta,
                    const Eigen::MatrixXd& X, Eigen::MatrixXd& values);

} // namespace srgp::detail
