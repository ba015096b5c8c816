#pragma once

#include "srgp/dataset.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace srgp {

enum class Op : std::uint8_t {
    Add,      // n-ary (2-3)
    Mul,      // n-ary (2-3)
    Div,      // binary, unprotected real division
    Aq,       // binary, aq(a,b) = a / sqrt(1 + b^2)
    LogAbs,   // log|x|
    Exp,
    Sin,
    Cos,
    Tanh,
    Square,   // x^2
    SqrtAbs,  // sqrt|x|
    Cbrt,
    Variable, // coefficient * column; the coefficient is one parameter slot
    Constant, // one parameter slot
};

constexpr bool is_leaf(Op op) { return op == Op::Variable || op == Op::Constant; }
constexpr bool is_unary(Op op) {
    return op == Op::LogAbs || op == Op::Exp || op == Op::Sin || op == Op::Cos ||
           op == Op::Tanh || op == Op::Square || op == Op::SqrtAbs || op == Op::Cbrt;
}
constexpr bool is_nary(Op op) { return op == Op::Add || op == Op::Mul; }
constexpr bool is_binary_only(Op op) { return op == Op::Div || op == Op::Aq; }

const char* op_name(Op op);

/// One tree node in preorder storage. A subtree occupies the contiguous index
/// range [i, i + subtree_size); the first child of an internal node i is i+1.
struct Node {
    Op op = Op::Constant;
    std::uint8_t arity = 0;         ///< child count, 0 for leaves
    std::int32_t var_index = -1;    ///< dataset column, Variable only
    std::int32_t slot = -1;         ///< parameter slot, -1 when the node holds no parameter
    std::int32_t subtree_size = 1;  ///< nodes in the subtree rooted here
    double value = 0.0;             ///< current coefficient / constant value

    bool has_slot() const { return slot >= 0; }
};

/// Rooted expression tree over the function/terminal sets. Immutable after
/// construction; structural operators build new trees. Parameter slots are
/// assigned by preorder traversal over slot-bearing nodes, so they form the
/// contiguous range 0..k and every subtree covers a contiguous slot interval.
///
/// Variables created by the search always carry a multiplicative coefficient
/// (counted as a single node). Fixture builders may create bare variables
/// with the coefficient pinned to 1 and no slot.
class ExprTree {
public:
    /// Takes preorder nodes, validates arity/structure, assigns slots.
    explicit ExprTree(std::vector<Node> preorder);

    std::span<const Node> nodes() const { return nodes_; }
    const Node& root() const { return nodes_.front(); }

    /// Number of parameter slots (coefficiented variables + constants).
    int param_count() const { return param_count_; }
    /// Node count under the one-node-per-coefficiented-variable convention.
    int size() const { return static_cast<int>(nodes_.size()); }
    /// Largest referenced dataset column + 1 (0 when the tree has no variables).
    int min_input_count() const { return min_inputs_; }

    /// Child node indices of the internal node at `index`.
    void child_indices(std::size_t index, std::int32_t out[3]) const;

    /// Parameter vector in slot order.
    Eigen::VectorXd extract_parameters() const;
    /// New tree with slot values replaced by `theta` (length must equal k).
    ExprTree inject_parameters(const Eigen::VectorXd& theta) const;

    bool same_structure(const ExprTree& other) const;

private:
    std::vector<Node> nodes_;
    int param_count_ = 0;
    int min_inputs_ = 0;
};

/// f(X, theta) evaluated rowwise. Non-finite outputs propagate; they are not
/// errors here (fitness layers sentinel them).
Eigen::VectorXd evaluate(const ExprTree& tree, const Eigen::VectorXd& theta,
                         const Eigen::MatrixXd& X);

/// F = y - f(X, theta); squared norm equals the SSE objective.
Eigen::VectorXd residuals(const ExprTree& tree, const Eigen::VectorXd& theta,
                          const Dataset& dataset);

inline Eigen::VectorXd extract_parameters(const ExprTree& tree) { return tree.extract_parameters(); }
inline ExprTree inject_parameters(const ExprTree& tree, const Eigen::VectorXd& theta) {
    return tree.inject_parameters(theta);
}
inline int tree_size(const ExprTree& tree) { return tree.size(); }

enum class FunctionSetName { Small, Large };

/// Allowed internal operators. Small = {+, *, /}; Large adds the unary
/// functions and the analytic quotient.
struct FunctionSet {
    FunctionSetName name = FunctionSetName::Small;
    std::vector<Op> ops;

    static FunctionSet small();
    static FunctionSet large();
    bool contains(Op op) const;
    bool has_unary() const;
};

std::string to_string(FunctionSetName name);

/// Subtree building blocks for fixtures and tests (preorder fragments).
namespace build {
using Fragment = std::vector<Node>;

Fragment variable(int var_index, double coeff);
Fragment bare_variable(int var_index); ///< coefficient pinned to 1, no slot
Fragment constant(double value);
Fragment unary(Op op, Fragment child);
Fragment nary(Op op, Fragment a, Fragment b);
Fragment nary(Op op, Fragment a, Fragment b, Fragment c);
} // namespace build

/// The three worked expressions over the Pagie variables (x1 = X, x2 = Y):
/// the overparameterized tree as produced by the search (10 parameters), its
/// algebraically simplified form (4), and the re-parameterized form (3).
struct CaseStudyTrees {
    ExprTree original;
    ExprTree simplified;
    ExprTree fixed;
};

CaseStudyTrees build_case_study_trees();

} // namespace srgp
