#include "srgp/expr.hpp"

#include "primal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srgp {

const char* op_name(Op op) {
    switch (op) {
    case Op::Add: return "+";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Aq: return "aq";
    case Op::LogAbs: return "logabs";
    case Op::Exp: return "exp";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tanh: return "tanh";
    case Op::Square: return "sqr";
    case Op::SqrtAbs: return "sqrtabs";
    case Op::Cbrt: return "cbrt";
    case Op::Variable: return "var";
    case Op::Constant: return "const";
    }
    return "?";
}

ExprTree::ExprTree(std::vector<Node> preorder) : nodes_(std::move(preorder)) {
    if (nodes_.empty()) {
        throw std::invalid_argument("expression tree must have at least one node");
    }

    // Recompute subtree sizes from arities (backward scan with a size stack);
    // this validates that the node list is one well-formed preorder tree.
    std::vector<std::int32_t> stack;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        Node& n = nodes_[i];
        if (is_leaf(n.op)) {
            if (n.arity != 0) throw std::invalid_argument("leaf node with nonzero arity");
            if (n.op == Op::Variable && n.var_index < 0) {
                throw std::invalid_argument("variable node without column index");
            }
            n.subtree_size = 1;
        } else {
            if (is_unary(n.op) && n.arity != 1) {
                throw std::invalid_argument("unary operator must have exactly one child");
            }
            if (is_binary_only(n.op) && n.arity != 2) {
                throw std::invalid_argument("div/aq must have exactly two children");
            }
            if (is_nary(n.op) && (n.arity < 2 || n.arity > 3)) {
                throw std::invalid_argument("add/mul arity must be 2 or 3");
            }
            if (stack.size() < n.arity) {
                throw std::invalid_argument("malformed preorder node list");
            }
            std::int32_t total = 1;
            for (std::uint8_t c = 0; c < n.arity; ++c) {
                total += stack.back();
                stack.pop_back();
            }
            n.subtree_size = total;
        }
        stack.push_back(n.subtree_size);
    }
    if (stack.size() != 1 || stack.back() != static_cast<std::int32_t>(nodes_.size())) {
        throw std::invalid_argument("node list does not form a single tree");
    }

    // Preorder slot assignment. Constants are always parameters; variables are
    // parameters unless the builder pinned the coefficient (slot == -1).
    std::int32_t next = 0;
    for (Node& n : nodes_) {
        if (n.op == Op::Constant) {
            n.slot = next++;
        } else if (n.op == Op::Variable) {
            if (n.slot >= 0) n.slot = next++;
            min_inputs_ = std::max(min_inputs_, n.var_index + 1);
        } else {
            n.slot = -1;
        }
    }
    param_count_ = next;
}

void ExprTree::child_indices(std::size_t index, std::int32_t out[3]) const {
    const Node& n = nodes_[index];
    std::int32_t c = static_cast<std::int32_t>(index) + 1;
    for (std::uint8_t j = 0; j < n.arity; ++j) {
        out[j] = c;
        c += nodes_[static_cast<std::size_t>(c)].subtree_size;
    }
}

Eigen::VectorXd ExprTree::extract_parameters() const {
    Eigen::VectorXd theta(param_count_);
    for (const Node& n : nodes_) {
        if (n.has_slot()) theta[n.slot] = n.value;
    }
    return theta;
}

ExprTree ExprTree::inject_parameters(const Eigen::VectorXd& theta) const {
    if (theta.size() != param_count_) {
        throw std::invalid_argument("parameter vector length " + std::to_string(theta.size()) +
                                    " does not match slot count " + std::to_string(param_count_));
    }
    if (!theta.allFinite()) {
        throw std::invalid_argument("injected parameters must be finite");
    }
    ExprTree copy(*this);
    for (Node& n : copy.nodes_) {
        if (n.has_slot()) n.value = theta[n.slot];
    }
    return copy;
}

bool ExprTree::same_structure(const ExprTree& other) const {
    if (nodes_.size() != other.nodes_.size()) return false;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& a = nodes_[i];
        const Node& b = other.nodes_[i];
        if (a.op != b.op || a.arity != b.arity || a.var_index != b.var_index ||
            a.slot != b.slot) {
            return false;
        }
    }
    return true;
}

namespace detail {

void eval_all_nodes(const ExprTree& tree, const Eigen::VectorXd& theta,
                    const Eigen::MatrixXd& X, Eigen::MatrixXd& values) {
    const auto nodes = tree.nodes();
    const Eigen::Index n = X.rows();
    values.resize(n, static_cast<Eigen::Index>(nodes.size()));

    std::int32_t ch[3];
    for (std::size_t i = nodes.size(); i-- > 0;) {
        const Node& node = nodes[i];
        auto out = values.col(static_cast<Eigen::Index>(i));
        switch (node.op) {
        case Op::Variable: {
            double c = node.has_slot() ? theta[node.slot] : 1.0;
            out = c * X.col(node.var_index);
            break;
        }
        case Op::Constant:
            out.setConstant(theta[nodes[i].slot]);
            break;
        default: {
            tree.child_indices(i, ch);
            auto c0 = values.col(ch[0]);
            switch (node.op) {
            case Op::Add:
                out = c0 + values.col(ch[1]);
                if (node.arity == 3) out += values.col(ch[2]);
                break;
            case Op::Mul:
                out = c0.cwiseProduct(values.col(ch[1]));
                if (node.arity == 3) out = out.cwiseProduct(values.col(ch[2]));
                break;
            case Op::Div:
                out = c0.cwiseQuotient(values.col(ch[1]));
                break;
            case Op::Aq:
                out = c0.array() / (1.0 + values.col(ch[1]).array().square()).sqrt();
                break;
            case Op::LogAbs:
                out = c0.array().abs().log();
                break;
            case Op::Exp:
                out = c0.array().exp();
                break;
            case Op::Sin:
                out = c0.array().sin();
                break;
            case Op::Cos:
                out = c0.array().cos();
                break;
            case Op::Tanh:
                out = c0.array().tanh();
                break;
            case Op::Square:
                out = c0.array().square();
                break;
            case Op::SqrtAbs:
                out = c0.array().abs().sqrt();
                break;
            case Op::Cbrt:
                out = c0.array().unaryExpr([](double v) { return std::cbrt(v); });
                break;
            default:
                break;
            }
        }
        }
    }
}

} // namespace detail

Eigen::VectorXd evaluate(const ExprTree& tree, const Eigen::VectorXd& theta,
                         const Eigen::MatrixXd& X) {
    if (theta.size() != tree.param_count()) {
        throw std::invalid_argument("theta length does not match tree parameter count");
    }
    if (X.cols() < tree.min_input_count()) {
        throw std::invalid_argument("input matrix has fewer columns than the tree references");
    }
    Eigen::MatrixXd values;
    detail::eval_all_nodes(tree, theta, X, values);
    return values.col(0);
}

Eigen::VectorXd residuals(const ExprTree& tree, const Eigen::VectorXd& theta,
                          const Dataset& dataset) {
    return dataset.y - evaluate(tree, theta, dataset.X);
}

FunctionSet FunctionSet::small() {
    return FunctionSet{FunctionSetName::Small, {Op::Add, Op::Mul, Op::Div}};
}

FunctionSet FunctionSet::large() {
    return FunctionSet{FunctionSetName::Large,
                       {Op::Add, Op::Mul, Op::Div, Op::LogAbs, Op::Exp, Op::Aq, Op::Sin, Op::Cos,
                        Op::Tanh, Op::Square, Op::SqrtAbs, Op::Cbrt}};
}

bool FunctionSet::contains(Op op) const {
    return std::find(ops.begin(), ops.end(), op) != ops.end();
}

bool FunctionSet::has_unary() const {
    return std::any_of(ops.begin(), ops.end(), [](Op op) { return is_unary(op); });
}

std::string to_string(FunctionSetName name) {
    return name == FunctionSetName::Small ? "small" : "large";
}

namespace build {

namespace {
Node make_leaf(Op op, int var_index, int slot, double value) {
    Node n;
    n.op = op;
    n.arity = 0;
    n.var_index = var_index;
    n.slot = slot;
    n.value = value;
    return n;
}
} // namespace

Fragment variable(int var_index, double coeff) {
    return {make_leaf(Op::Variable, var_index, 0, coeff)};
}

Fragment bare_variable(int var_index) {
    return {make_leaf(Op::Variable, var_index, -1, 1.0)};
}

Fragment constant(double value) {
    return {make_leaf(Op::Constant, -1, 0, value)};
}

Fragment unary(Op op, Fragment child) {
    Fragment out;
    out.reserve(child.size() + 1);
    Node n;
    n.op = op;
    n.arity = 1;
    out.push_back(n);
    out.insert(out.end(), child.begin(), child.end());
    return out;
}

Fragment nary(Op op, Fragment a, Fragment b) {
    Fragment out;
    out.reserve(a.size() + b.size() + 1);
    Node n;
    n.op = op;
    n.arity = 2;
    out.push_back(n);
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

Fragment nary(Op op, Fragment a, Fragment b, Fragment c) {
    Fragment out;
    out.reserve(a.size() + b.size() + c.size() + 1);
    Node n;
    n.op = op;
    n.arity = 3;
    out.push_back(n);
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    out.insert(out.end(), c.begin(), c.end());
    return out;
}

} // namespace build

CaseStudyTrees build_case_study_trees() {
    using namespace build;
    constexpr int X = 0; // first Pagie variable
    constexpr int Y = 1; // second Pagie variable

    // Slot order follows the preorder traversal, matching the subscripts in
    // the worked example.
    Fragment original = nary(
        Op::Add, constant(1.0),
        nary(Op::Mul, constant(1.0),
             nary(Op::Div, nary(Op::Mul, variable(Y, 1.0), variable(Y, 1.0)),
                  nary(Op::Add,
                       nary(Op::Mul,
                            nary(Op::Div, constant(1.0),
                                 nary(Op::Mul, variable(X, 1.0), variable(X, 1.0))),
                            constant(1.0)),
                       nary(Op::Mul, variable(Y, 1.0), variable(Y, 1.0))))));

    Fragment simplified = nary(
        Op::Add, constant(1.0),
        nary(Op::Div, nary(Op::Mul, constant(1.0), bare_variable(Y), bare_variable(Y)),
             nary(Op::Add, nary(Op::Mul, constant(1.0), bare_variable(Y), bare_variable(Y)),
                  nary(Op::Div, constant(1.0),
                       nary(Op::Mul, bare_variable(X), bare_variable(X))))));

    Fragment fixed = nary(
        Op::Add, constant(1.0),
        nary(Op::Div, nary(Op::Mul, constant(1.0), bare_variable(Y), bare_variable(Y)),
             nary(Op::Add, nary(Op::Mul, bare_variable(Y), bare_variable(Y)),
                  nary(Op::Div, constant(1.0),
                       nary(Op::Mul, bare_variable(X), bare_variable(X))))));

    return CaseStudyTrees{ExprTree(std::move(original)), ExprTree(std::move(simplified)),
                          ExprTree(std::move(fixed))};
}

} // namespace srgp
