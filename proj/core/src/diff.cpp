#include "srgp/diff.hpp"

#include "primal.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace srgp {

Jacobian jacobian(const ExprTree& tree, const Eigen::VectorXd& theta, const Dataset& dataset) {
    if (theta.size() != tree.param_count()) {
        throw std::invalid_argument("theta length does not match tree parameter count");
    }
    if (dataset.X.cols() < tree.min_input_count()) {
        throw std::invalid_argument("dataset has fewer columns than the tree references");
    }
    if (dataset.X.rows() < 1) {
        throw std::invalid_argument("dataset must have at least one row");
    }

    const auto nodes = tree.nodes();
    const Eigen::Index n = dataset.X.rows();
    const int k = tree.param_count();

    Eigen::MatrixXd values;
    detail::eval_all_nodes(tree, theta, dataset.X, values);

    // Parent links and the leaf that owns each slot.
    std::vector<std::int32_t> parent(nodes.size(), -1);
    std::vector<std::int32_t> slot_leaf(static_cast<std::size_t>(k), -1);
    std::int32_t ch[3];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node& node = nodes[i];
        if (node.has_slot()) slot_leaf[static_cast<std::size_t>(node.slot)] = static_cast<std::int32_t>(i);
        tree.child_indices(i, ch);
        for (std::uint8_t c = 0; c < node.arity; ++c) {
            parent[static_cast<std::size_t>(ch[c])] = static_cast<std::int32_t>(i);
        }
    }

    Jacobian jac;
    jac.values.resize(n, k);
    Eigen::ArrayXd t(n);

    for (int j = 0; j < k; ++j) {
        std::int32_t cur = slot_leaf[static_cast<std::size_t>(j)];
        const Node& leaf = nodes[static_cast<std::size_t>(cur)];
        if (leaf.op == Op::Variable) {
            t = dataset.X.col(leaf.var_index).array();
        } else {
            t.setOnes();
        }

        // Chain up the ancestor path; siblings contribute through their values.
        while (parent[static_cast<std::size_t>(cur)] >= 0) {
            std::int32_t p = parent[static_cast<std::size_t>(cur)];
            const Node& pn = nodes[static_cast<std::size_t>(p)];
            tree.child_indices(static_cast<std::size_t>(p), ch);
            auto vp = values.col(p).array();
            auto vc = values.col(cur).array();
            switch (pn.op) {
            case Op::Add:
                break;
            case Op::Mul:
                for (std::uint8_t c = 0; c < pn.arity; ++c) {
                    if (ch[c] != cur) t *= values.col(ch[c]).array();
                }
                break;
            case Op::Div:
                if (cur == ch[0]) {
                    t /= values.col(ch[1]).array();
                } else {
                    t *= -vp / vc;
                }
                break;
            case Op::Aq: {
                auto vb = values.col(ch[1]).array();
                if (cur == ch[0]) {
                    t /= (1.0 + vb.square()).sqrt();
                } else {
                    t *= -vp * vb / (1.0 + vb.square());
                }
                break;
            }
            case Op::LogAbs:
                t /= vc;
                break;
            case Op::Exp:
                t *= vp;
                break;
            case Op::Sin:
                t *= vc.cos();
                break;
            case Op::Cos:
                t *= -vc.sin();
                break;
            case Op::Tanh:
                t *= 1.0 - vp.square();
                break;
            case Op::Square:
                t *= 2.0 * vc;
                break;
            case Op::SqrtAbs:
                t *= vc.sign() / (2.0 * vp);
                break;
            case Op::Cbrt:
                t /= 3.0 * vp.square();
                break;
            default:
                break;
            }
            cur = p;
        }
        jac.values.col(j) = -t;
    }

    jac.all_finite = jac.values.allFinite();
    return jac;
}

} // namespace srgp
