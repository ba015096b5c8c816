#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace srgp::oracles {

Eigen::MatrixXd fd_jacobian(const ExprTree& tree, const Eigen::VectorXd& theta,
                            const Dataset& dataset, double h) {
    if (h <= 0.0) {
        throw std::invalid_argument("step size must be positive");
    }
    const int k = static_cast<int>(theta.size());
    Eigen::MatrixXd J(dataset.rows(), k);
    for (int j = 0; j < k; ++j) {
        double step = h * std::max(1.0, std::abs(theta[j]));
        Eigen::VectorXd plus = theta;
        Eigen::VectorXd minus = theta;
        plus[j] += step;
        minus[j] -= step;
        J.col(j) = (residuals(tree, plus, dataset) - residuals(tree, minus, dataset)) /
                   (2.0 * step);
    }
    return J;
}

Eigen::VectorXd eig_jtj(const Eigen::MatrixXd& J) {
    const int k = static_cast<int>(J.cols());
    Eigen::MatrixXd A = J.transpose() * J;

    // Cyclic Jacobi sweeps; A stays symmetric, off-diagonal mass shrinks to
    // rounding level.
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < k; ++p) {
            for (int q = p + 1; q < k; ++q) {
                off += A(p, q) * A(p, q);
            }
        }
        if (off < 1e-300) break;
        for (int p = 0; p < k; ++p) {
            for (int q = p + 1; q < k; ++q) {
                if (A(p, q) == 0.0) continue;
                double tau = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
                double t = (tau >= 0 ? 1.0 : -1.0) /
                           (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                for (int i = 0; i < k; ++i) {
                    double aip = A(i, p);
                    double aiq = A(i, q);
                    A(i, p) = c * aip - s * aiq;
                    A(i, q) = s * aip + c * aiq;
                }
                for (int i = 0; i < k; ++i) {
                    double api = A(p, i);
                    double aqi = A(q, i);
                    A(p, i) = c * api - s * aqi;
                    A(q, i) = s * api + c * aqi;
                }
            }
        }
    }

    std::vector<double> eig(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        eig[static_cast<std::size_t>(i)] = std::max(A(i, i), 0.0);
    }
    std::sort(eig.begin(), eig.end(), std::greater<double>());
    Eigen::VectorXd sigma(k);
    for (int i = 0; i < k; ++i) {
        sigma[i] = std::sqrt(eig[static_cast<std::size_t>(i)]);
    }
    return sigma;
}

Eigen::VectorXd normal_equations_ls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    const int k = static_cast<int>(A.cols());
    Eigen::MatrixXd M = A.transpose() * A;
    Eigen::VectorXd rhs = A.transpose() * b;

    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < k; ++col) {
        int pivot = col;
        for (int r = col + 1; r < k; ++r) {
            if (std::abs(M(r, col)) > std::abs(M(pivot, col))) pivot = r;
        }
        if (std::abs(M(pivot, col)) < 1e-12 * (1.0 + M.cwiseAbs().maxCoeff())) {
            throw std::runtime_error("normal equations are numerically singular");
        }
        if (pivot != col) {
            M.row(pivot).swap(M.row(col));
            std::swap(rhs[pivot], rhs[col]);
        }
        for (int r = col + 1; r < k; ++r) {
            double f = M(r, col) / M(col, col);
            M.row(r) -= f * M.row(col);
            rhs[r] -= f * rhs[col];
        }
    }
    Eigen::VectorXd x(k);
    for (int r = k - 1; r >= 0; --r) {
        double acc = rhs[r];
        for (int c = r + 1; c < k; ++c) acc -= M(r, c) * x[c];
        x[r] = acc / M(r, r);
    }
    return x;
}

} // namespace srgp::oracles
