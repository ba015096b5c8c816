#pragma once

#include "srgp/conditioning.hpp"
#include "srgp/dataset.hpp"
#include "srgp/diff.hpp"
#include "srgp/expr.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

namespace srgp {

struct LMConfig {
    int max_iterations = 10; ///< outer iterations; one Jacobian evaluation each
    double ftol = 1.5e-8;
    double xtol = 1.5e-8;
    double gtol = 1e-12;
    double initial_radius_factor = 100.0; ///< Delta_0 = factor * ||D theta_0|| (factor when zero)
};

enum class Termination { Converged, MaxIterations, NumericalFailure };

const char* to_string(Termination t);

/// Outcome of one local optimization. nfev counts every residual evaluation
/// including the initial one; njev counts Jacobian evaluations, each of which
/// produced one conditioning report.
struct LocalOptResult {
    Eigen::VectorXd theta_opt;
    double ssr = 0.0;
    int nfev = 0;
    int njev = 0;
    std::vector<JacobianReport> reports;
    Termination termination = Termination::NumericalFailure;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Jacobian(const Eigen::VectorXd&)>;
/// Observes every Jacobian (and its conditioning report) before the step
/// factorization, in evaluation order.
using JacobianHook = std::function<void(const Jacobian&, const JacobianReport&)>;

/// Trust-region Levenberg-Marquardt. The scaling matrix D holds the running
/// maximum of the Jacobian column norms; the step solves
/// min ||J p + F|| s.t. ||D p|| <= Delta through the SVD of the column-scaled
/// Jacobian, which tolerates rank deficiency (zero directions get no step).
/// Accepted steps strictly decrease ||F||^2.
LocalOptResult levenberg_marquardt(const ResidualFn& residual_fn, const JacobianFn& jacobian_fn,
                                   Eigen::VectorXd theta0, const LMConfig& config,
                                   const JacobianHook& hook = {});

/// Convenience wrapper optimizing a tree's parameters against a dataset.
LocalOptResult optimize_tree(const ExprTree& tree, const Eigen::VectorXd& theta0,
                             const Dataset& dataset, const LMConfig& config,
                             const JacobianHook& hook = {});

struct MultistartFit {
    Eigen::VectorXd theta;
    double ssr = 0.0;
};

/// Best of `n_starts` LM runs from standard-normal initial parameters.
/// Throws when no start reaches a finite objective.
MultistartFit multistart_fit(const ExprTree& tree, const Dataset& dataset, int n_starts,
                             std::uint64_t seed, const LMConfig& config);

struct RestartSummary {
    double mean_nfev = 0.0;
    double mean_njev = 0.0;
    double success_rate = 0.0;
    double best_ssr = 0.0;
    Eigen::VectorXd theta_ref;
};

/// Locates a reference optimum by multistart LM (standard-normal starts),
/// then reruns the optimizer from `n_restarts` random perturbations of it.
/// A restart succeeds when its final ssr is within 1e-6 relative of the best
/// ssr seen anywhere in the experiment. Perturbation at scale s: each
/// coordinate is multiplied by u ~ U[1-s, 1+s] (sign flips possible once
/// s > 1) plus additive noise 0.1*s*|theta_i|*N(0,1). Scale 0 restarts
/// exactly at the reference optimum.
RestartSummary restart_experiment(const ExprTree& tree, const Dataset& dataset, int n_restarts,
                                  double perturbation_scale, std::uint64_t seed,
                                  int n_reference_starts = 100);

} // namespace srgp
