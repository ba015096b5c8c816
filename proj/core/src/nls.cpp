#include "srgp/nls.hpp"

#include "srgp/rng.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace srgp {

namespace {

constexpr double kAcceptRatio = 1e-4;
constexpr int kMaxInnerTrials = 64;

void validate(const LMConfig& config) {
    if (config.max_iterations < 1) {
        throw std::invalid_argument("max_iterations must be >= 1");
    }
    if (config.ftol <= 0 || config.xtol <= 0 || config.gtol <= 0 ||
        config.initial_radius_factor <= 0) {
        throw std::invalid_argument("LM tolerances and radius factor must be positive");
    }
}

/// ||q(lambda)|| for the diagonalized trust-region step
/// q_i = -s_i u_i / (s_i^2 + lambda).
double step_norm(const Eigen::VectorXd& s, const Eigen::VectorXd& u, double lambda) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s[i] > 0.0) {
            double q = s[i] * u[i] / (s[i] * s[i] + lambda);
            acc += q * q;
        }
    }
    return std::sqrt(acc);
}

/// Damped step in the scaled coordinates. lambda == 0 gives the minimum-norm
/// Gauss-Newton step (zero along null directions).
Eigen::VectorXd damped_step(const Eigen::VectorXd& s, const Eigen::VectorXd& u, double lambda) {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s[i] > 0.0) {
            q[i] = -s[i] * u[i] / (s[i] * s[i] + lambda);
        }
    }
    return q;
}

/// Finds lambda >= 0 with ||q(lambda)|| inside [0.9, 1.1] * delta (or the
/// Gauss-Newton step when it already fits). Bisection on a bracketed lambda;
/// every probe costs O(min(n,k)).
Eigen::VectorXd trust_region_step(const Eigen::VectorXd& s, const Eigen::VectorXd& u,
                                  double delta) {
    if (step_norm(s, u, 0.0) <= delta) {
        return damped_step(s, u, 0.0);
    }
    double lo = 0.0;
    double hi = s[0] > 0 ? s[0] * s[0] : 1.0;
    while (step_norm(s, u, hi) > delta) {
        hi *= 4.0;
        if (!std::isfinite(hi)) break;
    }
    for (int it = 0; it < 64; ++it) {
        double mid = 0.5 * (lo + hi);
        double norm = step_norm(s, u, mid);
        if (norm > 1.1 * delta) {
            lo = mid;
        } else if (norm < 0.9 * delta) {
            hi = mid;
        } else {
            return damped_step(s, u, mid);
        }
    }
    return damped_step(s, u, hi);
}

} // namespace

const char* to_string(Termination t) {
    switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIterations: return "max_iterations";
    case Termination::NumericalFailure: return "numerical_failure";
    }
    return "?";
}

LocalOptResult levenberg_marquardt(const ResidualFn& residual_fn, const JacobianFn& jacobian_fn,
                                   Eigen::VectorXd theta0, const LMConfig& config,
                                   const JacobianHook& hook) {
    validate(config);
    if (!theta0.allFinite()) {
        throw std::invalid_argument("theta0 must be finite");
    }

    const double inf = std::numeric_limits<double>::infinity();
    LocalOptResult result;
    result.theta_opt = theta0;

    Eigen::VectorXd F = residual_fn(theta0);
    result.nfev = 1;
    double ssr = F.allFinite() ? F.squaredNorm() : inf;
    if (!std::isfinite(ssr)) {
        result.ssr = inf;
        result.termination = Termination::NumericalFailure;
        return result;
    }
    result.ssr = ssr;

    const int k = static_cast<int>(theta0.size());
    if (k == 0) {
        result.termination = Termination::Converged;
        return result;
    }

    Eigen::VectorXd theta = theta0;
    Eigen::VectorXd scale = Eigen::VectorXd::Zero(k); // running max column norms
    double delta = 0.0;
    result.termination = Termination::MaxIterations;

    for (int iter = 0; iter < config.max_iterations; ++iter) {
        Jacobian jac = jacobian_fn(theta);
        if (!jac.all_finite) {
            // best accepted point so far stays in the result
            result.termination = Termination::NumericalFailure;
            return result;
        }
        ++result.njev;
        JacobianReport report = analyze(jac);
        result.reports.push_back(report);
        if (hook) hook(jac, report);

        const double fnorm = std::sqrt(ssr);
        if (fnorm == 0.0) {
            result.termination = Termination::Converged;
            return result;
        }

        // Scaled-gradient (cosine) convergence test.
        Eigen::VectorXd g = jac.values.transpose() * F;
        double gmax = 0.0;
        for (int j = 0; j < k; ++j) {
            double cn = jac.values.col(j).norm();
            if (cn > 0.0) gmax = std::max(gmax, std::abs(g[j]) / (cn * fnorm));
        }
        if (gmax <= config.gtol) {
            result.termination = Termination::Converged;
            return result;
        }

        for (int j = 0; j < k; ++j) {
            double cn = jac.values.col(j).norm();
            if (iter == 0) {
                scale[j] = cn > 0.0 ? cn : 1.0;
            } else {
                scale[j] = std::max(scale[j], cn);
            }
        }
        double xnorm = scale.cwiseProduct(theta).norm();
        if (iter == 0) {
            delta = xnorm > 0.0 ? config.initial_radius_factor * xnorm
                                : config.initial_radius_factor;
        }

        Eigen::MatrixXd scaled = jac.values * scale.cwiseInverse().asDiagonal();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
        Eigen::VectorXd u = svd.matrixU().transpose() * F;
        const Eigen::VectorXd& s = svd.singularValues();

        bool accepted = false;
        for (int trial = 0; trial < kMaxInnerTrials; ++trial) {
            Eigen::VectorXd q = trust_region_step(s, u, delta);
            double step = q.norm(); // == ||D p||
            Eigen::VectorXd p = scale.cwiseInverse().cwiseProduct(svd.matrixV() * q);

            double pred = ssr - (F + jac.values * p).squaredNorm();
            Eigen::VectorXd trial_theta = theta + p;
            Eigen::VectorXd trial_F = residual_fn(trial_theta);
            ++result.nfev;
            if (!trial_F.allFinite()) {
                result.termination = Termination::NumericalFailure;
                return result;
            }
            double trial_ssr = trial_F.squaredNorm();
            double actual = ssr - trial_ssr;
            double ratio = pred > 0.0 ? actual / pred : (actual > 0.0 ? 1.0 : 0.0);

            if (ratio > kAcceptRatio && actual > 0.0) {
                double prev_ssr = ssr;
                theta = trial_theta;
                F = trial_F;
                ssr = trial_ssr;
                result.theta_opt = theta;
                result.ssr = ssr;
                accepted = true;

                if (ratio < 0.25) {
                    delta *= 0.5;
                } else if (ratio > 0.75) {
                    delta *= 2.0;
                }

                xnorm = scale.cwiseProduct(theta).norm();
                bool fsmall = actual <= config.ftol * prev_ssr && pred <= config.ftol * prev_ssr &&
                              ratio <= 2.0;
                bool xsmall = step <= config.xtol * xnorm;
                if (fsmall || xsmall || ssr == 0.0) {
                    result.termination = Termination::Converged;
                    return result;
                }
                break;
            }

            delta *= 0.5;
            if (step <= config.xtol * std::max(xnorm, 1e-300) || delta < 1e-300) {
                result.termination = Termination::Converged;
                return result;
            }
        }
        if (!accepted) {
            // Radius collapsed without an acceptable step.
            result.termination = Termination::Converged;
            return result;
        }
    }

    return result;
}

LocalOptResult optimize_tree(const ExprTree& tree, const Eigen::VectorXd& theta0,
                             const Dataset& dataset, const LMConfig& config,
                             const JacobianHook& hook) {
    auto residual_fn = [&](const Eigen::VectorXd& theta) { return residuals(tree, theta, dataset); };
    auto jacobian_fn = [&](const Eigen::VectorXd& theta) { return jacobian(tree, theta, dataset); };
    return levenberg_marquardt(residual_fn, jacobian_fn, theta0, config, hook);
}

MultistartFit multistart_fit(const ExprTree& tree, const Dataset& dataset, int n_starts,
                             std::uint64_t seed, const LMConfig& config) {
    const int k = tree.param_count();
    if (k == 0) {
        throw std::invalid_argument("multistart fit needs a parameterized tree");
    }
    const double inf = std::numeric_limits<double>::infinity();
    MultistartFit best;
    best.ssr = inf;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < n_starts; ++i) {
        std::mt19937_64 rng = stream(seed, 1, static_cast<std::uint64_t>(i));
        Eigen::VectorXd theta0(k);
        for (int j = 0; j < k; ++j) theta0[j] = normal(rng);
        LocalOptResult res = optimize_tree(tree, theta0, dataset, config);
        if (res.termination != Termination::NumericalFailure && res.ssr < best.ssr) {
            best.ssr = res.ssr;
            best.theta = res.theta_opt;
        }
    }
    if (!std::isfinite(best.ssr)) {
        throw std::runtime_error("multistart failed to locate a finite optimum");
    }
    return best;
}

RestartSummary restart_experiment(const ExprTree& tree, const Dataset& dataset, int n_restarts,
                                  double perturbation_scale, std::uint64_t seed,
                                  int n_reference_starts) {
    if (n_restarts < 1) {
        throw std::invalid_argument("n_restarts must be >= 1");
    }
    if (perturbation_scale < 0.0) {
        throw std::invalid_argument("perturbation_scale must be >= 0");
    }
    const int k = tree.param_count();

    LMConfig config;
    config.max_iterations = 100; // convergence-driven budget

    const double inf = std::numeric_limits<double>::infinity();
    MultistartFit ref = multistart_fit(tree, dataset, n_reference_starts, seed, config);
    const Eigen::VectorXd theta_ref = ref.theta;
    const double ref_ssr = ref.ssr;
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> finals(static_cast<std::size_t>(n_restarts), inf);
    long total_nfev = 0;
    long total_njev = 0;
    int failures = 0;
    for (int i = 0; i < n_restarts; ++i) {
        std::mt19937_64 rng = stream(seed, 2, static_cast<std::uint64_t>(i));
        std::uniform_real_distribution<double> mult(1.0 - perturbation_scale,
                                                    1.0 + perturbation_scale);
        Eigen::VectorXd theta0(k);
        for (int j = 0; j < k; ++j) {
            theta0[j] = theta_ref[j] * mult(rng) +
                        0.1 * perturbation_scale * std::abs(theta_ref[j]) * normal(rng);
        }
        LocalOptResult res = optimize_tree(tree, theta0, dataset, config);
        total_nfev += res.nfev;
        total_njev += res.njev;
        if (res.termination == Termination::NumericalFailure && !std::isfinite(res.ssr)) {
            ++failures;
        } else {
            finals[static_cast<std::size_t>(i)] = res.ssr;
        }
    }
    if (failures == n_restarts) {
        throw std::runtime_error("every restart ended in numerical failure");
    }

    double best_ssr = ref_ssr;
    for (double v : finals) best_ssr = std::min(best_ssr, v);

    int successes = 0;
    for (double v : finals) {
        if (v <= (1.0 + 1e-6) * best_ssr) ++successes;
    }

    RestartSummary summary;
    summary.mean_nfev = static_cast<double>(total_nfev) / n_restarts;
    summary.mean_njev = static_cast<double>(total_njev) / n_restarts;
    summary.success_rate = static_cast<double>(successes) / n_restarts;
    summary.best_ssr = best_ssr;
    summary.theta_ref = theta_ref;
    return summary;
}

} // namespace srgp
