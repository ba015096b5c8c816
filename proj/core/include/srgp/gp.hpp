#pragma once

#include "srgp/dataset.hpp"
#include "srgp/expr.hpp"
#include "srgp/nls.hpp"
#include "srgp/telemetry.hpp"

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace srgp {

struct GPConfig {
    int population_size = 1000;
    int generations = 100;
    int local_opt_iters = 10;
    int max_size = 50;
    FunctionSet function_set = FunctionSet::small();
    double mutation_rate = 0.25;
    int tournament_size = 5;
    int elites = 1;
    std::uint64_t seed = 0;
    /// Probability that a terminal is a numeric constant instead of a
    /// coefficiented variable during tree creation.
    double constant_leaf_ratio = 0.2;
    int threads = 1;
};

struct Individual {
    explicit Individual(ExprTree t) : tree(std::move(t)) {}

    ExprTree tree; ///< node values hold the current parameters
    double fitness = std::numeric_limits<double>::infinity(); ///< MSE, lower is better
    CandidateRecord record;

    Eigen::VectorXd theta() const { return tree.extract_parameters(); }
};

/// Balanced tree creation: draws a target size in [3, max_size] and splits the
/// remaining budget near-evenly among children. Leaves are coefficiented
/// variables (N(0,1) coefficients) or constants (U(-1,1)).
ExprTree random_tree(const FunctionSet& set, int max_size, int n_inputs, double constant_ratio,
                     std::mt19937_64& rng);

std::vector<Individual> initialize_population(const GPConfig& config, const Dataset& dataset);

/// Swaps a uniformly chosen subtree of `a` with one from `b`; cut points are
/// redrawn up to 16 times to satisfy the size limit, otherwise a copy of `a`
/// is returned. Slots are re-extracted by the tree constructor.
ExprTree subtree_crossover(const ExprTree& a, const ExprTree& b, int max_size,
                           std::mt19937_64& rng);

/// With probability mutation_rate applies one of: operator point mutation,
/// parameter perturbation (x N(1, 0.1)), or replacement of a random subtree
/// with a fresh random subtree fitting the size budget. `n_inputs` is the
/// dataset width fresh variables may draw from.
ExprTree mutate(const ExprTree& tree, const GPConfig& config, int n_inputs, std::mt19937_64& rng);

/// Runs the local optimizer from the individual's current parameters, writes
/// the improved vector back (original kept on numerical failure), attaches the
/// worst-case conditioning record, and recomputes fitness as MSE (sentinel
/// +inf for non-finite predictions).
Individual local_optimize(Individual individual, const Dataset& dataset, const LMConfig& lm_config,
                          int generation = 0, int index = 0);

struct EvolveResult {
    Individual best;
    double scale_a = 0.0; ///< linear-scaling intercept fit after the final generation
    double scale_b = 1.0; ///< linear-scaling slope
    double scaled_mse = std::numeric_limits<double>::infinity();
};

/// Generational loop with tournament selection, crossover-then-mutation
/// offspring, and elite carry-over. Per-candidate RNG streams are keyed by
/// (seed, generation, index) so results do not depend on evaluation
/// parallelism. Conditioning of the best individual is reported before the
/// linear-scaling coefficients are fitted.
EvolveResult evolve(const GPConfig& config, const Dataset& dataset, RunLog* log = nullptr);

} // namespace srgp
