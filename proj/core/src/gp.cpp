#include "srgp/gp.hpp"

#include "srgp/diff.hpp"
#include "srgp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace srgp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const GPConfig& config, const Dataset& dataset) {
    if (config.population_size < 1 || config.generations < 1 || config.local_opt_iters < 1 ||
        config.tournament_size < 1 || config.elites < 1) {
        throw std::invalid_argument("GP counts must be >= 1");
    }
    if (config.mutation_rate < 0.0 || config.mutation_rate > 1.0) {
        throw std::invalid_argument("mutation_rate must be in [0, 1]");
    }
    if (config.max_size < 3) {
        throw std::invalid_argument("max_size must be >= 3");
    }
    if (config.function_set.ops.empty()) {
        throw std::invalid_argument("function set must not be empty");
    }
    if (config.elites >= config.population_size) {
        throw std::invalid_argument("elite count must be smaller than the population");
    }
    if (dataset.rows() < 1 || dataset.cols() < 1) {
        throw std::invalid_argument("dataset must not be empty");
    }
}

struct TreeSampler {
    const FunctionSet& set;
    int n_inputs;
    double constant_ratio;
    std::mt19937_64& rng;

    void leaf(build::Fragment& out) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        if (unit(rng) < constant_ratio) {
            std::uniform_real_distribution<double> cd(-1.0, 1.0);
            auto f = build::constant(cd(rng));
            out.push_back(f.front());
        } else {
            std::uniform_int_distribution<int> col(0, n_inputs - 1);
            std::normal_distribution<double> coeff(0.0, 1.0);
            auto f = build::variable(col(rng), coeff(rng));
            out.push_back(f.front());
        }
    }

    void grow(int budget, build::Fragment& out) {
        if (budget <= 1) {
            leaf(out);
            return;
        }
        if (budget == 2) {
            if (set.has_unary()) {
                Node n;
                n.op = pick_unary();
                n.arity = 1;
                out.push_back(n);
                grow(1, out);
            } else {
                leaf(out);
            }
            return;
        }

        std::uniform_int_distribution<std::size_t> pick(0, set.ops.size() - 1);
        Op op = set.ops[pick(rng)];
        std::uint8_t arity;
        if (is_unary(op)) {
            arity = 1;
        } else if (is_nary(op)) {
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            arity = (budget >= 4 && unit(rng) < 0.25) ? 3 : 2;
        } else {
            arity = 2;
        }

        Node n;
        n.op = op;
        n.arity = arity;
        out.push_back(n);

        // Near-even split of the remaining budget, remainder shuffled.
        int rest = budget - 1;
        int base = rest / arity;
        int rem = rest % arity;
        int budgets[3] = {base, base, base};
        for (int i = 0; i < rem; ++i) budgets[i] += 1;
        std::shuffle(budgets, budgets + arity, rng);
        for (std::uint8_t c = 0; c < arity; ++c) {
            grow(budgets[c], out);
        }
    }

    Op pick_unary() {
        std::vector<Op> unaries;
        for (Op op : set.ops) {
            if (is_unary(op)) unaries.push_back(op);
        }
        std::uniform_int_distribution<std::size_t> pick(0, unaries.size() - 1);
        return unaries[pick(rng)];
    }
};

build::Fragment splice(const ExprTree& a, std::size_t at, const build::Fragment& replacement) {
    const auto nodes = a.nodes();
    std::size_t sz = static_cast<std::size_t>(nodes[at].subtree_size);
    build::Fragment out;
    out.reserve(nodes.size() - sz + replacement.size());
    out.insert(out.end(), nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(at));
    out.insert(out.end(), replacement.begin(), replacement.end());
    out.insert(out.end(), nodes.begin() + static_cast<std::ptrdiff_t>(at + sz), nodes.end());
    return out;
}

build::Fragment subtree_of(const ExprTree& t, std::size_t at) {
    const auto nodes = t.nodes();
    std::size_t sz = static_cast<std::size_t>(nodes[at].subtree_size);
    return build::Fragment(nodes.begin() + static_cast<std::ptrdiff_t>(at),
                           nodes.begin() + static_cast<std::ptrdiff_t>(at + sz));
}

std::size_t tournament_winner(const std::vector<Individual>& pop, int tournament_size,
                              std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
    std::size_t best = pick(rng);
    for (int i = 1; i < tournament_size; ++i) {
        std::size_t c = pick(rng);
        if (pop[c].fitness < pop[best].fitness ||
            (pop[c].fitness == pop[best].fitness && c < best)) {
            best = c;
        }
    }
    return best;
}

void for_each_index(int count, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || count < 2) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    int t = std::min(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(t));
    for (int w = 0; w < t; ++w) {
        pool.emplace_back([&, w]() {
            for (int i = w; i < count; i += t) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

ExprTree random_tree(const FunctionSet& set, int max_size, int n_inputs, double constant_ratio,
                     std::mt19937_64& rng) {
    if (set.ops.empty()) {
        throw std::invalid_argument("function set must not be empty");
    }
    if (n_inputs < 1) {
        throw std::invalid_argument("need at least one input variable");
    }
    std::uniform_int_distribution<int> target(3, std::max(3, max_size));
    TreeSampler sampler{set, n_inputs, constant_ratio, rng};
    build::Fragment out;
    sampler.grow(target(rng), out);
    return ExprTree(std::move(out));
}

std::vector<Individual> initialize_population(const GPConfig& config, const Dataset& dataset) {
    validate(config, dataset);
    std::vector<Individual> pop;
    pop.reserve(static_cast<std::size_t>(config.population_size));
    for (int i = 0; i < config.population_size; ++i) {
        std::mt19937_64 rng = stream(config.seed, 0, static_cast<std::uint64_t>(i));
        Individual ind{random_tree(config.function_set, config.max_size,
                                   static_cast<int>(dataset.cols()),
                                   config.constant_leaf_ratio, rng)};
        pop.push_back(std::move(ind));
    }
    return pop;
}

ExprTree subtree_crossover(const ExprTree& a, const ExprTree& b, int max_size,
                           std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick_a(0, static_cast<std::size_t>(a.size()) - 1);
    std::uniform_int_distribution<std::size_t> pick_b(0, static_cast<std::size_t>(b.size()) - 1);
    for (int attempt = 0; attempt < 16; ++attempt) {
        std::size_t i = pick_a(rng);
        std::size_t j = pick_b(rng);
        int new_size = a.size() - a.nodes()[i].subtree_size + b.nodes()[j].subtree_size;
        if (new_size <= max_size) {
            return ExprTree(splice(a, i, subtree_of(b, j)));
        }
    }
    return a;
}

ExprTree mutate(const ExprTree& tree, const GPConfig& config, int n_inputs,
                std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) >= config.mutation_rate) {
        return tree;
    }

    std::uniform_int_distribution<int> which(0, 2);
    switch (which(rng)) {
    case 0: {
        // Operator point mutation, arity preserving.
        std::vector<std::size_t> internals;
        for (std::size_t i = 0; i < static_cast<std::size_t>(tree.size()); ++i) {
            if (!is_leaf(tree.nodes()[i].op)) internals.push_back(i);
        }
        if (internals.empty()) return tree;
        std::uniform_int_distribution<std::size_t> pick(0, internals.size() - 1);
        std::size_t at = internals[pick(rng)];
        const Node& node = tree.nodes()[at];
        std::vector<Op> alternatives;
        for (Op op : config.function_set.ops) {
            if (op == node.op) continue;
            bool ok = (node.arity == 1 && is_unary(op)) ||
                      (node.arity == 2 && (is_nary(op) || is_binary_only(op))) ||
                      (node.arity == 3 && is_nary(op));
            if (ok) alternatives.push_back(op);
        }
        if (alternatives.empty()) return tree;
        std::uniform_int_distribution<std::size_t> alt(0, alternatives.size() - 1);
        build::Fragment nodes(tree.nodes().begin(), tree.nodes().end());
        nodes[at].op = alternatives[alt(rng)];
        return ExprTree(std::move(nodes));
    }
    case 1: {
        // Perturb one parameter multiplicatively.
        if (tree.param_count() == 0) return tree;
        std::uniform_int_distribution<int> slot(0, tree.param_count() - 1);
        int target = slot(rng);
        std::normal_distribution<double> factor(1.0, 0.1);
        build::Fragment nodes(tree.nodes().begin(), tree.nodes().end());
        for (Node& n : nodes) {
            if (n.slot == target) {
                n.value *= factor(rng);
                break;
            }
        }
        return ExprTree(std::move(nodes));
    }
    default: {
        // Replace a random subtree with a fresh one inside the size budget.
        std::uniform_int_distribution<std::size_t> pick(0,
                                                        static_cast<std::size_t>(tree.size()) - 1);
        std::size_t at = pick(rng);
        int budget = config.max_size - (tree.size() - tree.nodes()[at].subtree_size);
        budget = std::max(budget, 1);
        std::uniform_int_distribution<int> target(1, budget);
        TreeSampler sampler{config.function_set, std::max(n_inputs, 1),
                            config.constant_leaf_ratio, rng};
        build::Fragment fresh;
        sampler.grow(target(rng), fresh);
        return ExprTree(splice(tree, at, fresh));
    }
    }
}

Individual local_optimize(Individual individual, const Dataset& dataset, const LMConfig& lm_config,
                          int generation, int index) {
    const Eigen::Index n = dataset.rows();
    CandidateMeta meta{generation, index, kInf, individual.tree.size()};

    auto fitness_at = [&](const Eigen::VectorXd& theta) {
        Eigen::VectorXd pred = evaluate(individual.tree, theta, dataset.X);
        if (!pred.allFinite()) return kInf;
        double mse = (dataset.y - pred).squaredNorm() / static_cast<double>(n);
        return std::isfinite(mse) ? mse : kInf;
    };

    if (individual.tree.param_count() == 0) {
        individual.fitness = fitness_at(Eigen::VectorXd{});
        meta.fitness = individual.fitness;
        individual.record = aggregate_candidate({}, meta);
        return individual;
    }

    Eigen::VectorXd theta0 = individual.tree.extract_parameters();
    LocalOptResult res = optimize_tree(individual.tree, theta0, dataset, lm_config);

    if (res.termination == Termination::NumericalFailure) {
        individual.fitness = fitness_at(theta0);
    } else {
        individual.tree = individual.tree.inject_parameters(res.theta_opt);
        double mse = res.ssr / static_cast<double>(n);
        individual.fitness = std::isfinite(mse) ? mse : kInf;
    }
    meta.fitness = individual.fitness;
    individual.record = aggregate_candidate(res.reports, meta);
    return individual;
}

EvolveResult evolve(const GPConfig& config, const Dataset& dataset, RunLog* log) {
    validate(config, dataset);

    LMConfig lm;
    lm.max_iterations = config.local_opt_iters;

    std::vector<Individual> pop = initialize_population(config, dataset);

    for (int gen = 0; gen < config.generations; ++gen) {
        for_each_index(config.population_size, config.threads, [&](int i) {
            pop[static_cast<std::size_t>(i)] =
                local_optimize(std::move(pop[static_cast<std::size_t>(i)]), dataset, lm, gen, i);
        });

        if (log != nullptr) {
            std::vector<CandidateRecord> records;
            records.reserve(pop.size());
            for (const auto& ind : pop) records.push_back(ind.record);
            log->generations.push_back(generation_percentiles(records));
            log->candidates.insert(log->candidates.end(), records.begin(), records.end());
        }

        if (gen + 1 == config.generations) break;

        // Elites carry over unchanged; the rest is bred by tournament.
        std::vector<std::size_t> order(pop.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::partial_sort(order.begin(), order.begin() + config.elites, order.end(),
                          [&](std::size_t a, std::size_t b) {
                              return pop[a].fitness < pop[b].fitness ||
                                     (pop[a].fitness == pop[b].fitness && a < b);
                          });

        std::vector<Individual> next;
        next.reserve(pop.size());
        for (int e = 0; e < config.elites; ++e) {
            next.push_back(pop[order[static_cast<std::size_t>(e)]]);
        }
        for (int i = config.elites; i < config.population_size; ++i) {
            std::mt19937_64 rng =
                stream(config.seed, static_cast<std::uint64_t>(gen) + 1,
                       static_cast<std::uint64_t>(i));
            const Individual& pa = pop[tournament_winner(pop, config.tournament_size, rng)];
            const Individual& pb = pop[tournament_winner(pop, config.tournament_size, rng)];
            ExprTree child = subtree_crossover(pa.tree, pb.tree, config.max_size, rng);
            Individual offspring{mutate(child, config, static_cast<int>(dataset.cols()), rng)};
            next.push_back(std::move(offspring));
        }
        pop = std::move(next);
    }

    std::size_t best_idx = 0;
    for (std::size_t i = 1; i < pop.size(); ++i) {
        if (pop[i].fitness < pop[best_idx].fitness) best_idx = i;
    }

    EvolveResult result{pop[best_idx]};

    // Linear scaling a + b*f of the returned model. The conditioning record
    // kept on the individual refers to the expression before this step.
    Eigen::VectorXd pred =
        evaluate(result.best.tree, result.best.tree.extract_parameters(), dataset.X);
    if (pred.allFinite()) {
        double n = static_cast<double>(dataset.rows());
        double mean_f = pred.mean();
        double mean_y = dataset.y.mean();
        double var_f = (pred.array() - mean_f).square().sum() / n;
        double cov = ((pred.array() - mean_f) * (dataset.y.array() - mean_y)).sum() / n;
        double b = var_f > 0.0 ? cov / var_f : 1.0;
        if (!std::isfinite(b)) b = 1.0;
        double a = mean_y - b * mean_f;
        result.scale_a = a;
        result.scale_b = b;
        result.scaled_mse = (dataset.y.array() - (a + b * pred.array())).square().sum() / n;
    }
    return result;
}

} // namespace srgp
