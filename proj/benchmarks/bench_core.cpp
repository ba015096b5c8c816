#include "srgp/conditioning.hpp"
#include "srgp/dataset.hpp"
#include "srgp/diff.hpp"
#include "srgp/expr.hpp"
#include "srgp/gp.hpp"
#include "srgp/nls.hpp"
#include "srgp/rng.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace srgp;

namespace {

Dataset pagie_data() {
    DatasetSpec spec;
    spec.name = Benchmark::Pagie;
    return generate(spec);
}

ExprTree sized_tree(int max_size) {
    std::mt19937_64 rng = stream(5, 0, static_cast<std::uint64_t>(max_size));
    return random_tree(FunctionSet::small(), max_size, 2, 0.2, rng);
}

void BM_Evaluate(benchmark::State& state) {
    Dataset ds = pagie_data();
    ExprTree tree = sized_tree(static_cast<int>(state.range(0)));
    Eigen::VectorXd theta = tree.extract_parameters();
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate(tree, theta, ds.X));
    }
    state.SetItemsProcessed(state.iterations() * ds.rows());
}
BENCHMARK(BM_Evaluate)->Arg(15)->Arg(50)->Arg(100);

void BM_Jacobian(benchmark::State& state) {
    Dataset ds = pagie_data();
    ExprTree tree = sized_tree(static_cast<int>(state.range(0)));
    Eigen::VectorXd theta = tree.extract_parameters();
    for (auto _ : state) {
        benchmark::DoNotOptimize(jacobian(tree, theta, ds));
    }
}
BENCHMARK(BM_Jacobian)->Arg(15)->Arg(50)->Arg(100);

void BM_SingularValues(benchmark::State& state) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n(0.0, 1.0);
    Jacobian jac;
    jac.values.resize(676, state.range(0));
    for (Eigen::Index i = 0; i < jac.values.size(); ++i) jac.values.data()[i] = n(rng);
    jac.all_finite = true;
    for (auto _ : state) {
        benchmark::DoNotOptimize(singular_values(jac));
    }
}
BENCHMARK(BM_SingularValues)->Arg(8)->Arg(16)->Arg(32);

void BM_LocalOptimize(benchmark::State& state) {
    Dataset ds = pagie_data();
    ExprTree tree = build_case_study_trees().fixed;
    Eigen::VectorXd theta0(3);
    theta0 << 0.9, 0.8, 1.2;
    LMConfig cfg;
    cfg.max_iterations = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(optimize_tree(tree, theta0, ds, cfg));
    }
}
BENCHMARK(BM_LocalOptimize)->Arg(5)->Arg(10);

} // namespace

BENCHMARK_MAIN();
