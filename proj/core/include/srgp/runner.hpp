#pragma once

#include "srgp/conditioning.hpp"
#include "srgp/dataset.hpp"
#include "srgp/expr.hpp"
#include "srgp/nls.hpp"
#include "srgp/telemetry.hpp"

#include <cstdint>
#include <string>

namespace srgp {

/// One experiment configuration: reps GP runs with seeds seed..seed+reps-1.
struct RunSpec {
    std::string instance = "pagie"; ///< benchmark name or CSV path
    std::string target = "y";       ///< target column for CSV instances
    int max_size = 50;
    FunctionSetName function_set = FunctionSetName::Small;
    int population = 1000;
    int generations = 100;
    int local_iters = 10;
    int reps = 1;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    int threads = 1;
};

/// "[instance/max_size/function_set]" as used in run logs.
std::string nomenclature(const RunSpec& spec);
/// Filesystem-safe variant, e.g. "pagie-50-small".
std::string config_dir_name(const RunSpec& spec);

Dataset load_instance(const RunSpec& spec);

/// Executes the configured repetitions and writes, under
/// out_dir/<config>/: rep<i>/candidates.csv, rep<i>/generations.csv, one SVG
/// per metric per rep, a shared finals.csv and a summary.csv of medians.
/// Progress goes to stderr; data only to files.
void run(const RunSpec& spec);

struct CaseStudyOptions {
    int n_starts = 100;
    int n_restarts = 1000;
    double perturbation_scale = 3.0;
    std::uint64_t seed = 1;
};

struct FittedForm {
    std::string name;
    int k = 0;
    int rank = 0;
    double log10_kappa = 0.0;
    double log10_kappa_r = 0.0;
    double mse = 0.0;
    std::string expression;
    Eigen::VectorXd theta;
};

/// Fits one expression by multistart LM. Redundant parameterizations reach
/// the best ssr on a manifold along which the condition numbers vary; the
/// reported fit is the converged-to-best cluster member with the median
/// kappa_r, which is deterministic and robust to where individual starts land.
FittedForm fit_case_study_form(const std::string& name, const ExprTree& tree,
                               const Dataset& dataset, const CaseStudyOptions& options);

/// The worked overparameterization example on the Pagie problem: fits each of
/// the three forms by multistart LM, reports rank and condition numbers at the
/// optimum, and compares restart behavior of the original and fixed forms.
struct CaseStudyReport {
    FittedForm original;
    FittedForm simplified;
    FittedForm fixed;
    RestartSummary restart_original;
    RestartSummary restart_fixed;
};

CaseStudyReport run_case_study(const CaseStudyOptions& options);

} // namespace srgp
