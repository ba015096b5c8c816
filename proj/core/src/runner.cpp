#include "srgp/runner.hpp"

#include "srgp/diff.hpp"
#include "srgp/gp.hpp"
#include "srgp/infix.hpp"
#include "srgp/rng.hpp"

#include <random>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace srgp {

namespace {

std::string instance_label(const RunSpec& spec) {
    if (benchmark_from_string(spec.instance)) {
        return to_string(*benchmark_from_string(spec.instance));
    }
    return std::filesystem::path(spec.instance).stem().string();
}

double median_ordinal(std::vector<double> values) {
    std::sort(values.begin(), values.end(), [](double a, double b) {
        if (std::isnan(a)) return false;
        if (std::isnan(b)) return true;
        return a < b;
    });
    std::size_t rank = (values.size() + 1) / 2; // nearest-rank p50
    return values[rank - 1];
}

} // namespace

std::string nomenclature(const RunSpec& spec) {
    return "[" + instance_label(spec) + "/" + std::to_string(spec.max_size) + "/" +
           to_string(spec.function_set) + "]";
}

std::string config_dir_name(const RunSpec& spec) {
    return instance_label(spec) + "-" + std::to_string(spec.max_size) + "-" +
           to_string(spec.function_set);
}

Dataset load_instance(const RunSpec& spec) {
    if (auto bench = benchmark_from_string(spec.instance)) {
        DatasetSpec ds;
        ds.name = *bench;
        ds.seed = spec.seed;
        return generate(ds);
    }
    if (!std::filesystem::exists(spec.instance)) {
        throw std::invalid_argument("unknown instance '" + spec.instance +
                                    "': not a benchmark name and not a file");
    }
    return load_csv(spec.instance, spec.target);
}

void run(const RunSpec& spec) {
    if (spec.reps < 1) {
        throw std::invalid_argument("reps must be >= 1");
    }
    Dataset dataset = load_instance(spec);

    const std::string label = instance_label(spec);
    const std::filesystem::path cfg_dir =
        std::filesystem::path(spec.out_dir) / config_dir_name(spec);
    std::filesystem::create_directories(cfg_dir);

    std::cerr << nomenclature(spec) << " n=" << dataset.rows() << " d=" << dataset.cols()
              << " reps=" << spec.reps << " seed=" << spec.seed << "\n";

    std::vector<FinalSolutionRecord> finals;
    const char* metrics[] = {"k", "redundant", "log10_max_kappa", "log10_max_kappa_r"};

    for (int rep = 0; rep < spec.reps; ++rep) {
        GPConfig config;
        config.population_size = spec.population;
        config.generations = spec.generations;
        config.local_opt_iters = spec.local_iters;
        config.max_size = spec.max_size;
        config.function_set = spec.function_set == FunctionSetName::Small ? FunctionSet::small()
                                                                          : FunctionSet::large();
        config.seed = spec.seed + static_cast<std::uint64_t>(rep);
        config.threads = spec.threads;

        RunLog log;
        EvolveResult result = evolve(config, dataset, &log);

        const std::filesystem::path rep_dir = cfg_dir / ("rep" + std::to_string(rep));
        std::filesystem::create_directories(rep_dir);
        write_candidates_csv(log.candidates, (rep_dir / "candidates.csv").string());
        write_generations_csv(log.generations, (rep_dir / "generations.csv").string());
        for (const char* metric : metrics) {
            render_percentile_plot(log.generations, metric,
                                   (rep_dir / (std::string(metric) + ".svg")).string());
        }

        // Final-solution conditioning, before the linear-scaling coefficients.
        FinalSolutionRecord rec;
        rec.dataset = label;
        rec.max_size = spec.max_size;
        rec.function_set = to_string(spec.function_set);
        rec.rep = rep;
        rec.k = result.best.tree.param_count();
        rec.fitness = result.best.fitness;
        rec.expression = to_infix(result.best.tree, dataset.names);
        Jacobian jac = jacobian(result.best.tree, result.best.tree.extract_parameters(), dataset);
        if (jac.all_finite && rec.k > 0) {
            JacobianReport report = analyze(jac);
            rec.redundant = report.k - report.r;
            rec.log10_kappa = std::log10(report.kappa);
            rec.log10_kappa_r = std::log10(report.kappa_r);
        } else {
            rec.redundant = rec.k;
            rec.log10_kappa = std::numeric_limits<double>::quiet_NaN();
            rec.log10_kappa_r = std::numeric_limits<double>::quiet_NaN();
        }
        finals.push_back(rec);

        std::cerr << nomenclature(spec) << " rep " << rep << ": mse=" << result.best.fitness
                  << " k=" << rec.k << " redundant=" << rec.redundant
                  << " scaled_mse=" << result.scaled_mse << "\n";
    }

    write_finals_csv(finals, (cfg_dir / "finals.csv").string());

    // Median row in the layout of the final-solution tables.
    std::vector<double> ks, red, lk, lkr;
    for (const auto& f : finals) {
        ks.push_back(f.k);
        red.push_back(f.redundant);
        lk.push_back(f.log10_kappa);
        lkr.push_back(f.log10_kappa_r);
    }
    std::ofstream summary(cfg_dir / "summary.csv");
    if (!summary) {
        throw std::runtime_error("cannot write summary.csv under " + cfg_dir.string());
    }
    summary << "dataset,max_size,function_set,median_k,median_redundant,median_log10_kappa,"
               "median_log10_kappa_r\n";
    summary << label << ',' << spec.max_size << ',' << to_string(spec.function_set) << ','
            << format_value(median_ordinal(ks)) << ',' << format_value(median_ordinal(red)) << ','
            << format_value(median_ordinal(lk)) << ',' << format_value(median_ordinal(lkr))
            << "\n";
}

FittedForm fit_case_study_form(const std::string& name, const ExprTree& tree,
                               const Dataset& dataset, const CaseStudyOptions& options) {
    LMConfig config;
    config.max_iterations = 100;

    struct Fit {
        double ssr;
        double kappa_r;
        Eigen::VectorXd theta;
        JacobianReport report;
    };
    std::vector<Fit> fits;
    std::normal_distribution<double> normal(0.0, 1.0);
    const int k = tree.param_count();
    for (int i = 0; i < options.n_starts; ++i) {
        std::mt19937_64 rng = stream(options.seed, 1, static_cast<std::uint64_t>(i));
        Eigen::VectorXd theta0(k);
        for (int j = 0; j < k; ++j) theta0[j] = normal(rng);
        LocalOptResult res = optimize_tree(tree, theta0, dataset, config);
        if (res.termination == Termination::NumericalFailure || !std::isfinite(res.ssr)) continue;
        Jacobian jac = jacobian(tree, res.theta_opt, dataset);
        if (!jac.all_finite) continue;
        JacobianReport report = analyze(jac);
        fits.push_back(Fit{res.ssr, report.kappa_r, res.theta_opt, report});
    }
    if (fits.empty()) {
        throw std::runtime_error("no start converged for case-study form " + name);
    }

    double best_ssr = fits.front().ssr;
    for (const auto& f : fits) best_ssr = std::min(best_ssr, f.ssr);
    std::vector<const Fit*> cluster;
    for (const auto& f : fits) {
        if (f.ssr <= (1.0 + 1e-6) * best_ssr) cluster.push_back(&f);
    }
    std::sort(cluster.begin(), cluster.end(),
              [](const Fit* a, const Fit* b) { return a->kappa_r < b->kappa_r; });
    const Fit& chosen = *cluster[cluster.size() / 2];

    FittedForm form;
    form.name = name;
    form.k = k;
    form.theta = chosen.theta;
    form.mse = chosen.ssr / static_cast<double>(dataset.rows());
    form.expression = to_infix(tree.inject_parameters(chosen.theta), dataset.names);
    form.rank = chosen.report.r;
    form.log10_kappa = std::log10(chosen.report.kappa);
    form.log10_kappa_r = std::log10(chosen.report.kappa_r);
    return form;
}

CaseStudyReport run_case_study(const CaseStudyOptions& options) {
    DatasetSpec ds_spec;
    ds_spec.name = Benchmark::Pagie;
    Dataset dataset = generate(ds_spec);

    CaseStudyTrees trees = build_case_study_trees();

    CaseStudyReport report;
    report.original = fit_case_study_form("original", trees.original, dataset, options);
    report.simplified = fit_case_study_form("simplified", trees.simplified, dataset, options);
    report.fixed = fit_case_study_form("fixed", trees.fixed, dataset, options);
    report.restart_original =
        restart_experiment(trees.original, dataset, options.n_restarts,
                           options.perturbation_scale, options.seed, options.n_starts);
    report.restart_fixed =
        restart_experiment(trees.fixed, dataset, options.n_restarts, options.perturbation_scale,
                           options.seed, options.n_starts);
    return report;
}

} // namespace srgp
