// Command line runner: GP conditioning experiments and the worked
// overparameterization case study.

#include "srgp/runner.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <thread>

namespace {

void print_restart(const char* label, const srgp::RestartSummary& s) {
    std::printf("  %-9s mean nfev %7.2f   mean njev %6.2f   success rate %5.1f%%\n", label,
                s.mean_nfev, s.mean_njev, 100.0 * s.success_rate);
}

int print_case_study(const srgp::CaseStudyOptions& options) {
    srgp::CaseStudyReport report = srgp::run_case_study(options);

    std::printf("form        k  rank  log10(kappa)  log10(kappa_r)  mse\n");
    bool ranks_ok = true;
    for (const srgp::FittedForm* form :
         {&report.original, &report.simplified, &report.fixed}) {
        std::printf("%-10s %2d  %4d  %12.4f  %14.4f  %.6g\n", form->name.c_str(), form->k,
                    form->rank, form->log10_kappa, form->log10_kappa_r, form->mse);
        ranks_ok = ranks_ok && form->rank == 3;
    }
    std::printf("\nfitted expressions:\n");
    for (const srgp::FittedForm* form :
         {&report.original, &report.simplified, &report.fixed}) {
        std::printf("  %-10s %s\n", form->name.c_str(), form->expression.c_str());
    }

    std::printf("\nrestarts (n=%d, perturbation scale %.2g):\n", options.n_restarts,
                options.perturbation_scale);
    print_restart("original", report.restart_original);
    print_restart("fixed", report.restart_fixed);
    std::printf("  nfev ratio original/fixed: %.2f\n",
                report.restart_original.mean_nfev / report.restart_fixed.mean_nfev);

    if (!ranks_ok) {
        std::fprintf(stderr, "error: expected numeric rank 3 for all three forms\n");
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolic regression GP with Jacobian conditioning diagnostics"};
    app.require_subcommand(1);

    srgp::RunSpec spec;
    spec.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    CLI::App* run_cmd = app.add_subcommand("run", "run GP repetitions and write telemetry");
    run_cmd->add_option("--instance", spec.instance,
                        "benchmark name (kotanchek|pagie|poly10|salustowicz2d) or CSV path")
        ->required();
    run_cmd->add_option("--target", spec.target, "target column for CSV instances");
    run_cmd->add_option("--max-size", spec.max_size, "maximum tree size")->check(CLI::Range(3, 1000));
    run_cmd
        ->add_option("--function-set", spec.function_set, "function set")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, srgp::FunctionSetName>{
                {"small", srgp::FunctionSetName::Small},
                {"large", srgp::FunctionSetName::Large}},
            CLI::ignore_case));
    run_cmd->add_option("--population", spec.population)->check(CLI::PositiveNumber);
    run_cmd->add_option("--generations", spec.generations)->check(CLI::PositiveNumber);
    run_cmd->add_option("--local-iters", spec.local_iters)->check(CLI::PositiveNumber);
    run_cmd->add_option("--reps", spec.reps, "repetitions with seeds seed..seed+reps-1")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--seed", spec.seed);
    run_cmd->add_option("--out", spec.out_dir, "output directory");
    run_cmd->add_option("--threads", spec.threads)->check(CLI::PositiveNumber);

    srgp::CaseStudyOptions cs;
    CLI::App* case_cmd = app.add_subcommand(
        "case-study", "fit the worked overparameterized forms and compare restarts");
    case_cmd->add_option("--starts", cs.n_starts, "multistart LM starts")
        ->check(CLI::PositiveNumber);
    case_cmd->add_option("--restarts", cs.n_restarts)->check(CLI::PositiveNumber);
    case_cmd->add_option("--perturbation-scale", cs.perturbation_scale)
        ->check(CLI::NonNegativeNumber);
    case_cmd->add_option("--seed", cs.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run_cmd->parsed()) {
            srgp::run(spec);
            return 0;
        }
        return print_case_study(cs);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
