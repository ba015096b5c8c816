#pragma once

#include "srgp/conditioning.hpp"

#include <string>
#include <vector>

namespace srgp {

/// Worst-case conditioning per locally optimized candidate: the minimum rank
/// and maximum condition numbers over all Jacobians the optimizer evaluated.
struct CandidateRecord {
    int generation = 0;
    int index = 0;
    int k = 0;
    int min_rank = 0;
    int redundant = 0; ///< k - min_rank
    double max_kappa = 0.0;
    double max_kappa_r = 0.0;
    double fitness = 0.0;
    int tree_size = 0;
};

struct CandidateMeta {
    int generation = 0;
    int index = 0;
    double fitness = 0.0;
    int tree_size = 0;
};

/// Folds per-iteration reports into worst-case values. An empty report list
/// (zero-parameter tree, or no analyzable Jacobian) yields k = 0, min_rank = 0
/// and undefined condition numbers (serialized as "nan").
CandidateRecord aggregate_candidate(const std::vector<JacobianReport>& reports,
                                    const CandidateMeta& meta);

struct MetricStats {
    double p5 = 0, p10 = 0, p25 = 0, p50 = 0, p75 = 0, p90 = 0, p95 = 0;
    double mean = 0;
};

/// Nearest-rank percentiles and mean for the four tracked metrics. Infinite
/// condition numbers sort above every finite value; undefined (nan) values
/// sort above infinity. The mean folds over defined values and is +inf as
/// soon as one record is +inf.
struct GenerationStats {
    int generation = 0;
    MetricStats k;
    MetricStats redundant;
    MetricStats log10_max_kappa;
    MetricStats log10_max_kappa_r;
};

GenerationStats generation_percentiles(const std::vector<CandidateRecord>& records);

/// One row per repetition: conditioning of the returned expression, computed
/// before the linear-scaling coefficients are attached.
struct FinalSolutionRecord {
    std::string dataset;
    int max_size = 0;
    std::string function_set;
    int rep = 0;
    int k = 0;
    int redundant = 0;
    double log10_kappa = 0.0;
    double log10_kappa_r = 0.0;
    double fitness = 0.0;
    std::string expression;
};

/// 17-significant-digit decimal; +inf/-inf as "inf"/"-inf", undefined as "nan".
std::string format_value(double v);

void write_candidates_csv(const std::vector<CandidateRecord>& records, const std::string& path);
void write_generations_csv(const std::vector<GenerationStats>& stats, const std::string& path);
void write_finals_csv(const std::vector<FinalSolutionRecord>& finals, const std::string& path);

/// Median line over shaded percentile ribbons (5-95, 10-90, 25-75) across
/// generations, written as a standalone SVG. `metric` is one of
/// k, redundant, log10_max_kappa, log10_max_kappa_r.
void render_percentile_plot(const std::vector<GenerationStats>& stats, const std::string& metric,
                            const std::string& path);

/// Telemetry collected over one GP run.
struct RunLog {
    std::vector<CandidateRecord> candidates;
    std::vector<GenerationStats> generations;
};

} // namespace srgp
