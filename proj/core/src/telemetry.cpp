#include "srgp/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace srgp {

CandidateRecord aggregate_candidate(const std::vector<JacobianReport>& reports,
                                    const CandidateMeta& meta) {
    CandidateRecord rec;
    rec.generation = meta.generation;
    rec.index = meta.index;
    rec.fitness = meta.fitness;
    rec.tree_size = meta.tree_size;
    if (reports.empty()) {
        rec.k = 0;
        rec.min_rank = 0;
        rec.redundant = 0;
        rec.max_kappa = std::numeric_limits<double>::quiet_NaN();
        rec.max_kappa_r = std::numeric_limits<double>::quiet_NaN();
        return rec;
    }
    rec.k = reports.front().k;
    rec.min_rank = reports.front().r;
    rec.max_kappa = reports.front().kappa;
    rec.max_kappa_r = reports.front().kappa_r;
    for (std::size_t i = 1; i < reports.size(); ++i) {
        rec.min_rank = std::min(rec.min_rank, reports[i].r);
        rec.max_kappa = std::max(rec.max_kappa, reports[i].kappa);
        rec.max_kappa_r = std::max(rec.max_kappa_r, reports[i].kappa_r);
    }
    rec.redundant = rec.k - rec.min_rank;
    return rec;
}

namespace {

// nan sorts above +inf so undefined values land in the top percentiles
// instead of poisoning the order.
bool ordinal_less(double a, double b) {
    if (std::isnan(a)) return false;
    if (std::isnan(b)) return true;
    return a < b;
}

double nearest_rank(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
    if (rank == 0) rank = 1;
    if (rank > n) rank = n;
    return sorted[rank - 1];
}

MetricStats metric_stats(std::vector<double> values) {
    std::sort(values.begin(), values.end(), ordinal_less);
    MetricStats m;
    m.p5 = nearest_rank(values, 5);
    m.p10 = nearest_rank(values, 10);
    m.p25 = nearest_rank(values, 25);
    m.p50 = nearest_rank(values, 50);
    m.p75 = nearest_rank(values, 75);
    m.p90 = nearest_rank(values, 90);
    m.p95 = nearest_rank(values, 95);
    double sum = 0.0;
    std::size_t defined = 0;
    for (double v : values) {
        if (!std::isnan(v)) {
            sum += v;
            ++defined;
        }
    }
    m.mean = defined > 0 ? sum / static_cast<double>(defined)
                         : std::numeric_limits<double>::quiet_NaN();
    return m;
}

} // namespace

GenerationStats generation_percentiles(const std::vector<CandidateRecord>& records) {
    if (records.empty()) {
        throw std::invalid_argument("generation_percentiles needs at least one record");
    }
    GenerationStats stats;
    stats.generation = records.front().generation;

    std::vector<double> ks, red, lk, lkr;
    ks.reserve(records.size());
    red.reserve(records.size());
    lk.reserve(records.size());
    lkr.reserve(records.size());
    for (const auto& r : records) {
        ks.push_back(static_cast<double>(r.k));
        red.push_back(static_cast<double>(r.redundant));
        lk.push_back(std::log10(r.max_kappa));
        lkr.push_back(std::log10(r.max_kappa_r));
    }
    stats.k = metric_stats(std::move(ks));
    stats.redundant = metric_stats(std::move(red));
    stats.log10_max_kappa = metric_stats(std::move(lk));
    stats.log10_max_kappa_r = metric_stats(std::move(lkr));
    return stats;
}

std::string format_value(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    return out;
}

void write_metric_row(std::ostream& out, int generation, const char* name,
                      const MetricStats& m) {
    out << generation << ',' << name << ',' << format_value(m.p5) << ',' << format_value(m.p10)
        << ',' << format_value(m.p25) << ',' << format_value(m.p50) << ',' << format_value(m.p75)
        << ',' << format_value(m.p90) << ',' << format_value(m.p95) << ',' << format_value(m.mean)
        << '\n';
}

} // namespace

void write_candidates_csv(const std::vector<CandidateRecord>& records, const std::string& path) {
    auto out = open_out(path);
    out << "generation,index,k,min_rank,redundant,max_kappa,max_kappa_r,fitness,tree_size\n";
    for (const auto& r : records) {
        out << r.generation << ',' << r.index << ',' << r.k << ',' << r.min_rank << ','
            << r.redundant << ',' << format_value(r.max_kappa) << ','
            << format_value(r.max_kappa_r) << ',' << format_value(r.fitness) << ',' << r.tree_size
            << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_generations_csv(const std::vector<GenerationStats>& stats, const std::string& path) {
    auto out = open_out(path);
    out << "generation,metric,p5,p10,p25,p50,p75,p90,p95,mean\n";
    for (const auto& s : stats) {
        write_metric_row(out, s.generation, "k", s.k);
        write_metric_row(out, s.generation, "redundant", s.redundant);
        write_metric_row(out, s.generation, "log10_max_kappa", s.log10_max_kappa);
        write_metric_row(out, s.generation, "log10_max_kappa_r", s.log10_max_kappa_r);
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_finals_csv(const std::vector<FinalSolutionRecord>& finals, const std::string& path) {
    auto out = open_out(path);
    out << "dataset,max_size,function_set,rep,k,redundant,log10_kappa,log10_kappa_r,fitness,"
           "expression\n";
    for (const auto& f : finals) {
        out << f.dataset << ',' << f.max_size << ',' << f.function_set << ',' << f.rep << ','
            << f.k << ',' << f.redundant << ',' << format_value(f.log10_kappa) << ','
            << format_value(f.log10_kappa_r) << ',' << format_value(f.fitness) << ",\""
            << f.expression << "\"\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

const MetricStats& select_metric(const GenerationStats& s, const std::string& metric) {
    if (metric == "k") return s.k;
    if (metric == "redundant") return s.redundant;
    if (metric == "log10_max_kappa") return s.log10_max_kappa;
    if (metric == "log10_max_kappa_r") return s.log10_max_kappa_r;
    throw std::invalid_argument("unknown metric: " + metric);
}

} // namespace

void render_percentile_plot(const std::vector<GenerationStats>& stats, const std::string& metric,
                            const std::string& path) {
    if (stats.empty()) {
        throw std::invalid_argument("cannot plot empty stats");
    }

    const double width = 640, height = 420;
    const double ml = 64, mr = 16, mt = 28, mb = 44;
    const double pw = width - ml - mr, ph = height - mt - mb;

    // Axis range over finite band values; +inf/nan clamp to the top.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    auto scan = [&](double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    };
    for (const auto& s : stats) {
        const MetricStats& m = select_metric(s, metric);
        for (double v : {m.p5, m.p10, m.p25, m.p50, m.p75, m.p90, m.p95}) scan(v);
    }
    if (!std::isfinite(lo)) {
        lo = 0;
        hi = 1;
    }
    if (hi <= lo) hi = lo + 1;
    const double span = hi - lo;
    lo -= 0.05 * span;
    hi += 0.05 * span;

    const double gmin = stats.front().generation;
    const double gmax = std::max<double>(stats.back().generation, gmin + 1);

    auto sx = [&](double g) { return ml + (g - gmin) / (gmax - gmin) * pw; };
    auto sy = [&](double v) {
        if (std::isnan(v) || (std::isinf(v) && v > 0)) v = hi;
        if (std::isinf(v)) v = lo;
        v = std::clamp(v, lo, hi);
        return mt + (hi - v) / (hi - lo) * ph;
    };

    auto band = [&](auto lo_of, auto hi_of, const char* fill) {
        std::ostringstream pts;
        for (const auto& s : stats) {
            pts << sx(s.generation) << ',' << sy(lo_of(select_metric(s, metric))) << ' ';
        }
        for (auto it = stats.rbegin(); it != stats.rend(); ++it) {
            pts << sx(it->generation) << ',' << sy(hi_of(select_metric(*it, metric))) << ' ';
        }
        return "<polygon points=\"" + pts.str() + "\" fill=\"" + fill + "\" stroke=\"none\"/>\n";
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << band([](const MetricStats& m) { return m.p5; },
                [](const MetricStats& m) { return m.p95; }, "#cfe0f0");
    svg << band([](const MetricStats& m) { return m.p10; },
                [](const MetricStats& m) { return m.p90; }, "#a9c8e8");
    svg << band([](const MetricStats& m) { return m.p25; },
                [](const MetricStats& m) { return m.p75; }, "#7dabd8");

    svg << "<polyline fill=\"none\" stroke=\"#1f4e8c\" stroke-width=\"2\" points=\"";
    for (const auto& s : stats) {
        svg << sx(s.generation) << ',' << sy(select_metric(s, metric).p50) << ' ';
    }
    svg << "\"/>\n";

    // Frame and tick labels.
    svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", lo);
    svg << "<text x=\"" << ml - 6 << "\" y=\"" << mt + ph << "\" text-anchor=\"end\" "
        << "font-size=\"12\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%.3g", hi);
    svg << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 10 << "\" text-anchor=\"end\" "
        << "font-size=\"12\">" << buf << "</text>\n";
    svg << "<text x=\"" << ml << "\" y=\"" << height - 12 << "\" font-size=\"12\">generation "
        << static_cast<int>(gmin) << "</text>\n";
    svg << "<text x=\"" << ml + pw << "\" y=\"" << height - 12
        << "\" text-anchor=\"end\" font-size=\"12\">" << static_cast<int>(gmax) << "</text>\n";
    svg << "<text x=\"" << ml << "\" y=\"" << mt - 8 << "\" font-size=\"13\">" << metric
        << " (median, 25-75, 10-90, 5-95 bands)</text>\n";
    svg << "</svg>\n";

    auto out = open_out(path);
    out << svg.str();
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace srgp
