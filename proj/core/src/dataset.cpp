#include "srgp/dataset.hpp"

#include "srgp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace srgp {

namespace {

std::vector<std::string> numbered_names(Eigen::Index d) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) {
        names.push_back("x" + std::to_string(i + 1));
    }
    return names;
}

} // namespace

std::optional<Benchmark> benchmark_from_string(const std::string& name) {
    std::string s;
    s.reserve(name.size());
    for (char c : name) {
        s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (s == "kotanchek") return Benchmark::Kotanchek;
    if (s == "pagie") return Benchmark::Pagie;
    if (s == "poly10" || s == "poly-10") return Benchmark::Poly10;
    if (s == "salustowicz2d") return Benchmark::Salustowicz2D;
    return std::nullopt;
}

std::string to_string(Benchmark b) {
    switch (b) {
    case Benchmark::Kotanchek: return "kotanchek";
    case Benchmark::Pagie: return "pagie";
    case Benchmark::Poly10: return "poly10";
    case Benchmark::Salustowicz2D: return "salustowicz2d";
    }
    return "?";
}

double kotanchek_f(double x1, double x2) {
    double a = x1 - 1.0;
    double b = x2 - 2.5;
    return std::exp(-a * a) / (1.2 + b * b);
}

double pagie_f(double x1, double x2) {
    return 1.0 / (1.0 + std::pow(x1, -4.0)) + 1.0 / (1.0 + std::pow(x2, -4.0));
}

double poly10_f(const Eigen::VectorXd& x) {
    return x[0] * x[1] + x[2] * x[3] + x[4] * x[5] + x[0] * x[6] * x[8] + x[2] * x[5] * x[9];
}

double salustowicz2d_f(double x, double y) {
    double s = std::sin(x);
    double c = std::cos(x);
    return std::exp(-x) * x * x * x * c * s * (c * s * s - 1.0) * (y - 5.0);
}

Dataset generate(const DatasetSpec& spec) {
    std::mt19937_64 rng = stream(spec.seed, 0, static_cast<std::uint64_t>(spec.name));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    Dataset ds;
    ds.provenance = "generated(" + to_string(spec.name) + ")";

    switch (spec.name) {
    case Benchmark::Kotanchek: {
        Eigen::Index n = spec.n > 0 ? spec.n : 100;
        ds.X.resize(n, 2);
        ds.y.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            ds.X(i, 0) = uniform(0.3, 4.0);
            ds.X(i, 1) = uniform(0.3, 4.0);
            ds.y[i] = kotanchek_f(ds.X(i, 0), ds.X(i, 1));
        }
        ds.names = numbered_names(2);
        break;
    }
    case Benchmark::Pagie: {
        // Full grid -5.0, -4.6, ..., 5.0 in both variables; 26*26 = 676 rows.
        // The grid never hits zero, so x^-4 stays finite.
        if (spec.n != 0 && spec.n != 676) {
            throw std::invalid_argument("pagie is a fixed 26x26 grid (676 rows); got n=" +
                                        std::to_string(spec.n));
        }
        ds.X.resize(676, 2);
        ds.y.resize(676);
        Eigen::Index row = 0;
        for (int i = 0; i < 26; ++i) {
            for (int j = 0; j < 26; ++j) {
                double a = (-50.0 + 4.0 * i) / 10.0;
                double b = (-50.0 + 4.0 * j) / 10.0;
                ds.X(row, 0) = a;
                ds.X(row, 1) = b;
                ds.y[row] = pagie_f(a, b);
                ++row;
            }
        }
        ds.names = numbered_names(2);
        break;
    }
    case Benchmark::Poly10: {
        Eigen::Index n = spec.n > 0 ? spec.n : 250;
        ds.X.resize(n, 10);
        ds.y.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < 10; ++j) {
                ds.X(i, j) = uniform(-1.0, 1.0);
            }
            ds.y[i] = poly10_f(ds.X.row(i).transpose());
        }
        ds.names = numbered_names(10);
        break;
    }
    case Benchmark::Salustowicz2D: {
        Eigen::Index n = spec.n > 0 ? spec.n : 600;
        ds.X.resize(n, 2);
        ds.y.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            ds.X(i, 0) = uniform(0.05, 10.0);
            ds.X(i, 1) = uniform(0.05, 10.05);
            ds.y[i] = salustowicz2d_f(ds.X(i, 0), ds.X(i, 1));
        }
        ds.names = numbered_names(2);
        break;
    }
    }
    return ds;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim surrounding blanks
        auto b = cell.find_first_not_of(" \t\r");
        auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

} // namespace

Dataset load_csv(const std::string& path, const std::string& target_column,
                 std::optional<Eigen::Index> expected_d, std::optional<Eigen::Index> expected_n) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open csv file: " + path);
    }

    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(path + ":1: empty file, expected header row");
    }
    auto header = split_line(line);
    if (header.empty()) {
        throw std::runtime_error(path + ":1: empty header row");
    }
    std::unordered_set<std::string> seen;
    for (const auto& h : header) {
        if (!seen.insert(h).second) {
            throw std::runtime_error(path + ":1: duplicate column name '" + h + "'");
        }
    }

    auto target_it = std::find(header.begin(), header.end(), target_column);
    if (target_it == header.end()) {
        throw std::runtime_error(path + ":1: target column '" + target_column +
                                 "' not found in header");
    }
    std::size_t target_idx = static_cast<std::size_t>(target_it - header.begin());

    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = split_line(line);
        if (cells.size() != header.size()) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(header.size()) + " cells, got " +
                                     std::to_string(cells.size()));
        }
        std::vector<double> row(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j) {
            std::size_t pos = 0;
            try {
                row[j] = std::stod(cells[j], &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos == 0 || pos != cells[j].size()) {
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": non-numeric cell '" + cells[j] + "' in column '" +
                                         header[j] + "'");
            }
            if (!std::isfinite(row[j])) {
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": non-finite value in column '" + header[j] + "'");
            }
        }
        rows.push_back(std::move(row));
    }

    if (rows.empty()) {
        throw std::runtime_error(path + ": no data rows");
    }

    Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    Eigen::Index d = static_cast<Eigen::Index>(header.size()) - 1;
    if (expected_d && *expected_d != d) {
        throw std::runtime_error(path + ": expected " + std::to_string(*expected_d) +
                                 " input columns, got " + std::to_string(d));
    }
    if (expected_n && *expected_n != n) {
        throw std::runtime_error(path + ": expected " + std::to_string(*expected_n) +
                                 " rows, got " + std::to_string(n));
    }

    Dataset ds;
    ds.X.resize(n, d);
    ds.y.resize(n);
    ds.target_name = target_column;
    ds.provenance = "loaded(" + path + ")";
    for (const auto& h : header) {
        if (h != target_column) ds.names.push_back(h);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index col = 0;
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (j == target_idx) {
                ds.y[i] = rows[static_cast<std::size_t>(i)][j];
            } else {
                ds.X(i, col++) = rows[static_cast<std::size_t>(i)][j];
            }
        }
    }
    return ds;
}

} // namespace srgp
