#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace srgp {

/// Immutable regression problem: inputs X (n rows, d columns), target y.
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<std::string> names; ///< one label per input column, unique
    std::string target_name = "y";
    std::string provenance;         ///< "generated(<name>)" or "loaded(<path>)"

    Eigen::Index rows() const { return X.rows(); }
    Eigen::Index cols() const { return X.cols(); }
};

enum class Benchmark { Kotanchek, Pagie, Poly10, Salustowicz2D };

/// Parameters for the synthetic generators. `n == 0` picks the per-benchmark
/// default row count (100, 676, 250, 600). Pagie is a fixed grid; any explicit
/// n other than 676 is rejected.
struct DatasetSpec {
    Benchmark name = Benchmark::Pagie;
    Eigen::Index n = 0;
    std::uint64_t seed = 0;
};

std::optional<Benchmark> benchmark_from_string(const std::string& name);
std::string to_string(Benchmark b);

/// Noise-free synthetic data for the four benchmark functions.
Dataset generate(const DatasetSpec& spec);

/// Scalar benchmark functions (targets of `generate`).
double kotanchek_f(double x1, double x2);
double pagie_f(double x1, double x2);
double poly10_f(const Eigen::VectorXd& x);
double salustowicz2d_f(double x, double y);

/// Reads a rectangular numeric CSV with a header row; the named column becomes
/// the target, everything else an input in header order. `expected_d` /
/// `expected_n` validate shape when provided. Parse failures carry the
/// 1-based line number.
Dataset load_csv(const std::string& path, const std::string& target_column,
                 std::optional<Eigen::Index> expected_d = std::nullopt,
                 std::optional<Eigen::Index> expected_n = std::nullopt);

} // namespace srgp
