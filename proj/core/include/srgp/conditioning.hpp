#pragma once

#include "srgp/diff.hpp"

#include <Eigen/Core>

namespace srgp {

/// Singular values of a Jacobian, sorted descending and padded with exact
/// zeros up to the column count when rows < cols.
struct SvdSpectrum {
    Eigen::VectorXd sigma;
    int k = 0;
};

/// Per-Jacobian conditioning record: numeric rank r against the threshold
/// k*eps*sigma_1, full condition number kappa = sigma_1/sigma_k and truncated
/// condition number kappa_r = sigma_1/sigma_r. kappa may be +inf.
struct JacobianReport {
    int k = 0;
    int r = 0;
    double kappa = 0.0;
    double kappa_r = 0.0;
    double tolerance = 0.0;
};

/// Singular values only (U and V are not retained).
SvdSpectrum singular_values(const Jacobian& jac);

/// r = |{i : sigma_i > k * eps * sigma_1}| with eps the 1.0-ulp gap of double.
int numeric_rank(const SvdSpectrum& spectrum);

/// (kappa, kappa_r); kappa is +inf when sigma_k == 0, kappa_r is +inf only
/// when r == 0.
std::pair<double, double> condition_numbers(const SvdSpectrum& spectrum, int r);

/// singular_values + numeric_rank + condition_numbers in one record.
JacobianReport analyze(const Jacobian& jac);

} // namespace srgp
