#include "srgp/conditioning.hpp"

#include <Eigen/SVD>

#include <limits>
#include <stdexcept>

namespace srgp {

SvdSpectrum singular_values(const Jacobian& jac) {
    if (!jac.all_finite) {
        throw std::invalid_argument("cannot decompose a Jacobian with non-finite entries");
    }
    const int k = static_cast<int>(jac.cols());
    // One-sided Jacobi keeps relative accuracy for the tiny singular values
    // the rank threshold has to resolve.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac.values);
    SvdSpectrum spectrum;
    spectrum.k = k;
    spectrum.sigma = Eigen::VectorXd::Zero(k);
    spectrum.sigma.head(svd.singularValues().size()) = svd.singularValues();
    return spectrum;
}

int numeric_rank(const SvdSpectrum& spectrum) {
    if (spectrum.k == 0) return 0;
    const double eps = std::numeric_limits<double>::epsilon();
    const double tol = static_cast<double>(spectrum.k) * eps * spectrum.sigma[0];
    int r = 0;
    for (int i = 0; i < spectrum.k; ++i) {
        if (spectrum.sigma[i] > tol) ++r;
    }
    return r;
}

std::pair<double, double> condition_numbers(const SvdSpectrum& spectrum, int r) {
    const double inf = std::numeric_limits<double>::infinity();
    if (spectrum.k == 0) return {inf, inf};
    const double s1 = spectrum.sigma[0];
    const double sk = spectrum.sigma[spectrum.k - 1];
    double kappa = sk > 0.0 ? s1 / sk : inf;
    double kappa_r = r > 0 ? s1 / spectrum.sigma[r - 1] : inf;
    return {kappa, kappa_r};
}

JacobianReport analyze(const Jacobian& jac) {
    SvdSpectrum spectrum = singular_values(jac);
    JacobianReport report;
    report.k = spectrum.k;
    report.r = numeric_rank(spectrum);
    const double eps = std::numeric_limits<double>::epsilon();
    report.tolerance = spectrum.k > 0 ? spectrum.k * eps * spectrum.sigma[0] : 0.0;
    auto [kappa, kappa_r] = condition_numbers(spectrum, report.r);
    report.kappa = kappa;
    report.kappa_r = kappa_r;
    return report;
}

} // namespace srgp
