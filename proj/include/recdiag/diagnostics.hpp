#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "recdiag/dataset.hpp"
#include "recdiag/errors.hpp"
#include "recdiag/linalg.hpp"

namespace recdiag {

struct DiagnosticsRow {
    std::string row_id;
    double leverage = 0.0;
    bool high_leverage = false;
    double standardized_residual = 0.0;
    double cook_distance = 0.0;
    double dffit = 0.0;
};

/// Classical single-deletion diagnostics for every observation, plus the
/// thresholds used to flag them.
struct DiagnosticsReport {
    std::vector<DiagnosticsRow> rows;
    double leverage_threshold = 0.0;  // 2p/n
    int n = 0;
    int p = 0;
};

/// Leverage, standardized residuals, Cook distance, and DFFITS, all from
/// the single full-sample fit through the exact deletion identities:
///
///   std_i    = e_i / (s * sqrt(1 - h_i))
///   Cook_i   = (std_i^2 / p) * h_i / (1 - h_i)
///   s_(i)^2  = ((n-p) s^2 - e_i^2 / (1 - h_i)) / (n - p - 1)
///   DFFIT_i  = t_i * sqrt(h_i / (1 - h_i)),  t_i externally studentized.
///
/// Rows with h_i = 1 make the deletion identities singular and raise
/// LeverageOne.
inline DiagnosticsReport classical_diagnostics(const Dataset& data) {
    const auto n = data.n();
    const auto p = data.p();
    if (n <= p + 1) {
        throw InvalidConfig("diagnostics require n > p + 1 so deletion fits stay overdetermined");
    }

    const OlsFit fit = fit_ols(data);
    const double sigma = std::sqrt(fit.sigma2_hat);
    if (sigma == 0.0) {
        throw ZeroVariance("diagnostics undefined for a perfect fit");
    }

    DiagnosticsReport report;
    report.n = static_cast<int>(n);
    report.p = static_cast<int>(p);
    report.leverage_threshold = 2.0 * static_cast<double>(p) / static_cast<double>(n);
    report.rows.reserve(static_cast<std::size_t>(n));

    constexpr double kLeverageOneTol = 1e-8;
    const double dof = static_cast<double>(n - p);

    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = fit.hat_diag(i);
        if (h >= 1.0 - kLeverageOneTol) {
            throw LeverageOne("observation " + data.row_ids[static_cast<std::size_t>(i)] +
                              " has leverage 1; deletion formulas are singular");
        }
        const double e = fit.residuals(i);
        const double std_res = e / (sigma * std::sqrt(1.0 - h));
        const double cook = (std_res * std_res / static_cast<double>(p)) * h / (1.0 - h);

        double sigma2_del = (dof * fit.sigma2_hat - e * e / (1.0 - h)) / (dof - 1.0);
        if (sigma2_del < 0.0) sigma2_del = 0.0;
        const double studentized =
            sigma2_del > 0.0 ? e / (std::sqrt(sigma2_del) * std::sqrt(1.0 - h)) : 0.0;
        const double dffit = studentized * std::sqrt(h / (1.0 - h));

        report.rows.push_back({data.row_ids[static_cast<std::size_t>(i)], h,
                               h >= report.leverage_threshold, std_res, cook, dffit});
    }
    return report;
}

}  // namespace recdiag
