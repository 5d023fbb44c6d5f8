#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "recdiag/dataset.hpp"
#include "recdiag/errors.hpp"

namespace recdiag {

/// Relative singular-value cutoff below which a design is treated as rank deficient.
inline constexpr double kRankTolerance = 1e-10;

struct OlsFit {
    Eigen::VectorXd beta_hat;
    double sigma2_hat = 0.0;
    bool sigma2_defined = false;  // false when n == p (no residual degrees of freedom)
    double r2 = 0.0;
    bool r2_defined = false;      // false when the response is constant
    Eigen::VectorXd residuals;
    Eigen::VectorXd hat_diag;
};

namespace detail {

/// Thin Householder QR plus the singular-value ratio of the R factor.
/// R shares its nonzero singular values with X, so the rank check on the
/// small p x p block is equivalent to one on the full matrix.
struct ThinQr {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr;
    Eigen::MatrixXd r;  // p x p upper triangular
    double sv_ratio = 0.0;
};

inline ThinQr thin_qr(const Eigen::MatrixXd& x) {
    ThinQr out{Eigen::HouseholderQR<Eigen::MatrixXd>(x), {}, 0.0};
    const Eigen::Index p = x.cols();
    out.r = out.qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.r);
    const auto& sv = svd.singularValues();
    out.sv_ratio = sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;
    return out;
}

inline Eigen::VectorXd hat_diag_from_qr(const Eigen::HouseholderQR<Eigen::MatrixXd>& qr,
                                        Eigen::Index n, Eigen::Index p) {
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
    return q.array().square().rowwise().sum();
}

inline double total_sum_squares(const Eigen::VectorXd& y, bool centered) {
    if (!centered) return y.squaredNorm();
    const double mean = y.mean();
    return (y.array() - mean).matrix().squaredNorm();
}

inline bool response_is_constant(const Eigen::VectorXd& y, double sst) {
    const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
    const double floor = static_cast<double>(y.size()) * std::pow(1e-14 * scale, 2);
    return sst <= floor;
}

/// Core fit on raw (X, y); `centered_r2` selects the centered or uncentered
/// total sum of squares for the determination coefficient.
inline OlsFit fit_ols_xy(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         bool centered_r2) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (p < 1 || n < p) {
        throw DimensionMismatch("ols fit requires n >= p >= 1, got n=" + std::to_string(n) +
                                " p=" + std::to_string(p));
    }
    if (y.size() != n) {
        throw DimensionMismatch("ols fit: response length " + std::to_string(y.size()) +
                                " does not match " + std::to_string(n) + " rows");
    }

    const ThinQr fac = thin_qr(X);
    if (fac.sv_ratio < kRankTolerance) {
        throw RankDeficient("design matrix is numerically rank deficient (sv ratio " +
                            std::to_string(fac.sv_ratio) + ")");
    }

    OlsFit fit;
    fit.beta_hat = fac.qr.solve(y);
    fit.residuals = y - X * fit.beta_hat;
    fit.hat_diag = hat_diag_from_qr(fac.qr, n, p);

    const double sse = fit.residuals.squaredNorm();
    if (n > p) {
        fit.sigma2_hat = sse / static_cast<double>(n - p);
        fit.sigma2_defined = true;
    }

    const double sst = total_sum_squares(y, centered_r2);
    if (!response_is_constant(y, sst)) {
        fit.r2 = std::clamp(1.0 - sse / sst, 0.0, 1.0);
        fit.r2_defined = true;
    }
    return fit;
}

}  // namespace detail

/// Batch least squares via Householder QR.
inline OlsFit fit_ols(const Dataset& data) {
    return detail::fit_ols_xy(data.X, data.y, data.has_intercept());
}

/// Diagonal of the projection matrix X (X'X)^{-1} X'.
inline Eigen::VectorXd hat_matrix_diag(const Dataset& data) {
    const detail::ThinQr fac = detail::thin_qr(data.X);
    if (fac.sv_ratio < kRankTolerance) {
        throw RankDeficient("design matrix is numerically rank deficient");
    }
    return detail::hat_diag_from_qr(fac.qr, data.n(), data.p());
}

/// Solve A x = b for symmetric positive-definite A (Cholesky, one step of
/// iterative refinement).
inline Eigen::VectorXd solve_spd(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    if (A.rows() != A.cols()) {
        throw DimensionMismatch("solve_spd expects a square matrix");
    }
    if (b.size() != A.rows()) {
        throw DimensionMismatch("solve_spd: rhs length does not match matrix");
    }
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if (((A - A.transpose()).cwiseAbs().maxCoeff()) > 1e-12 * scale) {
        throw NotPositiveDefinite("matrix is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("Cholesky factorization failed; matrix is not positive definite");
    }
    Eigen::VectorXd x = llt.solve(b);
    x += llt.solve(b - A * x);
    return x;
}

}  // namespace recdiag
