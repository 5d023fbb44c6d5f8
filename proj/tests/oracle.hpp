#pragma once

// Test-only reference implementations, deliberately independent of the
// library's solve paths: plain Gaussian elimination on the normal equations
// in 80-bit long double, a step-halving root bracketer, and small-sample
// statistics helpers.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace oracle {

using LongMatrix = std::vector<std::vector<long double>>;
using LongVector = std::vector<long double>;

inline LongVector solve_linear(LongMatrix A, LongVector b) {
    const std::size_t n = A.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(A[r][col]) > std::fabs(A[pivot][col])) pivot = r;
        }
        if (A[pivot][col] == 0.0L) throw std::runtime_error("oracle: singular system");
        std::swap(A[col], A[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const long double f = A[r][col] / A[col][col];
            for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    LongVector x(n, 0.0L);
    for (std::size_t i = n; i-- > 0;) {
        long double acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= A[i][c] * x[c];
        x[i] = acc / A[i][i];
    }
    return x;
}

/// Normal-equations least squares, all accumulation in long double.
inline LongVector ols_beta(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const std::size_t n = static_cast<std::size_t>(X.rows());
    const std::size_t p = static_cast<std::size_t>(X.cols());
    LongMatrix xtx(p, LongVector(p, 0.0L));
    LongVector xty(p, 0.0L);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < p; ++a) {
            const long double xa = X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a));
            xty[a] += xa * static_cast<long double>(y(static_cast<Eigen::Index>(i)));
            for (std::size_t c = 0; c < p; ++c) {
                xtx[a][c] += xa * static_cast<long double>(
                                      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)));
            }
        }
    }
    return solve_linear(std::move(xtx), std::move(xty));
}

/// Explicit projector X (X'X)^{-1} X' in long double.
inline LongMatrix hat_matrix(const Eigen::MatrixXd& X) {
    const std::size_t n = static_cast<std::size_t>(X.rows());
    const std::size_t p = static_cast<std::size_t>(X.cols());
    // Columns of (X'X)^{-1} X' obtained by p solves per observation column.
    LongMatrix H(n, LongVector(n, 0.0L));
    for (std::size_t j = 0; j < n; ++j) {
        LongMatrix xtx(p, LongVector(p, 0.0L));
        LongVector rhs(p, 0.0L);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t a = 0; a < p; ++a) {
                const long double xa =
                    X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a));
                for (std::size_t c = 0; c < p; ++c) {
                    xtx[a][c] += xa * static_cast<long double>(
                                          X(static_cast<Eigen::Index>(i),
                                            static_cast<Eigen::Index>(c)));
                }
            }
        }
        for (std::size_t a = 0; a < p; ++a) {
            rhs[a] = X(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(a));
        }
        const LongVector w = solve_linear(std::move(xtx), std::move(rhs));  // (X'X)^{-1} x_j
        for (std::size_t i = 0; i < n; ++i) {
            long double acc = 0.0L;
            for (std::size_t a = 0; a < p; ++a) {
                acc += static_cast<long double>(
                           X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a))) *
                       w[a];
            }
            H[i][j] = acc;
        }
    }
    return H;
}

inline long double spd_solve_entry(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                   std::size_t i) {
    const std::size_t n = static_cast<std::size_t>(A.rows());
    LongMatrix M(n, LongVector(n, 0.0L));
    LongVector rhs(n, 0.0L);
    for (std::size_t r = 0; r < n; ++r) {
        rhs[r] = b(static_cast<Eigen::Index>(r));
        for (std::size_t c = 0; c < n; ++c) {
            M[r][c] = A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return solve_linear(std::move(M), std::move(rhs))[i];
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Boundary-constant root via pure interval step-halving on [lo, hi].
inline double boundary_constant_bisect(double alpha, double lo = 1e-8, double hi = 10.0) {
    auto f = [alpha](double a) {
        return 1.0 - normal_cdf(3.0 * a) + std::exp(-4.0 * a * a) * normal_cdf(a) -
               0.5 * alpha;
    };
    if (f(lo) <= 0.0 || f(hi) >= 0.0) throw std::runtime_error("oracle: no bracket");
    for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double mean(const std::vector<double>& v) {
    long double acc = 0.0L;
    for (double x : v) acc += x;
    return static_cast<double>(acc / static_cast<long double>(v.size()));
}

inline double variance(const std::vector<double>& v) {
    const double m = mean(v);
    long double acc = 0.0L;
    for (double x : v) acc += (x - m) * (x - m);
    return static_cast<double>(acc / static_cast<long double>(v.size() - 1));
}

inline double lag1_autocorrelation(const std::vector<double>& v) {
    const double m = mean(v);
    long double num = 0.0L, den = 0.0L;
    for (std::size_t i = 0; i < v.size(); ++i) {
        den += (v[i] - m) * (v[i] - m);
        if (i + 1 < v.size()) num += (v[i] - m) * (v[i + 1] - m);
    }
    return static_cast<double>(num / den);
}

/// Kolmogorov-Smirnov p-value of `sample` against N(mu, sigma^2),
/// using the asymptotic Kolmogorov distribution with the small-sample
/// correction (sqrt(m) + 0.12 + 0.11/sqrt(m)) * D.
inline double ks_pvalue_normal(std::vector<double> sample, double mu, double sigma) {
    std::sort(sample.begin(), sample.end());
    const double m = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = normal_cdf((sample[i] - mu) / sigma);
        const double lo = static_cast<double>(i) / m;
        const double hi = static_cast<double>(i + 1) / m;
        d = std::max({d, std::abs(f - lo), std::abs(f - hi)});
    }
    const double lambda = (std::sqrt(m) + 0.12 + 0.11 / std::sqrt(m)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
        p += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(p, 0.0, 1.0);
}

/// Deterministic filler for test fixtures (xorshift-mixed counter; not the
/// library generator on purpose).
class FixtureRng {
public:
    explicit FixtureRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next_u64() {
        state_ ^= state_ << 13;
        state_ ^= state_ >> 7;
        state_ ^= state_ << 17;
        return state_ * 0x2545f4914f6cdd1dULL;
    }

    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double gaussian() {
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.141592653589793238462643 * u2);
    }

private:
    std::uint64_t state_;
};

inline Eigen::MatrixXd random_matrix(std::size_t n, std::size_t p, std::uint64_t seed) {
    FixtureRng rng(seed);
    Eigen::MatrixXd X(n, p);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = rng.gaussian();
    }
    return X;
}

inline Eigen::VectorXd random_vector(std::size_t n, std::uint64_t seed) {
    FixtureRng rng(seed);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.gaussian();
    return v;
}

}  // namespace oracle
