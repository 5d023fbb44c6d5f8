#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "recdiag/errors.hpp"

namespace recdiag {

/// Standard normal CDF via erfc; accurate to well under 1e-12 over the
/// range the boundary equation needs.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace detail {

/// Two-sided probability that a Brownian path crosses y = +-3a*sqrt(t) on
/// (0,1), minus the target alpha/2. Root in a is the boundary constant.
inline double boundary_equation(double a, double alpha) {
    return 1.0 - normal_cdf(3.0 * a) + std::exp(-4.0 * a * a) * normal_cdf(a) - 0.5 * alpha;
}

}  // namespace detail

/// Scale constant a of the significance curves y = +-3a*sqrt(t): solves
/// 1 - Phi(3a) + exp(-4a^2) Phi(a) = alpha / 2 by bracketed bisection on
/// (0, 10].
inline double solve_boundary_constant(double alpha) {
    if (!(alpha > 0.0 && alpha < 0.5)) {
        throw NoRoot("boundary constant requires alpha in (0, 0.5), got " +
                     std::to_string(alpha));
    }
    double lo = 1e-8;
    double hi = 10.0;
    if (detail::boundary_equation(lo, alpha) <= 0.0 ||
        detail::boundary_equation(hi, alpha) >= 0.0) {
        throw NoRoot("failed to bracket the boundary constant for alpha=" +
                     std::to_string(alpha));
    }
    // The left side is strictly above alpha/2 at 0+ and decays below it
    // before a = 10 for every alpha in range, so bisection cannot stall.
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        (detail::boundary_equation(mid, alpha) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Significance curves y = +-3a*sqrt(t) at level alpha.
struct Boundary {
    double alpha = 0.0;
    double a = 0.0;

    double upper(double t) const { return 3.0 * a * std::sqrt(t); }
    double lower(double t) const { return -3.0 * a * std::sqrt(t); }
};

inline Boundary make_boundary(double alpha) { return Boundary{alpha, solve_boundary_constant(alpha)}; }

struct CusumPoint {
    double t = 0.0;
    double x = 0.0;
};

/// Normalized cumulative-sum process of the recursive residuals: the value
/// at knot t = k/n is S_k / (sigma_hat * sqrt(n)); between knots the path
/// is linear. The path is defined up to the last knot t = (n - p)/n.
struct CusumPath {
    int perm_id = 0;
    std::vector<CusumPoint> knots;  // k = 0 .. n-p
    double sigma_hat = 0.0;
    int n = 0;
    int p = 0;
    int grid = 0;  // export sampling density; 0 = knots only

    double t_end() const { return knots.empty() ? 0.0 : knots.back().t; }

    double value_at(double t) const {
        if (knots.empty() || t <= 0.0) return 0.0;
        if (t >= t_end()) return knots.back().x;
        const double pos = t * n;
        const auto k = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(k);
        return knots[k].x + frac * (knots[k + 1].x - knots[k].x);
    }

    /// Knots plus, when grid > 0, interpolated samples at t = j/grid.
    std::vector<CusumPoint> sampled() const {
        if (grid <= 0) return knots;
        std::vector<CusumPoint> out = knots;
        for (int j = 1; j < grid; ++j) {
            const double t = static_cast<double>(j) / grid;
            if (t >= t_end()) break;
            out.push_back({t, value_at(t)});
        }
        std::sort(out.begin(), out.end(),
                  [](const CusumPoint& a, const CusumPoint& b) { return a.t < b.t; });
        return out;
    }
};

inline CusumPath cusum_path(const std::vector<double>& residuals, double sigma_hat, int n,
                            int grid = 0, int perm_id = 0) {
    if (sigma_hat <= 0.0) {
        throw ZeroVariance("cusum path undefined for sigma_hat <= 0 (perfect fit)");
    }
    const int p = n - static_cast<int>(residuals.size());
    if (p < 1 || residuals.empty()) {
        throw DimensionMismatch("cusum path expects 0 < #residuals < n");
    }
    CusumPath path;
    path.perm_id = perm_id;
    path.sigma_hat = sigma_hat;
    path.n = n;
    path.p = p;
    path.grid = grid;
    path.knots.reserve(residuals.size() + 1);

    const double scale = sigma_hat * std::sqrt(static_cast<double>(n));
    double running = 0.0;
    path.knots.push_back({0.0, 0.0});
    for (std::size_t k = 0; k < residuals.size(); ++k) {
        running += residuals[k];
        path.knots.push_back(
            {static_cast<double>(k + 1) / static_cast<double>(n), running / scale});
    }
    return path;
}

enum class CrossSide { Upper, Lower };

struct CrossingReport {
    int perm_id = 0;
    bool crossed = false;
    double first_crossing_t = 0.0;  // meaningful only when crossed
    CrossSide side = CrossSide::Upper;
};

namespace detail {

/// Smallest u in [u_lo, u_hi] solving m u^2 + b u + c = 0, or -1.
inline double smallest_root_in(double m, double b, double c, double u_lo, double u_hi) {
    constexpr double kEps = 1e-13;
    std::vector<double> roots;
    if (std::abs(m) < 1e-300) {
        if (b != 0.0) roots.push_back(-c / b);
    } else {
        const double disc = b * b - 4.0 * m * c;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            // Stable pairing: compute the larger-magnitude root first.
            const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
            roots.push_back(q / m);
            if (q != 0.0) roots.push_back(c / q);
            else roots.push_back(0.0);
        }
    }
    double best = -1.0;
    for (double u : roots) {
        if (u >= u_lo - kEps && u <= u_hi + kEps && u > 0.0) {
            const double clamped = std::clamp(u, u_lo, u_hi);
            if (best < 0.0 || clamped < best) best = clamped;
        }
    }
    return best;
}

}  // namespace detail

/// First time the piecewise-linear path meets |y| = 3a*sqrt(t), solved
/// exactly per segment by substituting u = sqrt(t), which turns each
/// segment-boundary intersection into a quadratic. The origin (t = 0, where
/// path and boundary both vanish) does not count as a crossing.
inline CrossingReport detect_crossing(const CusumPath& path, const Boundary& boundary) {
    CrossingReport report;
    report.perm_id = path.perm_id;

    const double a3 = 3.0 * boundary.a;
    for (std::size_t k = 0; k + 1 < path.knots.size(); ++k) {
        const double t0 = path.knots[k].t;
        const double t1 = path.knots[k + 1].t;
        const double x0 = path.knots[k].x;
        const double x1 = path.knots[k + 1].x;
        const double m = (x1 - x0) / (t1 - t0);
        const double c = x0 - m * t0;  // x(t) = m t + c
        const double u_lo = std::sqrt(t0);
        const double u_hi = std::sqrt(t1);

        // Upper curve: m u^2 - 3a u + c = 0; lower: m u^2 + 3a u + c = 0.
        const double up = detail::smallest_root_in(m, -a3, c, u_lo, u_hi);
        const double down = detail::smallest_root_in(m, a3, c, u_lo, u_hi);

        double u_hit = -1.0;
        CrossSide side = CrossSide::Upper;
        if (up > 0.0 && (down <= 0.0 || up <= down)) {
            u_hit = up;
            side = CrossSide::Upper;
        } else if (down > 0.0) {
            u_hit = down;
            side = CrossSide::Lower;
        }
        if (u_hit > 0.0) {
            report.crossed = true;
            report.first_crossing_t = u_hit * u_hit;
            report.side = side;
            return report;
        }
    }
    return report;
}

}  // namespace recdiag
