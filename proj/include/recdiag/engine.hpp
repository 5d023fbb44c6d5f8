#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "recdiag/dataset.hpp"
#include "recdiag/errors.hpp"
#include "recdiag/linalg.hpp"
#include "recdiag/permute.hpp"

namespace recdiag {

enum class TraceMethod { Resolve, Update };

inline const char* to_string(TraceMethod method) {
    return method == TraceMethod::Resolve ? "resolve" : "update";
}

/// One growing-prefix fit along a permutation. `recursive_residual` is the
/// standardized one-step-ahead prediction error of the row that entered at
/// this step; it is absent at the initialization step.
struct TraceStep {
    int subset_size = 0;
    Eigen::VectorXd beta;
    double sigma2 = 0.0;
    bool sigma2_defined = false;
    double r2 = 0.0;
    bool r2_defined = false;
    double recursive_residual = 0.0;
    bool has_residual = false;
};

struct RecursiveTrace {
    int perm_id = 0;
    TraceMethod method = TraceMethod::Resolve;
    Permutation perm;              // the ordering this trace followed
    std::vector<TraceStep> steps;  // length n - p + 1 when valid
    bool valid = true;
    int failed_step = -1;          // first failing step when invalid
    std::string error;

    /// The n - p recursive residuals, in entry order.
    std::vector<double> residuals() const {
        std::vector<double> out;
        out.reserve(steps.size());
        for (const auto& step : steps) {
            if (step.has_residual) out.push_back(step.recursive_residual);
        }
        return out;
    }
};

/// Fitted state of a prefix: coefficient estimate and the inverse
/// information matrix (X_I' X_I)^{-1} needed by the residual formula.
struct PrefixFitState {
    Eigen::VectorXd beta;
    Eigen::MatrixXd xtx_inv;
    int rows = 0;
};

inline PrefixFitState make_prefix_state(const Eigen::MatrixXd& Xp, const Eigen::VectorXd& yp) {
    if (Xp.rows() < Xp.cols()) {
        throw SingularInformation("prefix state needs at least p rows");
    }
    const Eigen::MatrixXd xtx = Xp.transpose() * Xp;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw SingularInformation("prefix information matrix is singular");
    }
    PrefixFitState state;
    state.xtx_inv = ldlt.solve(Eigen::MatrixXd::Identity(Xp.cols(), Xp.cols()));
    state.beta = ldlt.solve(Xp.transpose() * yp);
    state.rows = static_cast<int>(Xp.rows());
    return state;
}

/// Standardized one-step-ahead prediction error of (x_new, y_new) against a
/// previously fitted prefix: (y - x'b) / sqrt(1 + x' (X'X)^{-1} x).
inline double recursive_residual(const PrefixFitState& prev, const Eigen::VectorXd& x_new,
                                 double y_new) {
    if (x_new.size() != prev.beta.size()) {
        throw DimensionMismatch("new row length does not match fitted state");
    }
    double quad = x_new.dot(prev.xtx_inv * x_new);
    if (quad < 0.0) quad = 0.0;  // the form is nonnegative; guard rounding
    return (y_new - x_new.dot(prev.beta)) / std::sqrt(1.0 + quad);
}

namespace detail {

inline void validate_permutation(const Permutation& perm, Eigen::Index n) {
    if (static_cast<Eigen::Index>(perm.size()) != n) {
        throw InvalidConfig("permutation length " + std::to_string(perm.size()) +
                            " does not match n=" + std::to_string(n));
    }
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int v : perm) {
        if (v < 1 || v > n || seen[static_cast<std::size_t>(v - 1)]) {
            throw InvalidConfig("permutation is not a bijection on 1..n");
        }
        seen[static_cast<std::size_t>(v - 1)] = true;
    }
}

/// Running response moments for the prefix determination coefficient.
struct ResponseMoments {
    double sum = 0.0;
    double sum_sq = 0.0;
    int count = 0;

    void add(double y) {
        sum += y;
        sum_sq += y * y;
        ++count;
    }
    double sst(bool centered) const {
        if (!centered) return sum_sq;
        return sum_sq - sum * sum / static_cast<double>(count);
    }
};

inline void fill_r2(TraceStep& step, double sse, const Eigen::VectorXd& y_prefix,
                    bool centered) {
    const double sst = total_sum_squares(y_prefix, centered);
    if (!response_is_constant(y_prefix, sst)) {
        step.r2 = std::clamp(1.0 - sse / sst, 0.0, 1.0);
        step.r2_defined = true;
    }
}

}  // namespace detail

/// Recursive estimation trace by full re-factorization at every prefix.
/// Each step is an exact batch fit; residuals come from the previous step's
/// state through the shared formula.
inline RecursiveTrace recursive_trace_resolve(const Dataset& data, const Permutation& perm,
                                              int perm_id = 0) {
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    detail::validate_permutation(perm, n);

    RecursiveTrace trace;
    trace.perm_id = perm_id;
    trace.method = TraceMethod::Resolve;
    trace.perm = perm;
    trace.steps.reserve(static_cast<std::size_t>(n - p + 1));

    Eigen::MatrixXd Xk(n, p);
    Eigen::VectorXd yk(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index row = perm[static_cast<std::size_t>(k)] - 1;
        Xk.row(k) = data.X.row(row);
        yk(k) = data.y(row);
    }

    const bool centered = data.has_intercept();
    PrefixFitState prev_state;
    for (Eigen::Index k = p; k <= n; ++k) {
        const int step_index = static_cast<int>(k - p + 1);
        const auto X_prefix = Xk.topRows(k);
        const auto y_prefix = yk.head(k);

        const detail::ThinQr fac = detail::thin_qr(X_prefix);
        if (fac.sv_ratio < kRankTolerance) {
            throw PrefixRankDeficient(step_index,
                                      "prefix of size " + std::to_string(k) +
                                          " is numerically rank deficient (step " +
                                          std::to_string(step_index) + ")");
        }

        TraceStep step;
        step.subset_size = static_cast<int>(k);
        step.beta = fac.qr.solve(y_prefix);
        const double sse = (y_prefix - X_prefix * step.beta).squaredNorm();
        if (k > p) {
            step.sigma2 = sse / static_cast<double>(k - p);
            step.sigma2_defined = true;
        }
        detail::fill_r2(step, sse, y_prefix, centered);

        if (step_index > 1) {
            step.recursive_residual =
                recursive_residual(prev_state, Xk.row(k - 1).transpose(), yk(k - 1));
            step.has_residual = true;
        }

        // Fresh inverse for the next residual denominator, from this step's
        // R factor: (X'X)^{-1} = R^{-1} R^{-T}.
        const Eigen::MatrixXd r_inv =
            fac.r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
        prev_state.xtx_inv = r_inv * r_inv.transpose();
        prev_state.beta = step.beta;
        prev_state.rows = static_cast<int>(k);

        trace.steps.push_back(std::move(step));
    }
    return trace;
}

/// Recursive estimation trace by rank-one updating of beta and (X'X)^{-1}
/// (recursive least squares). Mathematically equivalent to the re-solve
/// trace; numerically it accumulates rounding error, which is the reason
/// both methods exist.
inline RecursiveTrace recursive_trace_update(const Dataset& data, const Permutation& perm,
                                             int perm_id = 0) {
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    detail::validate_permutation(perm, n);

    RecursiveTrace trace;
    trace.perm_id = perm_id;
    trace.method = TraceMethod::Update;
    trace.perm = perm;
    trace.steps.reserve(static_cast<std::size_t>(n - p + 1));

    Eigen::MatrixXd X0(p, p);
    Eigen::VectorXd y0(p);
    for (Eigen::Index k = 0; k < p; ++k) {
        const Eigen::Index row = perm[static_cast<std::size_t>(k)] - 1;
        X0.row(k) = data.X.row(row);
        y0(k) = data.y(row);
    }

    const detail::ThinQr fac = detail::thin_qr(X0);
    if (fac.sv_ratio < kRankTolerance) {
        throw PrefixRankDeficient(1, "initialization block of size " + std::to_string(p) +
                                         " is numerically rank deficient (step 1)");
    }
    const Eigen::MatrixXd r_inv =
        fac.r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));

    Eigen::MatrixXd P = r_inv * r_inv.transpose();  // (X'X)^{-1}, updated in place
    Eigen::VectorXd beta = fac.qr.solve(y0);
    double sse = (y0 - X0 * beta).squaredNorm();

    const bool centered = data.has_intercept();
    detail::ResponseMoments moments;
    for (Eigen::Index k = 0; k < p; ++k) moments.add(y0(k));

    {
        TraceStep step;
        step.subset_size = static_cast<int>(p);
        step.beta = beta;
        detail::fill_r2(step, sse, y0, centered);
        trace.steps.push_back(std::move(step));
    }

    for (Eigen::Index k = p; k < n; ++k) {
        const Eigen::Index row = perm[static_cast<std::size_t>(k)] - 1;
        const Eigen::VectorXd x = data.X.row(row).transpose();
        const double y = data.y(row);

        const Eigen::VectorXd px = P * x;
        const double denom = 1.0 + x.dot(px);
        const double innovation = y - x.dot(beta);
        const double rec_residual = innovation / std::sqrt(denom);

        beta += px * (innovation / denom);
        P -= (px * px.transpose()) / denom;
        sse += rec_residual * rec_residual;
        moments.add(y);

        TraceStep step;
        step.subset_size = static_cast<int>(k + 1);
        step.beta = beta;
        step.sigma2 = sse / static_cast<double>(k + 1 - p);
        step.sigma2_defined = true;
        step.recursive_residual = rec_residual;
        step.has_residual = true;

        const double sst = moments.sst(centered);
        Eigen::VectorXd y_prefix(k + 1);
        for (Eigen::Index j = 0; j <= k; ++j) {
            y_prefix(j) = data.y(perm[static_cast<std::size_t>(j)] - 1);
        }
        if (!detail::response_is_constant(y_prefix, sst)) {
            step.r2 = std::clamp(1.0 - sse / sst, 0.0, 1.0);
            step.r2_defined = true;
        }
        trace.steps.push_back(std::move(step));
    }
    return trace;
}

inline RecursiveTrace recursive_trace(const Dataset& data, const Permutation& perm,
                                      TraceMethod method, int perm_id = 0) {
    return method == TraceMethod::Resolve ? recursive_trace_resolve(data, perm, perm_id)
                                          : recursive_trace_update(data, perm, perm_id);
}

/// The family of traces across a schedule. `trim_alpha` only controls which
/// leading steps are exported for plotting.
struct TraceEnsemble {
    std::vector<RecursiveTrace> traces;
    PermutationSchedule schedule;
    TraceMethod method = TraceMethod::Resolve;
    double trim_alpha = 0.0;
    int n = 0;
    int p = 0;

    /// First exported 1-based step index: floor(trim_alpha * n), at least 1.
    int export_start_step() const {
        return std::max(1, static_cast<int>(std::floor(trim_alpha * n)));
    }
    int steps_per_trace() const { return n - p + 1; }
    int exported_steps() const { return steps_per_trace() - export_start_step() + 1; }
};

/// Run one trace per scheduled permutation. Traces whose prefix goes rank
/// deficient are kept but marked invalid; everything else aborts the
/// ensemble, annotated with the permutation index. Execution may be
/// parallel; results are always ordered by perm_id.
inline TraceEnsemble trace_ensemble(const Dataset& data, const PermutationSchedule& sched,
                                    TraceMethod method, double trim_alpha,
                                    unsigned threads = 0) {
    if (trim_alpha < 0.0 || trim_alpha >= 1.0) {
        throw InvalidConfig("trim_alpha must lie in [0, 1)");
    }
    const int n = static_cast<int>(data.n());
    const int p = static_cast<int>(data.p());
    if (sched.n != n) {
        throw InvalidConfig("schedule n=" + std::to_string(sched.n) +
                            " does not match dataset n=" + std::to_string(n));
    }
    if (static_cast<int>(std::floor(trim_alpha * n)) > n - p) {
        throw InvalidConfig("trim_alpha leaves no steps to export");
    }

    const std::vector<Permutation> perms = schedule_permutations(sched);

    TraceEnsemble ensemble;
    ensemble.schedule = sched;
    ensemble.method = method;
    ensemble.trim_alpha = trim_alpha;
    ensemble.n = n;
    ensemble.p = p;
    ensemble.traces.resize(perms.size());

    unsigned worker_count = threads != 0 ? threads : std::thread::hardware_concurrency();
    if (worker_count == 0) worker_count = 1;
    worker_count = std::min<unsigned>(worker_count, std::max<std::size_t>(perms.size(), 1));

    std::atomic<std::size_t> cursor{0};
    std::atomic<bool> fatal{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= perms.size() || fatal.load()) return;
            try {
                ensemble.traces[i] =
                    recursive_trace(data, perms[i], method, static_cast<int>(i));
            } catch (const PrefixRankDeficient& e) {
                RecursiveTrace broken;
                broken.perm_id = static_cast<int>(i);
                broken.method = method;
                broken.perm = perms[i];
                broken.valid = false;
                broken.failed_step = e.step;
                broken.error = e.what();
                ensemble.traces[i] = std::move(broken);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    try {
                        throw;
                    } catch (const Error& e) {
                        first_error = std::make_exception_ptr(
                            Error(e.category(), "trace " + std::to_string(i) + ": " + e.what()));
                    } catch (...) {
                        first_error = std::current_exception();
                    }
                }
                fatal.store(true);
                return;
            }
        }
    };

    if (worker_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(worker_count);
        for (unsigned t = 0; t < worker_count; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return ensemble;
}

}  // namespace recdiag
