#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "recdiag/dataset.hpp"
#include "recdiag/errors.hpp"
#include "recdiag/rng.hpp"

namespace recdiag {

enum class PerturbTarget { None, XOnly, YOnly, Both };

inline const char* to_string(PerturbTarget target) {
    switch (target) {
        case PerturbTarget::None: return "none";
        case PerturbTarget::XOnly: return "x";
        case PerturbTarget::YOnly: return "y";
        case PerturbTarget::Both: return "both";
    }
    return "?";
}

enum class PositionRule { Middle, Consecutive, RandomK };

inline const char* to_string(PositionRule rule) {
    switch (rule) {
        case PositionRule::Middle: return "middle";
        case PositionRule::Consecutive: return "consecutive";
        case PositionRule::RandomK: return "random";
    }
    return "?";
}

/// Where perturbed observations sit: the single middle row, a block of k
/// consecutive rows anchored at the middle, or k distinct rows drawn
/// uniformly with a seed of their own.
struct OutlierPositions {
    PositionRule rule = PositionRule::Middle;
    int k = 1;             // Consecutive / RandomK only
    std::uint64_t seed = 0;  // RandomK only
};

/// Simulation recipe: y = beta0 + beta1 * x + noise, with x double
/// exponential around 1 and optional multiplicative perturbation of chosen
/// rows.
struct ScenarioSpec {
    int n = 100;
    double beta0 = 1.0;
    double beta1 = 2.0;
    double noise_sd = 0.1;
    double perturb_factor = 10.0;
    PerturbTarget target = PerturbTarget::None;
    OutlierPositions positions;
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (n < 4) throw InvalidConfig("scenario requires n >= 4");
        if (noise_sd < 0.0) throw InvalidConfig("scenario noise_sd must be >= 0");
        if (perturb_factor == 0.0) throw InvalidConfig("scenario perturb_factor must be nonzero");
        if (positions.rule != PositionRule::Middle && positions.k >= n) {
            throw InvalidConfig("scenario outlier count k must be < n");
        }
        if (positions.k < 1) throw InvalidConfig("scenario outlier count k must be >= 1");
    }
};

struct GeneratedData {
    Dataset data;
    double true_beta0 = 0.0;
    double true_beta1 = 0.0;
    double noise_sd = 0.0;
};

/// Unperturbed draw from the scenario model. Deterministic under rng_seed:
/// all x_i first, then all noise terms, from one generator.
inline GeneratedData generate_clean(const ScenarioSpec& spec) {
    spec.validate();
    Rng rng(spec.rng_seed);

    Eigen::MatrixXd X(spec.n, 2);
    Eigen::VectorXd y(spec.n);
    X.col(0).setOnes();
    for (int i = 0; i < spec.n; ++i) {
        X(i, 1) = rng.laplace(1.0, 1.0);
    }
    for (int i = 0; i < spec.n; ++i) {
        y(i) = spec.beta0 + spec.beta1 * X(i, 1) + spec.noise_sd * rng.gaussian();
    }

    std::vector<std::string> labels{"(intercept)", "x"};
    GeneratedData out{Dataset::make(std::move(X), std::move(y), std::move(labels)),
                      spec.beta0, spec.beta1, spec.noise_sd};
    return out;
}

/// 1-based row positions the spec perturbs.
inline std::vector<int> resolve_positions(const OutlierPositions& positions, int n) {
    const int middle = n / 2;
    std::vector<int> rows;
    switch (positions.rule) {
        case PositionRule::Middle:
            rows.push_back(middle);
            break;
        case PositionRule::Consecutive:
            for (int j = 0; j < positions.k; ++j) rows.push_back(middle + j);
            break;
        case PositionRule::RandomK: {
            // Partial Fisher-Yates over 1..n, first k entries kept.
            std::vector<int> pool(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i + 1;
            Rng rng(positions.seed);
            for (int j = 0; j < positions.k; ++j) {
                const auto pick = static_cast<std::size_t>(
                    rng.uniform_below(static_cast<std::uint64_t>(n - j)));
                std::swap(pool[static_cast<std::size_t>(j)],
                          pool[static_cast<std::size_t>(j) + pick]);
                rows.push_back(pool[static_cast<std::size_t>(j)]);
            }
            std::sort(rows.begin(), rows.end());
            break;
        }
    }
    for (int row : rows) {
        if (row < 1 || row > n) {
            throw PositionsOutOfRange("outlier position " + std::to_string(row) +
                                      " outside 1.." + std::to_string(n));
        }
    }
    return rows;
}

/// Multiplies x and/or y by the perturbation factor at the resolved
/// positions; the input dataset is left untouched. Non-intercept design
/// columns are the ones scaled.
inline Dataset inject_outliers(const Dataset& input, const ScenarioSpec& spec) {
    spec.validate();
    if (spec.target == PerturbTarget::None) return input;

    const int n = static_cast<int>(input.n());
    const std::vector<int> rows = resolve_positions(spec.positions, n);

    Eigen::MatrixXd X = input.X;
    Eigen::VectorXd y = input.y;
    for (int row : rows) {
        const Eigen::Index i = row - 1;
        if (spec.target == PerturbTarget::XOnly || spec.target == PerturbTarget::Both) {
            for (Eigen::Index j = 0; j < X.cols(); ++j) {
                if (input.intercept_col && *input.intercept_col == j) continue;
                X(i, j) *= spec.perturb_factor;
            }
        }
        if (spec.target == PerturbTarget::YOnly || spec.target == PerturbTarget::Both) {
            y(i) *= spec.perturb_factor;
        }
    }
    return Dataset::make(std::move(X), std::move(y), input.labels, input.row_ids);
}

/// Clean draw plus injection in one call.
inline Dataset generate_scenario(const ScenarioSpec& spec) {
    return inject_outliers(generate_clean(spec).data, spec);
}

}  // namespace recdiag
