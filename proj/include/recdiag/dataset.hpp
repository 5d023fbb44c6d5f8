#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "recdiag/errors.hpp"

namespace recdiag {

/// A regression problem: design matrix (intercept column included when the
/// model has one), response vector, and the names attached to columns/rows.
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<std::string> labels;   // p column names
    std::vector<std::string> row_ids;  // n observation identifiers
    std::optional<Eigen::Index> intercept_col;

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index p() const { return X.cols(); }
    bool has_intercept() const { return intercept_col.has_value(); }

    static Dataset make(Eigen::MatrixXd X, Eigen::VectorXd y,
                        std::vector<std::string> labels = {},
                        std::vector<std::string> row_ids = {}) {
        const Eigen::Index n = X.rows();
        const Eigen::Index p = X.cols();
        if (p < 1 || n < p) {
            throw DimensionMismatch("dataset requires n >= p >= 1, got n=" +
                                    std::to_string(n) + " p=" + std::to_string(p));
        }
        if (y.size() != n) {
            throw DimensionMismatch("response length " + std::to_string(y.size()) +
                                    " does not match " + std::to_string(n) + " rows");
        }
        if (labels.empty()) {
            labels.reserve(static_cast<std::size_t>(p));
            for (Eigen::Index j = 0; j < p; ++j) labels.push_back("x" + std::to_string(j));
        }
        if (row_ids.empty()) {
            row_ids.reserve(static_cast<std::size_t>(n));
            for (Eigen::Index i = 0; i < n; ++i) row_ids.push_back(std::to_string(i + 1));
        }
        if (static_cast<Eigen::Index>(labels.size()) != p) {
            throw DimensionMismatch("expected " + std::to_string(p) + " column labels, got " +
                                    std::to_string(labels.size()));
        }
        if (static_cast<Eigen::Index>(row_ids.size()) != n) {
            throw DimensionMismatch("expected " + std::to_string(n) + " row ids, got " +
                                    std::to_string(row_ids.size()));
        }

        Dataset data{std::move(X), std::move(y), std::move(labels), std::move(row_ids), {}};
        for (Eigen::Index j = 0; j < p; ++j) {
            if ((data.X.col(j).array() == 1.0).all()) {
                data.intercept_col = j;
                break;
            }
        }
        return data;
    }

    /// New dataset restricted to the given 0-based row indices, in order.
    Dataset select_rows(const std::vector<Eigen::Index>& rows) const {
        Eigen::MatrixXd Xs(static_cast<Eigen::Index>(rows.size()), p());
        Eigen::VectorXd ys(static_cast<Eigen::Index>(rows.size()));
        std::vector<std::string> ids;
        ids.reserve(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const Eigen::Index i = rows[k];
            if (i < 0 || i >= n()) {
                throw DimensionMismatch("row index " + std::to_string(i) + " out of range");
            }
            Xs.row(static_cast<Eigen::Index>(k)) = X.row(i);
            ys(static_cast<Eigen::Index>(k)) = y(i);
            ids.push_back(row_ids[static_cast<std::size_t>(i)]);
        }
        return make(std::move(Xs), std::move(ys), labels, std::move(ids));
    }
};

}  // namespace recdiag
