#pragma once

#include <stdexcept>
#include <string>

namespace recdiag {

/// Error categories; the CLI maps each category to a distinct exit code.
enum class ErrorCategory : int {
    Parse = 2,
    Rank = 3,
    Config = 4,
    Numeric = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg)
        : Error(ErrorCategory::Numeric, msg) {}
};

// Numerical rank below column count (smallest/largest singular value under tolerance).
struct RankDeficient : Error {
    explicit RankDeficient(const std::string& msg) : Error(ErrorCategory::Rank, msg) {}
};

// A growing-prefix fit hit a rank-deficient subset; `step` is the 1-based trace step.
struct PrefixRankDeficient : Error {
    PrefixRankDeficient(int step_, const std::string& msg)
        : Error(ErrorCategory::Rank, msg), step(step_) {}
    int step;
};

struct NotPositiveDefinite : Error {
    explicit NotPositiveDefinite(const std::string& msg)
        : Error(ErrorCategory::Numeric, msg) {}
};

struct SingularInformation : Error {
    explicit SingularInformation(const std::string& msg)
        : Error(ErrorCategory::Numeric, msg) {}
};

struct ZeroVariance : Error {
    explicit ZeroVariance(const std::string& msg) : Error(ErrorCategory::Numeric, msg) {}
};

struct NoRoot : Error {
    explicit NoRoot(const std::string& msg) : Error(ErrorCategory::Config, msg) {}
};

struct TooLargeForExhaustive : Error {
    explicit TooLargeForExhaustive(const std::string& msg)
        : Error(ErrorCategory::Config, msg) {}
};

struct PositionsOutOfRange : Error {
    explicit PositionsOutOfRange(const std::string& msg)
        : Error(ErrorCategory::Config, msg) {}
};

// Some diagonal hat-matrix entry equals one; deletion formulas are singular there.
struct LeverageOne : Error {
    explicit LeverageOne(const std::string& msg) : Error(ErrorCategory::Rank, msg) {}
};

struct InvalidConfig : Error {
    explicit InvalidConfig(const std::string& msg) : Error(ErrorCategory::Config, msg) {}
};

struct UnknownRowId : Error {
    explicit UnknownRowId(const std::string& msg) : Error(ErrorCategory::Config, msg) {}
};

struct MissingResponse : Error {
    explicit MissingResponse(const std::string& msg) : Error(ErrorCategory::Parse, msg) {}
};

struct ParseError : Error {
    ParseError(int row_, int col_, const std::string& msg)
        : Error(ErrorCategory::Parse, msg), row(row_), col(col_) {}
    int row;  // 1-based line number, header = line 1
    int col;  // 1-based column number
};

}  // namespace recdiag
