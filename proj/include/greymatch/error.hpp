#pragma once

#include <stdexcept>
#include <string>

namespace greymatch {

/// Broad failure classes; the CLI maps each one to an exit code.
enum class ErrorKind { usage = 1, data = 2, numerical = 3, tolerance = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& message)
        : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& code() const noexcept { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

struct ShapeError : Error {
    explicit ShapeError(const std::string& m) : Error(ErrorKind::data, "shape", m) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& m) : Error(ErrorKind::data, "parse", m) {}
};

struct InsufficientDataError : Error {
    explicit InsufficientDataError(const std::string& m) : Error(ErrorKind::data, "insufficient_data", m) {}
};

struct AlignmentError : Error {
    explicit AlignmentError(const std::string& m) : Error(ErrorKind::data, "alignment", m) {}
};

struct DivisionByZeroError : Error {
    explicit DivisionByZeroError(const std::string& m) : Error(ErrorKind::data, "division_by_zero", m) {}
};

struct PreconditionError : Error {
    explicit PreconditionError(const std::string& m) : Error(ErrorKind::data, "precondition", m) {}
};

struct UnsupportedError : Error {
    explicit UnsupportedError(const std::string& m) : Error(ErrorKind::usage, "unsupported", m) {}
};

struct SingularDesignError : Error {
    SingularDesignError(const std::string& m, std::size_t deficient)
        : Error(ErrorKind::numerical, "singular_design", m), deficient_columns(deficient) {}
    std::size_t deficient_columns;
};

struct SingularMatrixError : Error {
    explicit SingularMatrixError(const std::string& m) : Error(ErrorKind::numerical, "singular_matrix", m) {}
};

struct StrategyInapplicableError : Error {
    explicit StrategyInapplicableError(const std::string& m)
        : Error(ErrorKind::numerical, "strategy_inapplicable", m) {}
};

struct OverflowError : Error {
    explicit OverflowError(const std::string& m) : Error(ErrorKind::numerical, "overflow", m) {}
};

}  // namespace greymatch
