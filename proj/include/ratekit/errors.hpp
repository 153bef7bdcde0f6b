#pragma once

#include <stdexcept>
#include <string>

namespace ratekit {

/// Coarse error classes, used by callers (notably the CLI) to map failures
/// to exit codes: input data problems, model/spec problems, and numerical
/// degeneracies are distinct failure modes.
enum class ErrorClass { input, spec, numerical, internal };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what)
        : std::runtime_error(what), cls_(cls) {}
    ErrorClass error_class() const noexcept { return cls_; }

private:
    ErrorClass cls_;
};

// -- input-class errors -------------------------------------------------

/// Structurally broken input (bad CSV, wrong field count, bad header).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(ErrorClass::input, what) {}
};

/// A cell or scalar that exists but cannot be interpreted (non-numeric text).
class ValueError : public Error {
public:
    explicit ValueError(const std::string& what) : Error(ErrorClass::input, what) {}
};

/// Violated data invariants: duplicate periods, too few rows, unsorted axes.
class IntegrityError : public Error {
public:
    explicit IntegrityError(const std::string& what) : Error(ErrorClass::input, what) {}
};

/// Series or panels that should share a period axis but do not.
class AlignmentError : public Error {
public:
    explicit AlignmentError(const std::string& what) : Error(ErrorClass::input, what) {}
};

/// Mathematical domain violations (log of a non-positive value, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorClass::input, what) {}
};

/// Mismatched vector/matrix dimensions between otherwise valid objects.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what) : Error(ErrorClass::input, what) {}
};

// -- spec-class errors --------------------------------------------------

/// A model specification that names missing columns, an unknown builtin
/// kind, or carries inconsistent fields.
class SpecError : public Error {
public:
    explicit SpecError(const std::string& what) : Error(ErrorClass::spec, what) {}
};

// -- numerical-class errors ----------------------------------------------

/// Rank-deficient design (near-dependent columns).
class SingularityError : public Error {
public:
    explicit SingularityError(const std::string& what) : Error(ErrorClass::numerical, what) {}
};

/// Degenerate statistic: zero variance, vanishing quadratic form, all-zero
/// state pair, and similar.
class DegenerateError : public Error {
public:
    explicit DegenerateError(const std::string& what) : Error(ErrorClass::numerical, what) {}
};

/// Fewer observations than parameters.
class UnderdeterminedError : public Error {
public:
    explicit UnderdeterminedError(const std::string& what) : Error(ErrorClass::numerical, what) {}
};

/// Broken internal assumption; indicates a defect, not bad input.
class InternalError : public Error {
public:
    explicit InternalError(const std::string& what) : Error(ErrorClass::internal, what) {}
};

}  // namespace ratekit
