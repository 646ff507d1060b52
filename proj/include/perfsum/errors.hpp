#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace perfsum {

// Base class of every recoverable error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- indicator / confusion errors ---

// normalize() was asked to scale a confusion whose four counts are all zero.
class ZeroTotalError : public Error {
public:
    using Error::Error;
};

// A conditional indicator required for a reconstruction is undefined.
class MissingIndicatorError : public Error {
public:
    using Error::Error;
};

// An (event, condition) pair violates the family constraint, or an indicator
// expression failed to parse.
class InvalidSpecError : public Error {
public:
    using Error::Error;
};

// --- weighting / summarization errors ---

class WeightError : public Error {
public:
    using Error::Error;
};

class MissingSizeError : public WeightError {
public:
    using WeightError::WeightError;
};

class MissingCategoryError : public WeightError {
public:
    using WeightError::WeightError;
};

class AllZeroWeightsError : public WeightError {
public:
    using WeightError::WeightError;
};

// Legacy mean hit an undefined per-video value under the `error` policy.
class UndefinedIndicatorError : public Error {
public:
    using Error::Error;
};

// Legacy mean found no defined value in any category.
class NoDefinedValuesError : public Error {
public:
    using Error::Error;
};

// Ranking was requested over an empty or all-undefined value map.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

// --- space conversion errors ---

class InvalidPriorError : public Error {
public:
    using Error::Error;
};

class ZeroPrecisionError : public Error {
public:
    using Error::Error;
};

// The PR point maps outside the ROC unit square; it lies in the unachievable
// region for the given prior.
class AchievabilityError : public Error {
public:
    using Error::Error;
};

// --- ingestion errors ---

class ParseError : public Error {
public:
    ParseError(int line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_ = 0;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

// A parsed value lies outside its domain (negative count, probability
// outside [0,1], zero size).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& reason) : Error(reason) {}
    DomainError(int line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_ = 0;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

// A ground-truth gray level is not classified by the active label mapping.
class UnmappedLabelError : public Error {
public:
    UnmappedLabelError(std::uint8_t value, int x, int y)
        : Error("unmapped ground-truth value " + std::to_string(value) + " at pixel (" +
                std::to_string(x) + "," + std::to_string(y) + ")"),
          value_(value), x_(x), y_(y) {}

    std::uint8_t value() const noexcept { return value_; }
    int x() const noexcept { return x_; }
    int y() const noexcept { return y_; }

private:
    std::uint8_t value_ = 0;
    int x_ = 0;
    int y_ = 0;
};

// --- CLI / configuration errors ---

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace perfsum
