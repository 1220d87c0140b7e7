#pragma once

#include <stdexcept>
#include <string>

namespace dlsc {

/// Argument violates an operation's precondition (bad dimensions, non-PD
/// covariance, nonpositive concentration, ...).
class InvalidInput : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// A fit cannot start: empty network, G > n, non-finite initial posterior.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Likelihood/payload combination the model does not define.
class UnsupportedLikelihood : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Metric is undefined on the given input (single-class AUC, empty graph).
class UndefinedMetric : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error
{
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_{line}
    {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace dlsc
