#pragma once

#include <stdexcept>
#include <string>

namespace gainswitch {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error
{
public:
    using Error::Error;
};

/// DC bias drives the carrier density to or above threshold.
class AboveThresholdBias : public Error
{
public:
    using Error::Error;
};

class NoSteadyState : public Error
{
public:
    using Error::Error;
};

class DivergenceError : public Error
{
public:
    DivergenceError(const std::string& what, double time)
        : Error(what), time_(time)
    {
    }

    double time() const noexcept { return time_; }

private:
    double time_;
};

class BelowThresholdPulse : public Error
{
public:
    using Error::Error;
};

class UndefinedRate : public Error
{
public:
    using Error::Error;
};

class InvalidRegime : public Error
{
public:
    using Error::Error;
};

class NoCrossing : public Error
{
public:
    using Error::Error;
};

class TruncationError : public Error
{
public:
    using Error::Error;
};

class ConfigError : public Error
{
public:
    ConfigError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line)
    {
    }

    int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace gainswitch
