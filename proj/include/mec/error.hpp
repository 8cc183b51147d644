#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace mec {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
  public:
    using Error::Error;
};

class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// A decision was applied in a state where it is not allowed.
class InfeasibleDecision : public Error {
  public:
    using Error::Error;
};

/// beta == 0: the transmitter never succeeds, so cloud times diverge.
class DivergentTransmission : public Error {
  public:
    using Error::Error;
};

/// A linear solve or simplex run failed to reach the required accuracy.
class NumericalFailure : public Error {
  public:
    NumericalFailure(const std::string& what, double residual)
        : Error(what + " (residual " + format(residual) + ")"), residual_(residual) {}
    explicit NumericalFailure(const std::string& what) : Error(what) {}

    double residual() const noexcept { return residual_; }

  private:
    static std::string format(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", v);
        return buf;
    }

    double residual_ = 0.0;
};

/// Delay metrics are undefined without arrivals (alpha == 0).
class UndefinedDelay : public Error {
  public:
    using Error::Error;
};

/// No task is ever scheduled, so the local fraction has a zero denominator.
class NoThroughput : public Error {
  public:
    using Error::Error;
};

/// Every grid point of the eta search was infeasible.
class SynthesisInfeasible : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    ParseError(const std::string& what, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

  private:
    int line_;
};

} // namespace mec
