#pragma once

#include <stdexcept>
#include <string>

namespace dnls {

/// Root of all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: violated precondition, malformed config, unsupported combination.
/// The CLI maps these to exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

/// Failure while computing from valid input (blow-up, step underflow, I/O).
/// The CLI maps these to exit code 3.
class RuntimeFailure : public Error {
public:
    using Error::Error;
};

#define DNLS_DEFINE_ERROR(Name, Base)    \
    class Name : public Base {           \
    public:                              \
        using Base::Base;                \
    }

DNLS_DEFINE_ERROR(DomainError, InputError);
DNLS_DEFINE_ERROR(LengthMismatch, InputError);
DNLS_DEFINE_ERROR(WavenumberError, InputError);
DNLS_DEFINE_ERROR(ConfigError, InputError);
DNLS_DEFINE_ERROR(ValidationError, InputError);
DNLS_DEFINE_ERROR(GridMismatch, InputError);
DNLS_DEFINE_ERROR(NeedThreeSamples, InputError);
DNLS_DEFINE_ERROR(WindowTooShort, InputError);
DNLS_DEFINE_ERROR(HypothesisViolated, InputError);

DNLS_DEFINE_ERROR(BlowUpDetected, RuntimeFailure);
DNLS_DEFINE_ERROR(StepFailure, RuntimeFailure);
DNLS_DEFINE_ERROR(IOError, RuntimeFailure);

#undef DNLS_DEFINE_ERROR

/// Config text could not be parsed. Carries the 1-based line number
/// (0 when the problem is not tied to a line, e.g. a missing key).
class ParseError : public InputError {
public:
    ParseError(int line, const std::string& what)
        : InputError(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace dnls
