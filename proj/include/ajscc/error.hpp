#pragma once

#include <stdexcept>
#include <string>

namespace ajscc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Non-finite or otherwise unusable input values.
class InputError : public Error {
public:
    using Error::Error;
};

// Operation called outside its documented preconditions.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class DemodulationError : public Error {
public:
    using Error::Error;
};

// Wraps a failure inside run_link with the name of the pipeline stage.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

} // namespace ajscc
