#pragma once

#include <stdexcept>
#include <string>

namespace autovc {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad argument to an operation (shape mismatch, out-of-range index, ...).
class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& msg) : Error(msg) {}
};

/// A structurally valid input violating a semantic constraint
/// (speaker with too few utterances, degenerate embedding mean, ...).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// Malformed file content; carries the offending line when known.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg, long line = -1)
        : Error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

/// Filesystem / OS level failure.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Mismatch between a stored configuration and the running one.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Checkpoint container problems, each with its own type so callers can
/// tell them apart.
class CheckpointVersionError : public Error {
public:
    explicit CheckpointVersionError(const std::string& msg) : Error(msg) {}
};

class CheckpointConfigError : public ConfigError {
public:
    explicit CheckpointConfigError(const std::string& msg) : ConfigError(msg) {}
};

class CheckpointCorruptError : public Error {
public:
    explicit CheckpointCorruptError(const std::string& msg) : Error(msg) {}
};

/// Training blew up (non-finite loss). Carries the step it happened at.
class TrainingError : public Error {
public:
    TrainingError(const std::string& msg, long step) : Error(msg), step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

}  // namespace autovc
